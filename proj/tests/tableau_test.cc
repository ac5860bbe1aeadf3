// Copyright 2026 The qpdb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qpdb/tableau.h"

#include <sstream>

#include "gtest/gtest.h"

#include "qpdb/error.h"
#include "qpdb/mub.h"
#include "qpdb/qrac.h"
#include "qpdb/store.h"
#include "test_util.h"

using namespace qpdb;
using qpdb::testing::random_tableau;

namespace {

std::vector<bool> bits(const std::string &s) {
    std::vector<bool> out;
    for (char c : s) {
        out.push_back(c == '1');
    }
    return out;
}

Tableau from_paulis(std::initializer_list<const char *> texts, int64_t id = 1) {
    Tableau t{id, 0, {}};
    for (const char *text : texts) {
        PauliString p = PauliString::parse(text);
        t.num_qubits = p.num_qubits();
        t.rows.push_back(to_row(p));
    }
    return t;
}

// Stabilizers of |10>: {-ZI, IZ}.
Tableau example_tableau() {
    return from_paulis({"-ZI", "IZ"}, 2);
}

}  // namespace

TEST(encode_pauli, two_flag_table) {
    EncodedPauli minus_zi = encode_pauli(PauliString::parse("-ZI"));
    EXPECT_EQ(minus_zi.flags, bits("0010"));
    EXPECT_TRUE(minus_zi.negative);

    EncodedPauli iz = encode_pauli(PauliString::parse("IZ"));
    EXPECT_EQ(iz.flags, bits("0001"));
    EXPECT_FALSE(iz.negative);

    EXPECT_EQ(encode_pauli(PauliString::parse("Y")).flags, bits("11"));
    EXPECT_EQ(encode_pauli(PauliString::parse("X")).flags, bits("10"));
    EXPECT_EQ(encode_pauli(PauliString::parse("Z")).flags, bits("01"));
    EXPECT_EQ(encode_pauli(PauliString::parse("I")).flags, bits("00"));
}

TEST(decode_pauli, examples) {
    EXPECT_EQ(decode_pauli(bits("0010"), true, 2).str(), "-ZI");
    EXPECT_TRUE(decode_pauli(bits("000000"), false, 3).is_identity());
    EXPECT_EQ(decode_pauli(bits("11"), false, 1).str(), "+Y");
    EXPECT_THROW(decode_pauli(bits("001"), false, 2), Error);
}

TEST(decode_pauli, inverts_encode_for_all_strings) {
    for (size_t n = 1; n <= 3; n++) {
        for (size_t code = 0; code < (size_t{1} << (2 * n)); code++) {
            for (bool negative : {false, true}) {
                PauliString p = PauliString::identity(n);
                for (size_t q = 0; q < n; q++) {
                    p.letters[q] = static_cast<Pauli>((code >> (2 * q)) & 3);
                }
                p.negative = negative;
                EncodedPauli e = encode_pauli(p);
                EXPECT_EQ(decode_pauli(e.flags, e.negative, n), p);
            }
        }
    }
}

TEST(validate_tableau, minus_zi_iz_is_valid) {
    EXPECT_TRUE(validate_tableau(example_tableau()).ok());
}

TEST(validate_tableau, anticommuting_rows) {
    TableauReport r = validate_tableau(from_paulis({"XI", "ZI"}));
    EXPECT_EQ(r.kind, TableauReport::Kind::commutation);
    EXPECT_EQ(r.first, 0u);
    EXPECT_EQ(r.second, 1u);
}

TEST(validate_tableau, duplicate_rows) {
    TableauReport r = validate_tableau(from_paulis({"ZI", "ZI"}));
    EXPECT_EQ(r.kind, TableauReport::Kind::dependence);
    EXPECT_EQ(r.first, 1u);
    // Same flags, different sign: still dependent over GF(2).
    EXPECT_EQ(validate_tableau(from_paulis({"ZZ", "-ZZ"})).kind, TableauReport::Kind::dependence);
}

TEST(validate_tableau, shape_errors) {
    Tableau t = example_tableau();
    t.rows.pop_back();
    EXPECT_EQ(validate_tableau(t).kind, TableauReport::Kind::shape);
    t = example_tableau();
    t.rows[1].x.push_back(false);
    EXPECT_EQ(validate_tableau(t).kind, TableauReport::Kind::shape);
}

TEST(tableau_to_state, examples) {
    EXPECT_TRUE(tableau_to_state(from_paulis({"ZI", "IZ"})).approx_equal(QuantumState::from_label("00")));
    // Projector-product oracle: (I - ZI)/2 (I + IZ)/2 keeps only |10>.
    Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(4, 4);
    Eigen::MatrixXcd p = (id - PauliString::parse("ZI").matrix()) * (id + PauliString::parse("IZ").matrix()) * 0.25;
    EXPECT_NEAR(std::abs(p(2, 2)), 1.0, 1e-12);
    EXPECT_TRUE(tableau_to_state(example_tableau()).approx_equal(QuantumState::from_label("10")));
}

TEST(tableau_to_state, matches_mub_basis_state) {
    const Mub &m4 = mub_family(2)[3];
    QuantumState s = tableau_to_state(from_paulis({"XY", "YZ"}));
    EXPECT_NEAR(s.fidelity(m4.state_for_label("00")), 1.0, 1e-12);
    s = tableau_to_state(from_paulis({"-XY", "YZ"}));
    EXPECT_NEAR(s.fidelity(m4.state_for_label("10")), 1.0, 1e-12);
}

TEST(tableau_to_state, errors) {
    EXPECT_THROW(tableau_to_state(from_paulis({"XI", "ZI"})), Error);
    // Dependent rows are rejected before any projector is built.
    EXPECT_THROW(tableau_to_state(from_paulis({"ZZ", "-ZZ"})), Error);
}

TEST(state_to_tableau, computational_zero) {
    Tableau t = state_to_tableau(QuantumState::from_label("00"), 9);
    EXPECT_EQ(t.circ_id, 9);
    EXPECT_TRUE(same_stabilizer_group(t, from_paulis({"ZI", "IZ"})));
    EXPECT_FALSE(same_stabilizer_group(t, example_tableau()));
}

TEST(state_to_tableau, bell_pair) {
    double r = 1 / std::sqrt(2.0);
    Tableau t = state_to_tableau(QuantumState(2, qpdb::testing::ket({r, 0, 0, r})), 1);
    EXPECT_TRUE(same_stabilizer_group(t, from_paulis({"XX", "ZZ"})));
    EXPECT_TRUE(same_stabilizer_group(t, from_paulis({"-YY", "XX"})));
}

TEST(state_to_tableau, qrac_state_is_not_stabilizer) {
    QracEncoding enc = encode_qrac(1, {{1, "0"}, {2, "0"}, {3, "0"}});
    try {
        state_to_tableau(enc.state, 1);
        FAIL() << "expected not_stabilizer";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::not_stabilizer);
    }
}

TEST(state_to_tableau, mub_states_round_trip) {
    int64_t id = 0;
    for (size_t n : {1, 2}) {
        for (const Mub &m : mub_set(n)) {
            for (const QuantumState &s : m.basis.states()) {
                Tableau t = state_to_tableau(s, id++);
                EXPECT_TRUE(validate_tableau(t).ok());
                EXPECT_GT(tableau_to_state(t).fidelity(s), 1 - 1e-9);
            }
        }
    }
}

TEST(state_to_tableau, group_round_trip_property) {
    Rng rng(53);
    for (int trial = 0; trial < 300; trial++) {
        size_t n = 1 + trial % 3;
        Tableau t = random_tableau(n, trial, rng);
        ASSERT_TRUE(validate_tableau(t).ok());
        Tableau back = state_to_tableau(tableau_to_state(t), trial);
        EXPECT_TRUE(same_stabilizer_group(t, back));
        EXPECT_TRUE(same_stabilizer_group(back, t));
    }
}

TEST(store, minus_zi_iz_rows) {
    std::vector<Tableau> tableaux = {example_tableau()};
    std::vector<GeneratorRecord> rows = export_store(tableaux);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0], (GeneratorRecord{2, 0, 2, "0010", true}));
    EXPECT_EQ(rows[1], (GeneratorRecord{2, 1, 2, "0001", false}));
}

TEST(store, rejects_bad_flag_length) {
    std::vector<GeneratorRecord> rows = {{1, 0, 2, "001", false}, {1, 1, 2, "0001", false}};
    try {
        import_store(rows);
        FAIL() << "expected a constraint violation";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::constraint_violation);
    }
}

TEST(store, rejects_key_and_shape_violations) {
    std::vector<GeneratorRecord> duplicate = {{1, 0, 2, "0010", true}, {1, 0, 2, "0001", false}};
    EXPECT_THROW(import_store(duplicate), Error);
    std::vector<GeneratorRecord> gap = {{1, 0, 2, "0010", true}, {1, 2, 2, "0001", false}};
    EXPECT_THROW(import_store(gap), Error);
    std::vector<GeneratorRecord> anticommuting = {{1, 0, 2, "1000", false}, {1, 1, 2, "0010", false}};
    EXPECT_THROW(import_store(anticommuting), Error);
    std::vector<GeneratorRecord> not_bits = {{1, 0, 1, "2x", false}};
    EXPECT_THROW(import_store(not_bits), Error);
    std::vector<Tableau> same_id = {example_tableau(), example_tableau()};
    EXPECT_THROW(export_store(same_id), Error);
}

TEST(store, csv_round_trip_property) {
    Rng rng(59);
    std::vector<Tableau> tableaux;
    for (int i = 0; i < 100; i++) {
        tableaux.push_back(random_tableau(1 + i % 5, int64_t{1} << 40 | i, rng));
    }
    std::stringstream text;
    std::vector<GeneratorRecord> rows = export_store(tableaux);
    write_csv(text, rows);
    std::vector<GeneratorRecord> parsed = read_csv(text);
    EXPECT_EQ(parsed, rows);
    EXPECT_EQ(import_store(parsed), tableaux);
}

TEST(store, sqlite_enforces_length_check) {
    std::filesystem::path path = std::filesystem::temp_directory_path() / "qpdb_store_check.db";
    std::filesystem::remove(path);
    std::vector<GeneratorRecord> bad = {{1, 0, 2, "001", false}};
    try {
        write_sqlite(path, bad);
        FAIL() << "expected the CHECK constraint to fire";
    } catch (const Error &e) {
        EXPECT_EQ(e.kind(), ErrorKind::constraint_violation);
    }
    std::filesystem::remove(path);
}

TEST(store, sqlite_and_csv_files_round_trip) {
    Rng rng(61);
    std::vector<Tableau> tableaux;
    for (int i = 0; i < 100; i++) {
        tableaux.push_back(random_tableau(1 + i % 4, -50 + i, rng));
    }
    for (const char *name : {"qpdb_store_rt.db", "qpdb_store_rt.csv"}) {
        std::filesystem::path path = std::filesystem::temp_directory_path() / name;
        std::filesystem::remove(path);
        save_store(path, tableaux);
        EXPECT_EQ(load_store(path), tableaux) << name;
        // Overwriting replaces the previous contents.
        std::vector<Tableau> one = {tableaux[3]};
        save_store(path, one);
        EXPECT_EQ(load_store(path), one) << name;
        std::filesystem::remove(path);
    }
}
