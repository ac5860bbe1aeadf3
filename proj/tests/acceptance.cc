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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <set>
#include <sstream>
#include <string>

#include "qpdb/analysis.h"
#include "qpdb/database.h"
#include "qpdb/mub.h"
#include "qpdb/qrac.h"
#include "qpdb/session.h"
#include "qpdb/store.h"
#include "qpdb/tableau.h"
#include "test_util.h"

using namespace qpdb;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string &text) {
        detail += (detail.empty() ? "" : "; ") + text;
    }
};

std::string fmt(const char *format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
}

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

const EncodedDatabase &users_encoded() {
    static const EncodedDatabase db = [] {
        std::istringstream w("phone 30 int\nemail_name 91 ascii\n"
                             "domain 9 enum gmail.com yahoo.com outlook.com icloud.com aol.com\n");
        std::istringstream t("name,phone,email_name,domain\n"
                             "Anton Johnson,311234567,anton.johnson,gmail.com\n"
                             "Brian Smith,422345678,bsmith,yahoo.com\n"
                             "Cynthia Lee,513456789,cynthia.lee,outlook.com\n"
                             "Daniel Kim,644567890,dkim,icloud.com\n"
                             "Eva Martínez,345678901,eva.martinez,aol.com\n");
        return encode_database(parse_database(t, parse_widths(w)), 2);
    }();
    return db;
}

Outcome table_m1() {
    Outcome o;
    auto start = Clock::now();
    RetrievalModel model{symmetric_probs(kExampleProbability, 4), kExampleBlocks, SplitRule::balanced,
                         TieRule::random};
    double worst = 0;
    for (const TableRow &ref : example_reference_table()) {
        if (ref.num_keys == 1) {
            double p = row_success(model, ref.copies, 1);
            worst = std::max(worst, std::abs(p - ref.p));
            o.require(std::abs(p - ref.p) <= kTableTolerance, "k=" + std::to_string(ref.copies) + " p=" + fmt("%.4f", p));
        }
    }
    double t = seconds_since(start);
    o.require(t < 5, "runtime");
    o.note("tie-rule random, split-rule balanced, max error " + fmt("%.2e", worst) + ", " + fmt("%.3f", t) + " s");
    return o;
}

Outcome table_m2() {
    Outcome o;
    ExampleTableReport r = reproduce_example_table();
    o.require(r.m2_choice >= 0, "no rule combination within tolerance");
    if (r.m2_choice >= 0) {
        const RuleResult &c = r.m2[r.m2_choice];
        o.note("chosen tie-rule " + std::string(tie_rule_name(c.tie)) + ", split-rule " +
               std::string(split_rule_name(c.split)) + ", max error " + fmt("%.2e", c.max_error));
        for (const TableRow &row : c.rows) {
            if (row.copies >= 41) {
                o.note("k=" + std::to_string(row.copies) + " p=" + fmt("%.4f", row.p));
            }
        }
    }
    return o;
}

Outcome qrac_3_to_1() {
    Outcome o;
    QracEncoding enc = encode_qrac(1, {{1, "0"}, {2, "0"}, {3, "0"}});
    double expected = 0.5 + 0.5 / std::sqrt(3.0);
    for (size_t id = 1; id <= 3; id++) {
        double p = per_copy_distribution(enc, id)[0];
        o.require(std::abs(p - expected) < 1e-9, "MUB " + std::to_string(id) + " p=" + fmt("%.12f", p));
        o.require(std::abs(p - 0.789) < 5e-4, "agreement with 0.789");
    }
    std::array<double, 3> b = bloch_vector(enc.state);
    double s = 1 / std::sqrt(3.0);
    o.require(std::abs(b[0] - s) < 1e-9 && std::abs(b[1] - s) < 1e-9 && std::abs(b[2] - s) < 1e-9, "Bloch vector");
    o.note("p=" + fmt("%.6f", per_copy_distribution(enc, 1)[0]) + ", Bloch (" + fmt("%.9f", b[0]) + ", " +
           fmt("%.9f", b[1]) + ", " + fmt("%.9f", b[2]) + ")");
    return o;
}

Outcome qrac_2_qubit() {
    Outcome o;
    QracEncoding enc = encode_qrac(2, {{1, "10"}, {2, "11"}, {3, "00"}, {4, "01"}, {5, "10"}});
    double p = per_copy_distribution(enc, 1)[bits_to_index("10")];
    o.require(p >= 0.25 + 1e-6, "better than random guessing");
    bool confirmed = std::abs(p - kExampleProbability) <= 2e-3;
    o.note("measured " + fmt("%.6f", p) + ", reference 0.5424, deviation " + fmt("%+.6f", p - kExampleProbability) +
           (confirmed ? " (confirmed)" : " (not confirmed)"));
    return o;
}

Outcome mub_suite() {
    Outcome o;
    for (size_t n : {1, 2}) {
        const std::vector<Mub> &family = mub_family(n);
        size_t pairs = 0;
        double worst = 0;
        for (size_t i = 0; i < family.size(); i++) {
            for (size_t j = i + 1; j < family.size(); j++) {
                worst = std::max(worst, verify_unbiased(family[i], family[j]));
                pairs++;
            }
        }
        o.require(pairs == (n == 1 ? 3u : 10u), "pair count");
        o.require(worst < 1e-10, "unbiasedness n=" + std::to_string(n));
        o.note("n=" + std::to_string(n) + ": " + std::to_string(pairs) + " pairs, max deviation " + fmt("%.1e", worst));
    }
    return o;
}

Outcome tableau_suite() {
    Outcome o;
    EncodedPauli a = encode_pauli(PauliString::parse("-ZI"));
    EncodedPauli b = encode_pauli(PauliString::parse("IZ"));
    o.require(a.flags == std::vector<bool>{0, 0, 1, 0} && a.negative, "-ZI encoding");
    o.require(b.flags == std::vector<bool>{0, 0, 0, 1} && !b.negative, "IZ encoding");

    double worst = 0;
    size_t states = 0;
    for (const Mub &m : mub_family(2)) {
        for (const QuantumState &s : m.basis.states()) {
            Tableau t = state_to_tableau(s, static_cast<int64_t>(states++));
            worst = std::max(worst, 1 - tableau_to_state(t).fidelity(s));
        }
    }
    o.require(states == 20 && worst < 1e-9, "MUB state round trip");

    Rng rng(20260101);
    std::vector<Tableau> tableaux;
    for (int i = 0; i < 100; i++) {
        tableaux.push_back(qpdb::testing::random_tableau(1 + i % 3, 1000 + i, rng));
    }
    std::vector<GeneratorRecord> rows = export_store(tableaux);
    std::stringstream csv;
    write_csv(csv, rows);
    o.require(read_csv(csv) == rows && import_store(rows) == tableaux, "CSV round trip");
    std::filesystem::path db = std::filesystem::temp_directory_path() / "qpdb_acceptance_store.db";
    std::filesystem::remove(db);
    save_store(db, tableaux);
    o.require(read_sqlite(db) == rows && load_store(db) == tableaux, "SQLite round trip");
    std::filesystem::remove(db);
    o.note("20 MUB states max infidelity " + fmt("%.1e", worst) + ", 100 tableaux bit-exact via CSV and SQLite");
    return o;
}

/// Every block carries the reference target list (10, 11, 00, 01, 10), so
/// each row sees the same non-degenerate per-copy distribution.
EncodedDatabase reference_pattern_db() {
    DatabaseSpec spec;
    spec.keys = users_encoded().info.keys;
    spec.num_bits = 130;
    for (const char *pattern : {"10", "11", "00", "01", "10"}) {
        std::string payload;
        for (int b = 0; b < 65; b++) {
            payload += pattern;
        }
        spec.payloads.push_back(payload);
    }
    return encode_database(spec, 2);
}

Outcome protocol_end_to_end() {
    Outcome o;
    auto start = Clock::now();
    std::vector<std::string> keys = {"Anton Johnson"};

    const EncodedDatabase &users = users_encoded();
    MonteCarloReport real = monte_carlo_validate(users, keys, 41, 2000, 424242, TieRule::strict);
    o.require(std::abs(real.z) < 3, "user table |z| < 3");

    EncodedDatabase fixture = reference_pattern_db();
    MonteCarloReport ref = monte_carlo_validate(fixture, keys, 41, 2000, 515151, TieRule::strict);
    o.require(std::abs(ref.z) < 3, "reference-pattern table |z| < 3");

    Rng rng(7);
    SessionOutcome debug = run_local_debug_session(users, 41, {keys, TieRule::strict, true}, rng);
    o.require(debug.result.fragment_bits[0] == users.payloads[0], "noiseless debug recovery");
    double t = seconds_since(start);
    o.require(t < 60, "runtime");
    o.note("user table: empirical " + fmt("%.4f", real.empirical) + ", analytic " + fmt("%.2e", real.analytic) +
           ", z " + fmt("%+.2f", real.z));
    o.note("reference-pattern table: empirical " + fmt("%.4f", ref.empirical) + ", analytic " +
           fmt("%.4f", ref.analytic) + ", z " + fmt("%+.2f", ref.z));
    o.note("2000 sessions each; noiseless exact; " + fmt("%.1f", t) + " s");
    return o;
}

Outcome privacy() {
    Outcome o;
    StateTable table = users_encoded().state_table();
    const std::vector<std::string> &keys = table.info.keys;
    std::set<uint64_t> digests;
    size_t sessions = 0;
    auto run = [&](std::vector<std::string> chosen) {
        Rng rng(31337);
        digests.insert(run_local_session(table, 41, {std::move(chosen), TieRule::strict, false}, rng)
                           .alice_transcript.digest());
        sessions++;
    };
    for (size_t i = 0; i < keys.size(); i++) {
        run({keys[i]});
    }
    for (size_t i = 0; i < keys.size(); i++) {
        for (size_t j = i + 1; j < keys.size(); j++) {
            run({keys[i], keys[j]});
        }
    }
    o.require(sessions == 15 && digests.size() == 1, "identical Alice transcripts");

    for (TieRule tie : {TieRule::random, TieRule::strict}) {
        RetrievalModel model{symmetric_probs(kExampleProbability, 4), kExampleBlocks, SplitRule::balanced, tie};
        double p1 = row_success(model, 41, 1);
        double p2 = row_success(model, 41, 2);
        o.require(p2 < 0.05 && 0.85 < p1, "bracket under " + std::string(tie_rule_name(tie)) + " ties");
        o.note(std::string(tie_rule_name(tie)) + " ties: p(M=1)=" + fmt("%.4f", p1) + ", p(M=2)=" + fmt("%.4f", p2));
    }
    o.note(std::to_string(sessions) + " key choices, 1 distinct transcript");
    return o;
}

Outcome dp_oracle() {
    Outcome o;
    Rng rng(99);
    std::vector<std::vector<double>> dists = {symmetric_probs(kExampleProbability, 4), {0.25, 0.25, 0.25, 0.25}};
    for (int i = 0; i < 2; i++) {
        std::vector<double> d(4);
        double s = 0;
        for (double &x : d) {
            x = uniform01(rng);
            s += x;
        }
        for (double &x : d) {
            x /= s;
        }
        dists.push_back(d);
    }
    double worst = 0;
    for (const std::vector<double> &d : dists) {
        for (size_t c = 1; c <= 8; c++) {
            for (TieRule rule : {TieRule::strict, TieRule::random}) {
                worst = std::max(worst, std::abs(plurality_probability(c, d, 0, rule) -
                                                 plurality_probability_enumerated(c, d, 0, rule)));
            }
        }
    }
    o.require(worst <= 1e-12, "agreement");
    o.note("c=1..8, 4 distributions, both tie rules, max difference " + fmt("%.1e", worst));
    return o;
}

Outcome circuits() {
    Outcome o;
    double worst_tv = 0;
    for (size_t n : {1, 2}) {
        for (const Mub &m : mub_family(n)) {
            Circuit c = measurement_circuit(m);
            std::vector<QuantumState> computational;
            for (size_t i = 0; i < m.basis.size(); i++) {
                computational.push_back(QuantumState::basis(n, i));
            }
            for (size_t i = 0; i < m.basis.size(); i++) {
                std::vector<double> dist = outcome_distribution(c.run(m.basis[i]), computational);
                double tv = 0;
                for (size_t j = 0; j < dist.size(); j++) {
                    tv += std::abs(dist[j] - (i == j ? 1.0 : 0.0));
                }
                worst_tv = std::max(worst_tv, tv / 2);
            }
        }
    }
    o.require(worst_tv < 1e-9, "measurement circuits");
    double worst_prep = 0;
    const EncodedDatabase &db = users_encoded();
    for (const QracEncoding &block : db.blocks) {
        Circuit c = state_prep_circuit(block.state);
        worst_prep = std::max(worst_prep, 1 - c.run(QuantumState::basis(2, 0)).fidelity(block.state));
    }
    o.require(db.blocks.size() == 65 && worst_prep < 1e-8, "state preparation");
    o.note("max TV " + fmt("%.1e", worst_tv) + ", 65 prep circuits max infidelity " + fmt("%.1e", worst_prep));
    return o;
}

}  // namespace

int main() {
    const std::pair<const char *, std::function<Outcome()>> criteria[] = {
        {"example table, M=1 column", table_m1},
        {"example table, M=2 column", table_m2},
        {"3-to-1 QRAC", qrac_3_to_1},
        {"2-qubit QRAC per-copy success", qrac_2_qubit},
        {"MUB unbiasedness", mub_suite},
        {"tableau and store", tableau_suite},
        {"protocol end to end", protocol_end_to_end},
        {"privacy assertions", privacy},
        {"plurality DP vs enumeration", dp_oracle},
        {"circuit checks", circuits},
    };
    int failed = 0;
    int index = 1;
    for (const auto &[name, run] : criteria) {
        Outcome o;
        try {
            o = run();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] %d. %s: %s\n", o.pass ? "PASS" : "FAIL", index++, name, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", index - 1 - failed, std::size(criteria));
    return failed == 0 ? 0 : 1;
}
