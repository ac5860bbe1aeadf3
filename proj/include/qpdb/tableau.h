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

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpdb/pauli.h"
#include "qpdb/state.h"

namespace qpdb {

/// One stabilizer generator in two-flag form: per qubit (x, z) with
/// (0,0)=I, (1,0)=X, (0,1)=Z, (1,1)=Y, plus the sign bit (1 means -1).
struct GeneratorRow {
    std::vector<bool> x;
    std::vector<bool> z;
    bool negative = false;

    bool operator==(const GeneratorRow &) const = default;
};

struct Tableau {
    int64_t circ_id = 0;
    size_t num_qubits = 0;
    std::vector<GeneratorRow> rows;

    bool operator==(const Tableau &) const = default;
};

/// 2n flags laid out as all x-flags (qubit 0..n-1) then all z-flags.
struct EncodedPauli {
    std::vector<bool> flags;
    bool negative = false;
};

EncodedPauli encode_pauli(const PauliString &p);
PauliString decode_pauli(const std::vector<bool> &flags, bool negative, size_t num_qubits);

GeneratorRow to_row(const PauliString &p);
PauliString to_pauli(const GeneratorRow &row);

struct TableauReport {
    enum class Kind { ok, shape, commutation, dependence };
    Kind kind = Kind::ok;
    size_t first = 0;   // offending row, or first row of a pair
    size_t second = 0;  // second row of a non-commuting pair
    std::string message;

    bool ok() const {
        return kind == Kind::ok;
    }
};

/// Checks shape, pairwise commutation and GF(2) independence, reporting the
/// first violation found.
TableauReport validate_tableau(const Tableau &t);

/// The unit vector fixed by every generator, from the product of
/// (I + g_k)/2 projectors. Requires n <= 3.
QuantumState tableau_to_state(const Tableau &t);

/// Finds n independent commuting signed Paulis fixing s by scanning all
/// 2*4^n candidates. Throws not_stabilizer when fewer than n exist.
Tableau state_to_tableau(const QuantumState &s, int64_t circ_id);

/// Whether two valid tableaux generate the same signed stabilizer group.
bool same_stabilizer_group(const Tableau &a, const Tableau &b);

}  // namespace qpdb
