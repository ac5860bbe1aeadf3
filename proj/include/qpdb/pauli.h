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
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qpdb {

enum class Pauli : uint8_t { I, X, Y, Z };

char pauli_char(Pauli p);

/// Signed tensor product of single-qubit Paulis, e.g. "-ZI".
struct PauliString {
    std::vector<Pauli> letters;
    bool negative = false;

    /// Accepts an optional leading '+' or '-' followed by letters from IXYZ.
    static PauliString parse(std::string_view text);
    static PauliString identity(size_t num_qubits);

    size_t num_qubits() const {
        return letters.size();
    }
    int sign() const {
        return negative ? -1 : 1;
    }
    bool is_identity() const;
    std::string str() const;

    /// Dense 2^n x 2^n matrix including the sign, big-endian qubit order.
    Eigen::MatrixXcd matrix() const;
    bool commutes_with(const PauliString &other) const;

    bool operator==(const PauliString &other) const = default;
};

/// a*b = i^phase * result. Real signs live in result.negative, so phase is
/// 0 for commuting factors and 1 for anticommuting ones.
struct PauliProduct {
    int phase;
    PauliString result;
};
PauliProduct multiply(const PauliString &a, const PauliString &b);

}  // namespace qpdb
