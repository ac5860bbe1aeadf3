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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "qpdb/state.h"

namespace qpdb::testing {

/// Haar-ish random state: normalized complex Gaussian vector.
inline QuantumState random_state(size_t num_qubits, Rng &rng) {
    std::normal_distribution<double> normal;
    Eigen::VectorXcd v(Eigen::Index{1} << num_qubits);
    for (Eigen::Index i = 0; i < v.size(); i++) {
        v[i] = Complex(normal(rng), normal(rng));
    }
    return QuantumState::normalized(v);
}

inline Eigen::VectorXcd ket(std::initializer_list<Complex> amps) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
    Eigen::Index i = 0;
    for (Complex a : amps) {
        v[i++] = a;
    }
    return v;
}

}  // namespace qpdb::testing

#include "qpdb/tableau.h"

namespace qpdb::testing {

/// Random valid tableau: rejection-samples rows that commute with and are
/// independent of the rows chosen so far (GF(2) rank on bit masks).
inline Tableau random_tableau(size_t num_qubits, int64_t circ_id, Rng &rng) {
    std::bernoulli_distribution coin(0.5);
    Tableau t{circ_id, num_qubits, {}};
    std::vector<uint64_t> reduced;  // echelon basis of accepted flag masks
    while (t.rows.size() < num_qubits) {
        GeneratorRow row;
        uint64_t mask = 0;
        for (size_t q = 0; q < num_qubits; q++) {
            row.x.push_back(coin(rng));
            row.z.push_back(coin(rng));
            mask |= uint64_t{row.x[q]} << q;
            mask |= uint64_t{row.z[q]} << (num_qubits + q);
        }
        row.negative = coin(rng);
        bool commutes = true;
        for (const GeneratorRow &other : t.rows) {
            bool parity = false;
            for (size_t q = 0; q < num_qubits; q++) {
                parity ^= (row.x[q] && other.z[q]) ^ (row.z[q] && other.x[q]);
            }
            commutes = commutes && !parity;
        }
        uint64_t residue = mask;
        for (uint64_t b : reduced) {
            residue = std::min(residue, residue ^ b);
        }
        if (!commutes || residue == 0) {
            continue;
        }
        reduced.push_back(residue);
        std::sort(reduced.rbegin(), reduced.rend());
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace qpdb::testing
