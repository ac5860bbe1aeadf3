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

#include <span>
#include <string>
#include <vector>

#include "qpdb/pauli.h"
#include "qpdb/state.h"

namespace qpdb {

/// One mutually unbiased basis, described by its commuting generators.
///
/// Basis state i carries the label index_to_bits(i, n): bit j of the label
/// is 0 when the state has eigenvalue +1 under observable j and 1 for -1.
/// Alice and Bob must share this convention, so it is fixed here.
struct Mub {
    size_t id;  // 1-based position in the family
    std::vector<PauliString> observables;
    MeasurementBasis basis;

    size_t num_qubits() const {
        return basis.num_qubits();
    }
    std::string label(size_t index) const {
        return index_to_bits(index, num_qubits());
    }
    const QuantumState &state_for_label(std::string_view bits) const {
        return basis[bits_to_index(bits)];
    }
};

/// The complete MUB families used by the protocol.
///
/// n=1: Z, X, Y eigenbases (MUB 1 is computational).
/// n=2: {ZI,IZ}, {XI,IX}, {YI,IY}, {XY,YZ}, {YX,ZY}.
std::vector<Mub> mub_set(size_t num_qubits);
/// Shared, lazily built copy of mub_set(n).
const std::vector<Mub> &mub_family(size_t num_qubits);

/// Simultaneous eigenvectors of n commuting, independent Pauli observables,
/// canonicalized and ordered by label.
std::vector<QuantumState> basis_states(std::span<const PauliString> observables);

/// max over i,j of | |<v_i|w_j>|^2 - 2^-n |.
double verify_unbiased(const Mub &a, const Mub &b);

struct CircuitOp {
    Gate gate;
    std::vector<size_t> targets;
};

struct Circuit {
    size_t num_qubits = 1;
    std::vector<CircuitOp> ops;

    bool empty() const {
        return ops.empty();
    }
    size_t cnot_count() const;
    QuantumState run(const QuantumState &input) const;
    /// One gate per line, e.g. "H 0" or "CNOT 0 1".
    std::string str() const;
};

/// Rotation taking each basis state of m to the computational state with
/// the same label. Entangled bases are found by searching circuits with at
/// most one CNOT between two layers of single-qubit Cliffords.
Circuit measurement_circuit(const Mub &m);

/// Circuit preparing target from |0...0> up to global phase, for n <= 2.
/// Two-qubit targets use the Schmidt form and at most one CNOT.
Circuit state_prep_circuit(const QuantumState &target);

}  // namespace qpdb
