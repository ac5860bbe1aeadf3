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

#include <array>
#include <span>
#include <string>
#include <vector>

#include "qpdb/mub.h"
#include "qpdb/state.h"

namespace qpdb {

enum class QracObjective {
    /// Principal eigenvector of the sum of target projectors. Default.
    average_fidelity,
    /// Heuristic maximizer of the worst per-target overlap: the principal
    /// eigenvector of a reweighted projector sum, with weights chosen by
    /// mirror descent on the largest eigenvalue.
    min_fidelity,
};

/// Target for one database row: the basis state of `mub_id` labelled `bits`.
struct QracTarget {
    size_t mub_id;
    std::string bits;
};

struct QracEncoding {
    size_t num_qubits;
    std::vector<QracTarget> targets;
    QuantumState state;
    /// |<target_r|state>|^2 per row.
    std::vector<double> overlaps;
};

/// State maximizing the chosen fidelity objective against all targets,
/// canonicalized. Eigenvalue ties resolve to the canonical eigenvector with
/// the lexicographically greatest (real, imag) amplitude sequence.
QuantumState equidistant_state(std::span<const QuantumState> targets,
                               QracObjective objective = QracObjective::average_fidelity);

/// Encodes one target per row using the MUB family for n qubits.
QracEncoding encode_qrac(size_t num_qubits, std::vector<QracTarget> targets,
                         QracObjective objective = QracObjective::average_fidelity);

/// Outcome distribution of the encoded state in MUB `mub_id`.
std::vector<double> per_copy_distribution(const QracEncoding &encoding, size_t mub_id);

/// (<X>, <Y>, <Z>) of a single-qubit state.
std::array<double, 3> bloch_vector(const QuantumState &state);

}  // namespace qpdb
