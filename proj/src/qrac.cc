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

#include "qpdb/qrac.h"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "qpdb/error.h"

namespace qpdb {

namespace {

bool lexicographically_greater(const Eigen::VectorXcd &a, const Eigen::VectorXcd &b) {
    constexpr double tol = 1e-12;
    for (Eigen::Index i = 0; i < a.size(); i++) {
        if (std::abs(a[i].real() - b[i].real()) > tol) {
            return a[i].real() > b[i].real();
        }
        if (std::abs(a[i].imag() - b[i].imag()) > tol) {
            return a[i].imag() > b[i].imag();
        }
    }
    return false;
}

Eigen::VectorXcd principal_eigenvector(const Eigen::MatrixXcd &a) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a);
    const Eigen::VectorXd &values = solver.eigenvalues();
    Eigen::Index top = values.size() - 1;
    Eigen::VectorXcd best = canonicalize(Eigen::VectorXcd(solver.eigenvectors().col(top)));
    for (Eigen::Index i = top - 1; i >= 0 && values[top] - values[i] <= 1e-9; i--) {
        Eigen::VectorXcd candidate = canonicalize(Eigen::VectorXcd(solver.eigenvectors().col(i)));
        if (lexicographically_greater(candidate, best)) {
            best = candidate;
        }
    }
    return best;
}

Eigen::MatrixXcd weighted_projector_sum(std::span<const QuantumState> targets, std::span<const double> weights) {
    Eigen::Index dim = static_cast<Eigen::Index>(targets.front().dim());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(dim, dim);
    for (size_t r = 0; r < targets.size(); r++) {
        const Eigen::VectorXcd &v = targets[r].amplitudes();
        a += weights[r] * (v * v.adjoint());
    }
    return a;
}

double min_overlap(std::span<const QuantumState> targets, const Eigen::VectorXcd &v) {
    double worst = 1.0;
    for (const QuantumState &t : targets) {
        worst = std::min(worst, std::norm(t.amplitudes().dot(v)));
    }
    return worst;
}

Eigen::VectorXcd min_fidelity_state(std::span<const QuantumState> targets) {
    size_t count = targets.size();
    std::vector<double> weights(count, 1.0 / static_cast<double>(count));
    Eigen::VectorXcd best = principal_eigenvector(weighted_projector_sum(targets, weights));
    double best_score = min_overlap(targets, best);
    for (int iter = 1; iter <= 4000; iter++) {
        Eigen::VectorXcd v = principal_eigenvector(weighted_projector_sum(targets, weights));
        double score = min_overlap(targets, v);
        if (score > best_score + 1e-15) {
            best = v;
            best_score = score;
        }
        // Exponentiated-gradient step on lambda_max(sum w_r P_r).
        double step = 2.0 / std::sqrt(static_cast<double>(iter));
        double total = 0;
        for (size_t r = 0; r < count; r++) {
            weights[r] *= std::exp(-step * std::norm(targets[r].amplitudes().dot(v)));
            total += weights[r];
        }
        for (double &w : weights) {
            w /= total;
        }
    }
    return best;
}

}  // namespace

QuantumState equidistant_state(std::span<const QuantumState> targets, QracObjective objective) {
    if (targets.empty()) {
        throw Error(ErrorKind::invalid_argument, "equidistant state needs at least one target");
    }
    size_t n = targets.front().num_qubits();
    for (const QuantumState &t : targets) {
        if (t.num_qubits() != n) {
            throw Error(ErrorKind::dimension_mismatch, "targets have different qubit counts");
        }
    }
    if (targets.size() > (size_t{1} << n) + 1) {
        throw Error(ErrorKind::invalid_argument, "at most 2^n + 1 targets can be encoded");
    }
    Eigen::VectorXcd v;
    if (objective == QracObjective::average_fidelity) {
        std::vector<double> ones(targets.size(), 1.0);
        v = principal_eigenvector(weighted_projector_sum(targets, ones));
    } else {
        v = min_fidelity_state(targets);
    }
    return QuantumState::normalized(v);
}

QracEncoding encode_qrac(size_t num_qubits, std::vector<QracTarget> targets, QracObjective objective) {
    const std::vector<Mub> &family = mub_family(num_qubits);
    std::vector<QuantumState> states;
    for (const QracTarget &t : targets) {
        if (t.mub_id < 1 || t.mub_id > family.size()) {
            throw Error(ErrorKind::invalid_argument, "unknown MUB id " + std::to_string(t.mub_id));
        }
        if (t.bits.size() != num_qubits) {
            throw Error(ErrorKind::invalid_argument, "target label '" + t.bits + "' has the wrong width");
        }
        states.push_back(family[t.mub_id - 1].state_for_label(t.bits));
    }
    QuantumState state = equidistant_state(states, objective);
    std::vector<double> overlaps;
    for (const QuantumState &s : states) {
        overlaps.push_back(s.fidelity(state));
    }
    return QracEncoding{num_qubits, std::move(targets), std::move(state), std::move(overlaps)};
}

std::vector<double> per_copy_distribution(const QracEncoding &encoding, size_t mub_id) {
    const std::vector<Mub> &family = mub_family(encoding.num_qubits);
    if (mub_id < 1 || mub_id > family.size()) {
        throw Error(ErrorKind::invalid_argument, "unknown MUB id " + std::to_string(mub_id));
    }
    return outcome_distribution(encoding.state, family[mub_id - 1].basis);
}

std::array<double, 3> bloch_vector(const QuantumState &state) {
    if (state.num_qubits() != 1) {
        throw Error(ErrorKind::dimension_mismatch, "Bloch vector is defined for single-qubit states");
    }
    Complex a = state[0];
    Complex b = state[1];
    Complex cross = std::conj(a) * b;
    return {2 * cross.real(), 2 * cross.imag(), std::norm(a) - std::norm(b)};
}

}  // namespace qpdb
