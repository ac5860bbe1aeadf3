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

#include "qpdb/state.h"

#include <cmath>
#include <sstream>

#include "qpdb/error.h"

namespace qpdb {

std::string_view error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::invalid_argument:
            return "invalid_argument";
        case ErrorKind::not_normalized:
            return "not_normalized";
        case ErrorKind::not_unitary:
            return "not_unitary";
        case ErrorKind::not_orthonormal:
            return "not_orthonormal";
        case ErrorKind::dimension_mismatch:
            return "dimension_mismatch";
        case ErrorKind::unsupported:
            return "unsupported";
        case ErrorKind::not_stabilizer:
            return "not_stabilizer";
        case ErrorKind::invalid_tableau:
            return "invalid_tableau";
        case ErrorKind::constraint_violation:
            return "constraint_violation";
        case ErrorKind::parse_error:
            return "parse_error";
        case ErrorKind::protocol_error:
            return "protocol_error";
        case ErrorKind::channel_error:
            return "channel_error";
        case ErrorKind::io_error:
            return "io_error";
    }
    return "unknown";
}

namespace {

size_t qubits_for_dim(Eigen::Index dim) {
    for (size_t n = 1; n <= kMaxQubits; n++) {
        if (Eigen::Index{1} << n == dim) {
            return n;
        }
    }
    throw Error(ErrorKind::dimension_mismatch,
                "amplitude vector length " + std::to_string(dim) + " is not 2^n for n in 1..3");
}

}  // namespace

QuantumState::QuantumState(size_t num_qubits, Eigen::VectorXcd amplitudes)
    : num_qubits_(num_qubits), amplitudes_(std::move(amplitudes)) {
    if (num_qubits_ < 1 || num_qubits_ > kMaxQubits) {
        throw Error(ErrorKind::unsupported, "qubit count must be in 1..3, got " + std::to_string(num_qubits_));
    }
    if (amplitudes_.size() != (Eigen::Index{1} << num_qubits_)) {
        throw Error(ErrorKind::dimension_mismatch, "expected " + std::to_string(1 << num_qubits_) +
                                                       " amplitudes, got " + std::to_string(amplitudes_.size()));
    }
    double norm2 = amplitudes_.squaredNorm();
    if (std::abs(norm2 - 1.0) > kAlgebraicTolerance) {
        std::ostringstream msg;
        msg << "state is not normalized (squared norm " << norm2 << ")";
        throw Error(ErrorKind::not_normalized, msg.str());
    }
}

QuantumState QuantumState::normalized(const Eigen::VectorXcd &amplitudes) {
    size_t n = qubits_for_dim(amplitudes.size());
    double norm = amplitudes.norm();
    if (norm < 1e-12) {
        throw Error(ErrorKind::not_normalized, "cannot normalize the zero vector");
    }
    return QuantumState(n, amplitudes / norm);
}

QuantumState QuantumState::basis(size_t num_qubits, size_t index) {
    if (num_qubits < 1 || num_qubits > kMaxQubits || index >= (size_t{1} << num_qubits)) {
        throw Error(ErrorKind::invalid_argument, "basis index out of range");
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << num_qubits);
    v[static_cast<Eigen::Index>(index)] = 1.0;
    return QuantumState(num_qubits, std::move(v));
}

QuantumState QuantumState::from_label(std::string_view bits) {
    return basis(bits.size(), bits_to_index(bits));
}

Complex QuantumState::inner(const QuantumState &other) const {
    if (other.dim() != dim()) {
        throw Error(ErrorKind::dimension_mismatch, "inner product of states with different qubit counts");
    }
    return amplitudes_.dot(other.amplitudes_);
}

double QuantumState::fidelity(const QuantumState &other) const {
    return std::norm(inner(other));
}

bool QuantumState::approx_equal(const QuantumState &other, double tol) const {
    return other.dim() == dim() && 1.0 - fidelity(other) <= tol;
}

Gate::Gate(std::string name, Eigen::MatrixXcd matrix) : name_(std::move(name)), matrix_(std::move(matrix)) {
    if (matrix_.rows() == 2 && matrix_.cols() == 2) {
        arity_ = 1;
    } else if (matrix_.rows() == 4 && matrix_.cols() == 4) {
        arity_ = 2;
    } else {
        throw Error(ErrorKind::dimension_mismatch, "gate " + name_ + " must be 2x2 or 4x4");
    }
    Eigen::MatrixXcd product = matrix_.adjoint() * matrix_;
    double deviation = (product - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols())).cwiseAbs().maxCoeff();
    if (deviation > kAlgebraicTolerance) {
        throw Error(ErrorKind::not_unitary, "gate " + name_ + " is not unitary");
    }
}

namespace gates {

namespace {
const Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

Eigen::MatrixXcd mat2(Complex a, Complex b, Complex c, Complex d) {
    Eigen::MatrixXcd m(2, 2);
    m << a, b, c, d;
    return m;
}
}  // namespace

Gate I() {
    return Gate("I", Eigen::MatrixXcd::Identity(2, 2));
}
Gate X() {
    return Gate("X", mat2(0, 1, 1, 0));
}
Gate Y() {
    return Gate("Y", mat2(0, -kI, kI, 0));
}
Gate Z() {
    return Gate("Z", mat2(1, 0, 0, -1));
}
Gate H() {
    return Gate("H", mat2(kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2));
}
Gate S() {
    return Gate("S", mat2(1, 0, 0, kI));
}
Gate Sdg() {
    return Gate("Sdg", mat2(1, 0, 0, -kI));
}
Gate CNOT() {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(4, 4);
    m(0, 0) = 1;
    m(1, 1) = 1;
    m(2, 3) = 1;
    m(3, 2) = 1;
    return Gate("CNOT", std::move(m));
}
Gate unitary(Eigen::MatrixXcd matrix) {
    return Gate("U", std::move(matrix));
}

}  // namespace gates

QuantumState apply_gate(const QuantumState &state, const Gate &gate, std::span<const size_t> targets) {
    size_t n = state.num_qubits();
    if (targets.size() != gate.arity()) {
        throw Error(ErrorKind::invalid_argument, "gate " + gate.name() + " expects " + std::to_string(gate.arity()) +
                                                     " targets, got " + std::to_string(targets.size()));
    }
    for (size_t i = 0; i < targets.size(); i++) {
        if (targets[i] >= n) {
            throw Error(ErrorKind::invalid_argument, "target qubit " + std::to_string(targets[i]) + " out of range");
        }
        for (size_t j = 0; j < i; j++) {
            if (targets[i] == targets[j]) {
                throw Error(ErrorKind::invalid_argument, "gate targets must be distinct");
            }
        }
    }

    // Bit position of each target inside the amplitude index (big-endian).
    std::vector<size_t> shifts;
    size_t target_mask = 0;
    for (size_t t : targets) {
        shifts.push_back(n - 1 - t);
        target_mask |= size_t{1} << (n - 1 - t);
    }
    size_t sub_dim = size_t{1} << targets.size();
    auto embed = [&](size_t base, size_t sub) {
        size_t index = base;
        for (size_t k = 0; k < targets.size(); k++) {
            // Sub-index bit for target k, with target 0 as the most significant.
            if ((sub >> (targets.size() - 1 - k)) & 1) {
                index |= size_t{1} << shifts[k];
            }
        }
        return index;
    };

    const Eigen::VectorXcd &in = state.amplitudes();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(in.size());
    const Eigen::MatrixXcd &u = gate.matrix();
    for (size_t base = 0; base < state.dim(); base++) {
        if (base & target_mask) {
            continue;
        }
        for (size_t row = 0; row < sub_dim; row++) {
            Complex acc = 0;
            for (size_t col = 0; col < sub_dim; col++) {
                acc += u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) *
                       in[static_cast<Eigen::Index>(embed(base, col))];
            }
            out[static_cast<Eigen::Index>(embed(base, row))] = acc;
        }
    }
    return QuantumState(n, std::move(out));
}

QuantumState apply_gate(const QuantumState &state, const Gate &gate, std::initializer_list<size_t> targets) {
    return apply_gate(state, gate, std::span<const size_t>(targets.begin(), targets.size()));
}

MeasurementBasis::MeasurementBasis(std::vector<QuantumState> states) : states_(std::move(states)) {
    if (states_.empty()) {
        throw Error(ErrorKind::not_orthonormal, "measurement basis is empty");
    }
    size_t dim = states_.front().dim();
    if (states_.size() != dim) {
        throw Error(ErrorKind::not_orthonormal, "basis has " + std::to_string(states_.size()) + " vectors for dimension " +
                                                    std::to_string(dim));
    }
    for (size_t i = 0; i < states_.size(); i++) {
        if (states_[i].dim() != dim) {
            throw Error(ErrorKind::dimension_mismatch, "basis vectors differ in dimension");
        }
        for (size_t j = 0; j < i; j++) {
            if (std::abs(states_[i].inner(states_[j])) > kAlgebraicTolerance) {
                throw Error(ErrorKind::not_orthonormal,
                            "basis vectors " + std::to_string(j) + " and " + std::to_string(i) + " are not orthogonal");
            }
        }
    }
}

std::vector<double> outcome_distribution(const QuantumState &state, const MeasurementBasis &basis) {
    if (basis.num_qubits() != state.num_qubits()) {
        throw Error(ErrorKind::dimension_mismatch, "basis and state have different qubit counts");
    }
    std::vector<double> probs(basis.size());
    for (size_t i = 0; i < basis.size(); i++) {
        probs[i] = std::norm(basis[i].inner(state));
    }
    return probs;
}

std::vector<double> outcome_distribution(const QuantumState &state, std::span<const QuantumState> basis) {
    return outcome_distribution(state, MeasurementBasis({basis.begin(), basis.end()}));
}

MeasurementRecord measure(const QuantumState &state, const MeasurementBasis &basis, Rng &rng) {
    std::vector<double> probs = outcome_distribution(state, basis);
    size_t index = sample_index(probs, rng);
    return MeasurementRecord{index, index_to_bits(index, state.num_qubits()), basis[index]};
}

MeasurementRecord measure(const QuantumState &state, std::span<const QuantumState> basis, Rng &rng) {
    return measure(state, MeasurementBasis({basis.begin(), basis.end()}), rng);
}

Eigen::VectorXcd canonicalize(const Eigen::VectorXcd &amplitudes) {
    for (Eigen::Index i = 0; i < amplitudes.size(); i++) {
        double mag = std::abs(amplitudes[i]);
        if (mag > 1e-9) {
            Complex phase = std::conj(amplitudes[i]) / mag;
            Eigen::VectorXcd out = amplitudes * phase;
            // Make the pivot exactly real.
            out[i] = Complex(mag, 0.0);
            return out;
        }
    }
    throw Error(ErrorKind::invalid_argument, "cannot canonicalize the zero vector");
}

QuantumState canonicalize(const QuantumState &state) {
    return QuantumState(state.num_qubits(), canonicalize(state.amplitudes()));
}

double uniform01(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

size_t sample_index(std::span<const double> probabilities, Rng &rng) {
    double u = uniform01(rng);
    double total = 0;
    for (double p : probabilities) {
        total += p;
    }
    double acc = 0;
    size_t last_nonzero = 0;
    for (size_t i = 0; i < probabilities.size(); i++) {
        if (probabilities[i] <= 0) {
            continue;
        }
        last_nonzero = i;
        acc += probabilities[i] / total;
        if (u < acc) {
            return i;
        }
    }
    return last_nonzero;
}

std::string index_to_bits(size_t index, size_t num_bits) {
    std::string bits(num_bits, '0');
    for (size_t k = 0; k < num_bits; k++) {
        if ((index >> (num_bits - 1 - k)) & 1) {
            bits[k] = '1';
        }
    }
    return bits;
}

size_t bits_to_index(std::string_view bits) {
    size_t index = 0;
    for (char c : bits) {
        if (c != '0' && c != '1') {
            throw Error(ErrorKind::parse_error, "bit label must contain only '0' and '1'");
        }
        index = (index << 1) | static_cast<size_t>(c == '1');
    }
    return index;
}

}  // namespace qpdb
