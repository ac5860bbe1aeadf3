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

#include <complex>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qpdb {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

inline constexpr size_t kMaxQubits = 3;
inline constexpr double kAlgebraicTolerance = 1e-10;
inline constexpr double kEigenTolerance = 1e-6;

/// Pure state of 1..3 qubits as a dense amplitude vector.
///
/// Amplitudes are ordered big-endian over qubit indices: qubit 0 is the
/// leftmost tensor factor, so |10> (qubit 0 set) is index 2 for two qubits.
class QuantumState {
   public:
    /// Validates length 2^n and unit norm within kAlgebraicTolerance.
    QuantumState(size_t num_qubits, Eigen::VectorXcd amplitudes);

    /// Rescales a nonzero vector to unit norm; the qubit count is inferred.
    static QuantumState normalized(const Eigen::VectorXcd &amplitudes);
    static QuantumState basis(size_t num_qubits, size_t index);
    /// Parses a bit label such as "01" into the matching computational state.
    static QuantumState from_label(std::string_view bits);

    size_t num_qubits() const {
        return num_qubits_;
    }
    size_t dim() const {
        return static_cast<size_t>(amplitudes_.size());
    }
    const Eigen::VectorXcd &amplitudes() const {
        return amplitudes_;
    }
    Complex operator[](size_t i) const {
        return amplitudes_[static_cast<Eigen::Index>(i)];
    }

    /// <this|other>
    Complex inner(const QuantumState &other) const;
    double fidelity(const QuantumState &other) const;
    /// Equal up to a global phase.
    bool approx_equal(const QuantumState &other, double tol = 1e-9) const;

   private:
    size_t num_qubits_;
    Eigen::VectorXcd amplitudes_;
};

/// A 1- or 2-qubit unitary with a display label.
class Gate {
   public:
    Gate(std::string name, Eigen::MatrixXcd matrix);

    const std::string &name() const {
        return name_;
    }
    size_t arity() const {
        return arity_;
    }
    const Eigen::MatrixXcd &matrix() const {
        return matrix_;
    }

   private:
    std::string name_;
    size_t arity_;
    Eigen::MatrixXcd matrix_;
};

namespace gates {
Gate I();
Gate X();
Gate Y();
Gate Z();
Gate H();
Gate S();
Gate Sdg();
/// Control is the first target, the flipped qubit the second.
Gate CNOT();
/// Arbitrary single- or two-qubit unitary, labelled "U".
Gate unitary(Eigen::MatrixXcd matrix);
}  // namespace gates

QuantumState apply_gate(const QuantumState &state, const Gate &gate, std::span<const size_t> targets);
QuantumState apply_gate(const QuantumState &state, const Gate &gate, std::initializer_list<size_t> targets);

/// Ordered orthonormal basis, checked once on construction.
class MeasurementBasis {
   public:
    explicit MeasurementBasis(std::vector<QuantumState> states);

    size_t num_qubits() const {
        return states_.front().num_qubits();
    }
    size_t size() const {
        return states_.size();
    }
    const QuantumState &operator[](size_t i) const {
        return states_[i];
    }
    const std::vector<QuantumState> &states() const {
        return states_;
    }

   private:
    std::vector<QuantumState> states_;
};

struct MeasurementRecord {
    size_t outcome_index;
    std::string outcome_bits;
    QuantumState collapsed_state;
};

std::vector<double> outcome_distribution(const QuantumState &state, const MeasurementBasis &basis);
std::vector<double> outcome_distribution(const QuantumState &state, std::span<const QuantumState> basis);

/// Projective measurement. Consumes exactly one draw from rng.
MeasurementRecord measure(const QuantumState &state, const MeasurementBasis &basis, Rng &rng);
MeasurementRecord measure(const QuantumState &state, std::span<const QuantumState> basis, Rng &rng);

/// Removes the global phase: the first amplitude with magnitude above 1e-9
/// becomes real and positive. The input need not be normalized.
Eigen::VectorXcd canonicalize(const Eigen::VectorXcd &amplitudes);
QuantumState canonicalize(const QuantumState &state);

/// Uniform double in [0, 1) from the top 53 bits of one rng draw.
double uniform01(Rng &rng);
/// Index sampled from a discrete distribution using one rng draw.
size_t sample_index(std::span<const double> probabilities, Rng &rng);

/// Big-endian n-bit label of an outcome index ("10" is index 2).
std::string index_to_bits(size_t index, size_t num_bits);
size_t bits_to_index(std::string_view bits);

}  // namespace qpdb
