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

#include "qpdb/mub.h"

#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>

#include "qpdb/error.h"

namespace qpdb {

namespace {

bool close(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b, double tol = 1e-9) {
    return a.rows() == b.rows() && a.cols() == b.cols() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

/// a == phase * b for some unit phase.
bool equal_up_to_phase(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b, double tol = 1e-9) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        return false;
    }
    Eigen::Map<const Eigen::VectorXcd> va(a.data(), a.size());
    Eigen::Map<const Eigen::VectorXcd> vb(b.data(), b.size());
    return (canonicalize(Eigen::VectorXcd(va)) - canonicalize(Eigen::VectorXcd(vb))).cwiseAbs().maxCoeff() <= tol;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd &a, const Eigen::MatrixXcd &b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index r = 0; r < a.rows(); r++) {
        for (Eigen::Index c = 0; c < a.cols(); c++) {
            out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
        }
    }
    return out;
}

/// Single-qubit Clifford as a gate word in application order.
struct Clifford {
    std::vector<Gate> word;
    Eigen::MatrixXcd matrix;
};

/// The 24 single-qubit Cliffords (mod phase), each as a shortest word.
const std::vector<Clifford> &single_qubit_cliffords() {
    static const std::vector<Clifford> table = [] {
        std::vector<Gate> generators = {gates::H(), gates::S(), gates::Sdg(), gates::X(), gates::Y(), gates::Z()};
        std::vector<Clifford> found = {{{}, Eigen::MatrixXcd::Identity(2, 2)}};
        for (size_t frontier = 0; frontier < found.size() && found.size() < 24; frontier++) {
            for (const Gate &g : generators) {
                Eigen::MatrixXcd m = g.matrix() * found[frontier].matrix;
                bool seen = false;
                for (const Clifford &c : found) {
                    if (equal_up_to_phase(c.matrix, m)) {
                        seen = true;
                        break;
                    }
                }
                if (!seen) {
                    std::vector<Gate> word = found[frontier].word;
                    word.push_back(g);
                    found.push_back({std::move(word), m});
                }
            }
        }
        return found;
    }();
    return table;
}

/// If op == +/- (P on `qubit`, identity elsewhere), returns that signed P.
std::optional<PauliString> local_pauli(const Eigen::MatrixXcd &op, size_t num_qubits, size_t qubit) {
    for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
        for (bool negative : {false, true}) {
            PauliString candidate = PauliString::identity(num_qubits);
            candidate.letters[qubit] = p;
            candidate.negative = negative;
            if (close(op, candidate.matrix())) {
                PauliString single{{p}, negative};
                return single;
            }
        }
    }
    return std::nullopt;
}

/// Cheapest single-qubit Clifford c with c P c^dagger = +Z.
const Clifford &clifford_to_z(const PauliString &p) {
    static const Eigen::MatrixXcd z = PauliString::parse("Z").matrix();
    const Clifford *best = nullptr;
    Eigen::MatrixXcd pm = p.matrix();
    for (const Clifford &c : single_qubit_cliffords()) {
        if (close(c.matrix * pm * c.matrix.adjoint(), z)) {
            if (best == nullptr || c.word.size() < best->word.size()) {
                best = &c;
            }
        }
    }
    return *best;
}

Eigen::MatrixXcd cnot_matrix(size_t control) {
    Eigen::MatrixXcd m = gates::CNOT().matrix();
    if (control == 0) {
        return m;
    }
    Eigen::MatrixXcd swap = Eigen::MatrixXcd::Zero(4, 4);
    swap(0, 0) = swap(1, 2) = swap(2, 1) = swap(3, 3) = 1;
    return swap * m * swap;
}

struct CandidateCircuit {
    size_t cost = 0;
    Circuit circuit;
};

void append_word(Circuit &c, const std::vector<Gate> &word, size_t qubit) {
    for (const Gate &g : word) {
        c.ops.push_back({g, {qubit}});
    }
}

/// Tries to finish a circuit whose prefix maps observable j to a local
/// Pauli on qubit j; the closing layer rotates each of those onto Z.
std::optional<CandidateCircuit> close_with_layer(const std::vector<PauliString> &observables,
                                                 const Eigen::MatrixXcd &prefix, Circuit head, size_t head_cost) {
    size_t n = observables.size();
    CandidateCircuit out{head_cost, std::move(head)};
    for (size_t j = 0; j < n; j++) {
        Eigen::MatrixXcd image = prefix * observables[j].matrix() * prefix.adjoint();
        std::optional<PauliString> p = local_pauli(image, n, j);
        if (!p) {
            return std::nullopt;
        }
        const Clifford &c = clifford_to_z(*p);
        append_word(out.circuit, c.word, j);
        out.cost += c.word.size();
    }
    return out;
}

Circuit search_measurement_circuit(const Mub &m) {
    size_t n = m.num_qubits();
    Circuit empty;
    empty.num_qubits = n;
    Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
    if (auto local = close_with_layer(m.observables, identity, empty, 0)) {
        return local->circuit;
    }
    if (n != 2) {
        throw Error(ErrorKind::unsupported, "no local measurement circuit for single-qubit MUB");
    }

    const std::vector<Clifford> &cliffords = single_qubit_cliffords();
    std::optional<CandidateCircuit> best;
    for (size_t control : {size_t{0}, size_t{1}}) {
        Eigen::MatrixXcd cx = cnot_matrix(control);
        for (const Clifford &c0 : cliffords) {
            for (const Clifford &c1 : cliffords) {
                Eigen::MatrixXcd prefix = cx * kron(c0.matrix, c1.matrix);
                Circuit head = empty;
                append_word(head, c0.word, 0);
                append_word(head, c1.word, 1);
                head.ops.push_back({gates::CNOT(), {control, 1 - control}});
                size_t cost = c0.word.size() + c1.word.size() + 1;
                if (best && cost >= best->cost) {
                    continue;
                }
                auto candidate = close_with_layer(m.observables, prefix, std::move(head), cost);
                if (candidate && (!best || candidate->cost < best->cost)) {
                    best = std::move(candidate);
                }
            }
        }
    }
    if (!best) {
        throw Error(ErrorKind::unsupported, "no measurement circuit with one CNOT for MUB " + std::to_string(m.id));
    }
    return best->circuit;
}

/// Gate for a 2x2 unitary, preferring a named Clifford when it matches up to
/// phase. Returns nullopt for the identity.
std::optional<Gate> single_qubit_gate(const Eigen::MatrixXcd &u) {
    if (equal_up_to_phase(u, Eigen::MatrixXcd::Identity(2, 2))) {
        return std::nullopt;
    }
    for (const Gate &g : {gates::H(), gates::X(), gates::Y(), gates::Z(), gates::S(), gates::Sdg()}) {
        if (equal_up_to_phase(u, g.matrix())) {
            return g;
        }
    }
    return gates::unitary(u);
}

/// Unitary whose first column is the given unit vector.
Eigen::MatrixXcd completion(const Eigen::Vector2cd &v) {
    Eigen::MatrixXcd u(2, 2);
    u << v[0], -std::conj(v[1]), v[1], std::conj(v[0]);
    return u;
}

void push_single(Circuit &c, const Eigen::MatrixXcd &u, size_t qubit) {
    if (auto g = single_qubit_gate(u)) {
        c.ops.push_back({*g, {qubit}});
    }
}

/// Drops single-qubit gates that do not change the prepared state.
Circuit simplify_prep(Circuit c, const QuantumState &target) {
    QuantumState zero = QuantumState::basis(target.num_qubits(), 0);
    for (size_t i = 0; i < c.ops.size();) {
        if (c.ops[i].targets.size() == 1) {
            Circuit trial = c;
            trial.ops.erase(trial.ops.begin() + static_cast<std::ptrdiff_t>(i));
            if (1.0 - trial.run(zero).fidelity(target) <= 1e-12) {
                c = std::move(trial);
                continue;
            }
        }
        i++;
    }
    return c;
}

}  // namespace

std::vector<QuantumState> basis_states(std::span<const PauliString> observables) {
    if (observables.empty()) {
        throw Error(ErrorKind::invalid_argument, "need at least one observable");
    }
    size_t n = observables.front().num_qubits();
    if (observables.size() != n) {
        throw Error(ErrorKind::invalid_argument, "need exactly n observables for n qubits");
    }
    for (size_t i = 0; i < n; i++) {
        if (observables[i].num_qubits() != n) {
            throw Error(ErrorKind::dimension_mismatch, "observables have different lengths");
        }
        if (observables[i].is_identity()) {
            throw Error(ErrorKind::invalid_argument, "identity is not a valid basis observable");
        }
        for (size_t j = 0; j < i; j++) {
            if (!observables[i].commutes_with(observables[j])) {
                throw Error(ErrorKind::invalid_argument,
                            observables[j].str() + " and " + observables[i].str() + " do not commute");
            }
        }
    }

    Eigen::Index dim = Eigen::Index{1} << n;
    Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(dim, dim);
    std::vector<Eigen::MatrixXcd> ops;
    for (const PauliString &o : observables) {
        ops.push_back(o.matrix());
    }
    std::vector<QuantumState> out;
    for (size_t label = 0; label < static_cast<size_t>(dim); label++) {
        // Split the eigenspaces one observable at a time, in listed order.
        Eigen::MatrixXcd projector = identity;
        for (size_t j = 0; j < n; j++) {
            double eigenvalue = ((label >> (n - 1 - j)) & 1) ? -1.0 : 1.0;
            projector = projector * (identity + eigenvalue * ops[j]) * 0.5;
        }
        double rank = projector.trace().real();
        if (std::abs(rank - 1.0) > 1e-9) {
            throw Error(ErrorKind::invalid_argument, "observables are not independent");
        }
        Eigen::Index column = 0;
        projector.colwise().norm().maxCoeff(&column);
        out.push_back(QuantumState::normalized(canonicalize(Eigen::VectorXcd(projector.col(column)))));
    }
    return out;
}

std::vector<Mub> mub_set(size_t num_qubits) {
    std::vector<std::vector<std::string>> table;
    if (num_qubits == 1) {
        table = {{"Z"}, {"X"}, {"Y"}};
    } else if (num_qubits == 2) {
        table = {{"ZI", "IZ"}, {"XI", "IX"}, {"YI", "IY"}, {"XY", "YZ"}, {"YX", "ZY"}};
    } else {
        throw Error(ErrorKind::unsupported, "MUB families are provided for 1 and 2 qubits only");
    }
    std::vector<Mub> out;
    for (size_t i = 0; i < table.size(); i++) {
        std::vector<PauliString> observables;
        for (const std::string &s : table[i]) {
            observables.push_back(PauliString::parse(s));
        }
        MeasurementBasis basis(basis_states(observables));
        out.push_back(Mub{i + 1, std::move(observables), std::move(basis)});
    }
    return out;
}

const std::vector<Mub> &mub_family(size_t num_qubits) {
    static const std::vector<Mub> one = mub_set(1);
    static const std::vector<Mub> two = mub_set(2);
    if (num_qubits == 1) {
        return one;
    }
    if (num_qubits == 2) {
        return two;
    }
    throw Error(ErrorKind::unsupported, "MUB families are provided for 1 and 2 qubits only");
}

double verify_unbiased(const Mub &a, const Mub &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw Error(ErrorKind::dimension_mismatch, "MUBs act on different qubit counts");
    }
    double target = 1.0 / static_cast<double>(a.basis.size());
    double worst = 0;
    for (const QuantumState &v : a.basis.states()) {
        for (const QuantumState &w : b.basis.states()) {
            worst = std::max(worst, std::abs(v.fidelity(w) - target));
        }
    }
    return worst;
}

size_t Circuit::cnot_count() const {
    size_t count = 0;
    for (const CircuitOp &op : ops) {
        count += op.targets.size() == 2;
    }
    return count;
}

QuantumState Circuit::run(const QuantumState &input) const {
    if (input.num_qubits() != num_qubits) {
        throw Error(ErrorKind::dimension_mismatch, "circuit and state have different qubit counts");
    }
    QuantumState state = input;
    for (const CircuitOp &op : ops) {
        state = apply_gate(state, op.gate, op.targets);
    }
    return state;
}

std::string Circuit::str() const {
    std::ostringstream out;
    for (const CircuitOp &op : ops) {
        out << op.gate.name();
        for (size_t t : op.targets) {
            out << ' ' << t;
        }
        if (op.gate.name() == "U") {
            out << " [";
            const Eigen::MatrixXcd &m = op.gate.matrix();
            for (Eigen::Index r = 0; r < m.rows(); r++) {
                for (Eigen::Index c = 0; c < m.cols(); c++) {
                    out << (r || c ? " " : "") << m(r, c).real() << (m(r, c).imag() < 0 ? "-" : "+")
                        << std::abs(m(r, c).imag()) << "i";
                }
            }
            out << "]";
        }
        out << '\n';
    }
    return out.str();
}

Circuit measurement_circuit(const Mub &m) {
    static std::mutex mu;
    static std::map<std::pair<size_t, size_t>, Circuit> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(m.num_qubits(), m.id);
    auto it = cache.find(key);
    if (it != cache.end()) {
        return it->second;
    }
    Circuit c = search_measurement_circuit(m);
    for (size_t i = 0; i < m.basis.size(); i++) {
        if (!c.run(m.basis[i]).approx_equal(QuantumState::basis(m.num_qubits(), i))) {
            throw Error(ErrorKind::unsupported, "measurement circuit search produced a wrong rotation");
        }
    }
    cache.emplace(key, c);
    return c;
}

Circuit state_prep_circuit(const QuantumState &target) {
    size_t n = target.num_qubits();
    Circuit c;
    c.num_qubits = n;
    const Eigen::VectorXcd &a = target.amplitudes();
    if (n == 1) {
        push_single(c, completion(a), 0);
        return c;
    }
    if (n != 2) {
        throw Error(ErrorKind::unsupported, "state preparation is provided for 1 and 2 qubits");
    }

    // psi = sum_i s_i u_i (x) conj(v_i) from the SVD of the 2x2 coefficient matrix.
    Eigen::Matrix2cd coeffs;
    coeffs << a[0], a[1], a[2], a[3];
    Eigen::JacobiSVD<Eigen::Matrix2cd> svd(coeffs, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Vector2d s = svd.singularValues();
    Eigen::Matrix2cd u = svd.matrixU();
    Eigen::Matrix2cd w = svd.matrixV().conjugate();

    if (s[1] < 1e-12) {
        push_single(c, completion(u.col(0)), 0);
        push_single(c, completion(w.col(0)), 1);
    } else {
        Eigen::MatrixXcd split(2, 2);
        split << s[0], s[1], s[1], -s[0];
        push_single(c, split, 0);
        c.ops.push_back({gates::CNOT(), {0, 1}});
        push_single(c, u, 0);
        push_single(c, w, 1);
    }
    c = simplify_prep(std::move(c), target);
    return c;
}

}  // namespace qpdb
