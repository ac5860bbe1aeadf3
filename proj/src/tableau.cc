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

#include "qpdb/tableau.h"

#include <cmath>

#include "qpdb/error.h"

namespace qpdb {

namespace {

using BitVec = std::vector<bool>;

BitVec concat_flags(const GeneratorRow &row) {
    BitVec out = row.x;
    out.insert(out.end(), row.z.begin(), row.z.end());
    return out;
}

bool symplectic_commute(const GeneratorRow &a, const GeneratorRow &b) {
    bool parity = false;
    for (size_t q = 0; q < a.x.size(); q++) {
        parity ^= (a.x[q] && b.z[q]) ^ (a.z[q] && b.x[q]);
    }
    return !parity;
}

void xor_into(BitVec &dst, const BitVec &src) {
    for (size_t i = 0; i < dst.size(); i++) {
        dst[i] = dst[i] ^ src[i];
    }
}

/// Incremental GF(2) basis that remembers which input rows make up each
/// reduced vector, so membership queries can return a combination.
class Gf2Span {
   public:
    explicit Gf2Span(size_t width) : width_(width) {
    }

    /// Adds v as the next source row; returns false (and records nothing)
    /// if v was already in the span.
    bool add(const BitVec &v) {
        BitVec combo(sources_ + 1, false);
        combo.back() = true;
        BitVec reduced = v;
        reduce(reduced, combo);
        if (leading(reduced) == width_) {
            return false;
        }
        sources_++;
        basis_.push_back({std::move(reduced), std::move(combo)});
        return true;
    }

    /// Input-row indicator whose XOR equals v, if v is in the span.
    std::optional<BitVec> combination(const BitVec &v) const {
        BitVec combo(sources_, false);
        BitVec reduced = v;
        reduce(reduced, combo);
        if (leading(reduced) != width_) {
            return std::nullopt;
        }
        return combo;
    }

   private:
    struct Entry {
        BitVec vec;
        BitVec combo;
    };

    size_t leading(const BitVec &v) const {
        for (size_t i = 0; i < v.size(); i++) {
            if (v[i]) {
                return i;
            }
        }
        return width_;
    }

    void reduce(BitVec &v, BitVec &combo) const {
        // Basis vectors have distinct leading bits; sweep in insertion order
        // until no basis pivot is set in v.
        bool changed = true;
        while (changed) {
            changed = false;
            for (const Entry &e : basis_) {
                size_t pivot = leading(e.vec);
                if (v[pivot]) {
                    xor_into(v, e.vec);
                    BitVec padded = e.combo;
                    padded.resize(combo.size(), false);
                    xor_into(combo, padded);
                    changed = true;
                }
            }
        }
    }

    size_t width_;
    size_t sources_ = 0;
    std::vector<Entry> basis_;
};

}  // namespace

EncodedPauli encode_pauli(const PauliString &p) {
    GeneratorRow row = to_row(p);
    return EncodedPauli{concat_flags(row), row.negative};
}

PauliString decode_pauli(const std::vector<bool> &flags, bool negative, size_t num_qubits) {
    if (flags.size() != 2 * num_qubits) {
        throw Error(ErrorKind::invalid_argument, "expected " + std::to_string(2 * num_qubits) + " flags, got " +
                                                     std::to_string(flags.size()));
    }
    GeneratorRow row;
    row.x.assign(flags.begin(), flags.begin() + static_cast<std::ptrdiff_t>(num_qubits));
    row.z.assign(flags.begin() + static_cast<std::ptrdiff_t>(num_qubits), flags.end());
    row.negative = negative;
    return to_pauli(row);
}

GeneratorRow to_row(const PauliString &p) {
    GeneratorRow row;
    for (Pauli letter : p.letters) {
        row.x.push_back(letter == Pauli::X || letter == Pauli::Y);
        row.z.push_back(letter == Pauli::Z || letter == Pauli::Y);
    }
    row.negative = p.negative;
    return row;
}

PauliString to_pauli(const GeneratorRow &row) {
    PauliString p;
    for (size_t q = 0; q < row.x.size(); q++) {
        p.letters.push_back(row.x[q] ? (row.z[q] ? Pauli::Y : Pauli::X) : (row.z[q] ? Pauli::Z : Pauli::I));
    }
    p.negative = row.negative;
    return p;
}

TableauReport validate_tableau(const Tableau &t) {
    TableauReport report;
    size_t n = t.num_qubits;
    if (n == 0 || t.rows.size() != n) {
        report.kind = TableauReport::Kind::shape;
        report.message = "tableau for " + std::to_string(n) + " qubits has " + std::to_string(t.rows.size()) + " rows";
        return report;
    }
    for (size_t i = 0; i < n; i++) {
        if (t.rows[i].x.size() != n || t.rows[i].z.size() != n) {
            report.kind = TableauReport::Kind::shape;
            report.first = i;
            report.message = "row " + std::to_string(i) + " has the wrong flag width";
            return report;
        }
    }
    for (size_t i = 0; i < n; i++) {
        for (size_t j = i + 1; j < n; j++) {
            if (!symplectic_commute(t.rows[i], t.rows[j])) {
                report.kind = TableauReport::Kind::commutation;
                report.first = i;
                report.second = j;
                report.message = "generators " + std::to_string(i) + " and " + std::to_string(j) + " anticommute";
                return report;
            }
        }
    }
    Gf2Span span(2 * n);
    for (size_t i = 0; i < n; i++) {
        if (!span.add(concat_flags(t.rows[i]))) {
            report.kind = TableauReport::Kind::dependence;
            report.first = i;
            report.message = "generator " + std::to_string(i) + " depends on earlier rows";
            return report;
        }
    }
    return report;
}

QuantumState tableau_to_state(const Tableau &t) {
    TableauReport report = validate_tableau(t);
    if (!report.ok()) {
        throw Error(ErrorKind::invalid_tableau, report.message);
    }
    if (t.num_qubits > kMaxQubits) {
        throw Error(ErrorKind::unsupported, "statevector conversion supports at most 3 qubits");
    }
    Eigen::Index dim = Eigen::Index{1} << t.num_qubits;
    Eigen::MatrixXcd identity = Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::MatrixXcd projector = identity;
    for (const GeneratorRow &row : t.rows) {
        projector = projector * (identity + to_pauli(row).matrix()) * 0.5;
    }
    Eigen::Index column = 0;
    double norm = projector.colwise().norm().maxCoeff(&column);
    if (norm < 1e-9) {
        throw Error(ErrorKind::invalid_tableau, "generator signs are inconsistent (empty stabilized space)");
    }
    return QuantumState::normalized(canonicalize(Eigen::VectorXcd(projector.col(column))));
}

Tableau state_to_tableau(const QuantumState &s, int64_t circ_id) {
    size_t n = s.num_qubits();
    Tableau t{circ_id, n, {}};
    Gf2Span span(2 * n);
    const Eigen::VectorXcd &v = s.amplitudes();
    size_t total = size_t{1} << (2 * n);
    // Enumerate letters in base 4 with qubit 0 most significant, '+' before '-'.
    for (size_t code = 1; code < total && t.rows.size() < n; code++) {
        PauliString p = PauliString::identity(n);
        for (size_t q = 0; q < n; q++) {
            p.letters[q] = static_cast<Pauli>((code >> (2 * (n - 1 - q))) & 3);
        }
        for (bool negative : {false, true}) {
            p.negative = negative;
            if ((p.matrix() * v - v).norm() > 1e-9) {
                continue;
            }
            GeneratorRow row = to_row(p);
            if (span.add(concat_flags(row))) {
                t.rows.push_back(std::move(row));
            }
            break;
        }
    }
    if (t.rows.size() < n) {
        throw Error(ErrorKind::not_stabilizer, "state is fixed by only " + std::to_string(t.rows.size()) +
                                                   " independent Paulis, need " + std::to_string(n));
    }
    return t;
}

bool same_stabilizer_group(const Tableau &a, const Tableau &b) {
    if (a.num_qubits != b.num_qubits || !validate_tableau(a).ok() || !validate_tableau(b).ok()) {
        return false;
    }
    size_t n = a.num_qubits;
    Gf2Span span(2 * n);
    for (size_t i = 0; i < n; i++) {
        span.add(concat_flags(b.rows[i]));
    }
    for (const GeneratorRow &row : a.rows) {
        std::optional<BitVec> combo = span.combination(concat_flags(row));
        if (!combo) {
            return false;
        }
        PauliString product = PauliString::identity(n);
        for (size_t i = 0; i < n; i++) {
            if ((*combo)[i]) {
                product = multiply(product, to_pauli(b.rows[i])).result;
            }
        }
        if (product.negative != row.negative) {
            return false;
        }
    }
    return true;
}

}  // namespace qpdb
