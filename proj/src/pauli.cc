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

#include "qpdb/pauli.h"

#include "qpdb/error.h"
#include "qpdb/state.h"

namespace qpdb {

char pauli_char(Pauli p) {
    return "IXYZ"[static_cast<int>(p)];
}

namespace {

Eigen::Matrix2cd single(Pauli p) {
    const Complex i{0, 1};
    Eigen::Matrix2cd m;
    switch (p) {
        case Pauli::I:
            m << 1, 0, 0, 1;
            break;
        case Pauli::X:
            m << 0, 1, 1, 0;
            break;
        case Pauli::Y:
            m << 0, -i, i, 0;
            break;
        case Pauli::Z:
            m << 1, 0, 0, -1;
            break;
    }
    return m;
}

// x/z flags of a single Pauli, with Y = (1,1).
bool has_x(Pauli p) {
    return p == Pauli::X || p == Pauli::Y;
}
bool has_z(Pauli p) {
    return p == Pauli::Z || p == Pauli::Y;
}

}  // namespace

PauliString PauliString::parse(std::string_view text) {
    PauliString out;
    if (!text.empty() && (text.front() == '-' || text.front() == '+')) {
        out.negative = text.front() == '-';
        text.remove_prefix(1);
    }
    if (text.empty()) {
        throw Error(ErrorKind::parse_error, "empty Pauli string");
    }
    for (char c : text) {
        switch (c) {
            case 'I':
            case '_':
                out.letters.push_back(Pauli::I);
                break;
            case 'X':
                out.letters.push_back(Pauli::X);
                break;
            case 'Y':
                out.letters.push_back(Pauli::Y);
                break;
            case 'Z':
                out.letters.push_back(Pauli::Z);
                break;
            default:
                throw Error(ErrorKind::parse_error, std::string("bad Pauli letter '") + c + "'");
        }
    }
    return out;
}

PauliString PauliString::identity(size_t num_qubits) {
    return PauliString{std::vector<Pauli>(num_qubits, Pauli::I), false};
}

bool PauliString::is_identity() const {
    for (Pauli p : letters) {
        if (p != Pauli::I) {
            return false;
        }
    }
    return true;
}

std::string PauliString::str() const {
    std::string s = negative ? "-" : "+";
    for (Pauli p : letters) {
        s += pauli_char(p);
    }
    return s;
}

Eigen::MatrixXcd PauliString::matrix() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (Pauli p : letters) {
        Eigen::Matrix2cd f = single(p);
        Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
        for (Eigen::Index r = 0; r < m.rows(); r++) {
            for (Eigen::Index c = 0; c < m.cols(); c++) {
                next.block(r * 2, c * 2, 2, 2) = m(r, c) * f;
            }
        }
        m = std::move(next);
    }
    return negative ? Eigen::MatrixXcd(-m) : m;
}

bool PauliString::commutes_with(const PauliString &other) const {
    if (other.num_qubits() != num_qubits()) {
        throw Error(ErrorKind::dimension_mismatch, "Pauli strings have different lengths");
    }
    int anticommuting = 0;
    for (size_t q = 0; q < letters.size(); q++) {
        anticommuting += (has_x(letters[q]) && has_z(other.letters[q])) ^ (has_z(letters[q]) && has_x(other.letters[q]));
    }
    return anticommuting % 2 == 0;
}

PauliProduct multiply(const PauliString &a, const PauliString &b) {
    if (a.num_qubits() != b.num_qubits()) {
        throw Error(ErrorKind::dimension_mismatch, "Pauli strings have different lengths");
    }
    // Single-qubit table: phase exponent of i for p*q.
    static const int kPhase[4][4] = {
        {0, 0, 0, 0},  // I*
        {0, 0, 1, 3},  // X*I, X*X, X*Y=iZ, X*Z=-iY
        {0, 3, 0, 1},  // Y*X=-iZ, Y*Z=iX
        {0, 1, 3, 0},  // Z*X=iY, Z*Y=-iX
    };
    PauliProduct out{0, PauliString::identity(a.num_qubits())};
    for (size_t q = 0; q < a.num_qubits(); q++) {
        int pa = static_cast<int>(a.letters[q]);
        int pb = static_cast<int>(b.letters[q]);
        out.phase += kPhase[pa][pb];
        bool x = has_x(a.letters[q]) ^ has_x(b.letters[q]);
        bool z = has_z(a.letters[q]) ^ has_z(b.letters[q]);
        out.result.letters[q] = x ? (z ? Pauli::Y : Pauli::X) : (z ? Pauli::Z : Pauli::I);
    }
    if (a.negative != b.negative) {
        out.phase += 2;
    }
    out.phase %= 4;
    if (out.phase >= 2) {
        out.result.negative = true;
        out.phase -= 2;
    }
    return out;
}

}  // namespace qpdb
