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

#include "gtest/gtest.h"

#include "qpdb/error.h"
#include "test_util.h"

using namespace qpdb;
using qpdb::testing::random_state;

namespace {

// Independent oracle for the principal eigenvector: power iteration on
// (A + I), which shares eigenvectors with A and has a positive spectrum.
Eigen::VectorXcd power_iteration(std::span<const QuantumState> targets) {
    Eigen::Index dim = static_cast<Eigen::Index>(targets.front().dim());
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Identity(dim, dim);
    for (const QuantumState &t : targets) {
        a += t.amplitudes() * t.amplitudes().adjoint();
    }
    Eigen::VectorXcd v = Eigen::VectorXcd::Ones(dim) + Complex(0, 0.1) * Eigen::VectorXcd::LinSpaced(dim, 0, 1);
    for (int i = 0; i < 5000; i++) {
        v = a * v;
        v /= v.norm();
    }
    return v;
}

double average_overlap(std::span<const QuantumState> targets, const QuantumState &s) {
    double total = 0;
    for (const QuantumState &t : targets) {
        total += t.fidelity(s);
    }
    return total / static_cast<double>(targets.size());
}

const double kQrac31 = 0.5 + 0.5 / std::sqrt(3.0);

}  // namespace

TEST(equidistant_state, single_target_is_itself) {
    std::vector<QuantumState> targets = {QuantumState::from_label("01")};
    EXPECT_TRUE(equidistant_state(targets).approx_equal(targets[0], 1e-12));
}

TEST(equidistant_state, three_to_one_qrac) {
    QracEncoding enc = encode_qrac(1, {{1, "0"}, {2, "0"}, {3, "0"}});
    std::array<double, 3> bloch = bloch_vector(enc.state);
    double r = 1 / std::sqrt(3.0);
    EXPECT_NEAR(bloch[0], r, 1e-9);
    EXPECT_NEAR(bloch[1], r, 1e-9);
    EXPECT_NEAR(bloch[2], r, 1e-9);
    for (double overlap : enc.overlaps) {
        EXPECT_NEAR(overlap, kQrac31, 1e-9);
        EXPECT_NEAR(overlap, 0.789, 5e-4);
    }
}

TEST(equidistant_state, three_to_one_cube_corners) {
    for (int bits = 0; bits < 8; bits++) {
        std::string bz(1, '0' + ((bits >> 2) & 1));
        std::string bx(1, '0' + ((bits >> 1) & 1));
        std::string by(1, '0' + (bits & 1));
        QracEncoding enc = encode_qrac(1, {{1, bz}, {2, bx}, {3, by}});
        std::array<double, 3> bloch = bloch_vector(enc.state);
        double r = 1 / std::sqrt(3.0);
        EXPECT_NEAR(bloch[0], bx == "0" ? r : -r, 1e-9);
        EXPECT_NEAR(bloch[1], by == "0" ? r : -r, 1e-9);
        EXPECT_NEAR(bloch[2], bz == "0" ? r : -r, 1e-9);
        for (size_t mub = 1; mub <= 3; mub++) {
            std::vector<double> p = per_copy_distribution(enc, mub);
            size_t target = bits_to_index(enc.targets[mub - 1].bits);
            EXPECT_NEAR(p[target], kQrac31, 1e-9);
            EXPECT_NEAR(p[1 - target], 1 - kQrac31, 1e-9);
        }
    }
}

TEST(equidistant_state, example_block_against_power_iteration) {
    QracEncoding enc = encode_qrac(2, {{1, "10"}, {2, "11"}, {3, "00"}, {4, "01"}, {5, "10"}});
    std::vector<QuantumState> targets;
    for (const QracTarget &t : enc.targets) {
        targets.push_back(mub_family(2)[t.mub_id - 1].state_for_label(t.bits));
    }
    QuantumState oracle = QuantumState::normalized(power_iteration(targets));
    EXPECT_NEAR(enc.state.fidelity(oracle), 1.0, 1e-9);

    std::vector<double> p = per_copy_distribution(enc, 1);
    // Frozen from the oracle above (numpy eigh gives the same value).
    EXPECT_NEAR(p[2], 0.5520147021340203, 1e-9);
    EXPECT_GT(p[2], 0.25 + 1e-6);
    // This block happens to be exactly equidistant.
    for (double overlap : enc.overlaps) {
        EXPECT_NEAR(overlap, p[2], 1e-9);
    }
}

TEST(equidistant_state, errors) {
    std::vector<QuantumState> none;
    EXPECT_THROW(equidistant_state(none), Error);
    std::vector<QuantumState> mixed = {QuantumState::basis(1, 0), QuantumState::basis(2, 0)};
    EXPECT_THROW(equidistant_state(mixed), Error);
    std::vector<QuantumState> too_many(4, QuantumState::basis(1, 0));
    EXPECT_THROW(equidistant_state(too_many), Error);
    EXPECT_THROW(encode_qrac(2, {{6, "00"}}), Error);
    EXPECT_THROW(encode_qrac(2, {{1, "0"}}), Error);
}

TEST(equidistant_state, maximizes_average_overlap_property) {
    Rng rng(31);
    std::uniform_int_distribution<int> label(0, 3);
    for (int trial = 0; trial < 10; trial++) {
        std::vector<QuantumState> targets;
        for (size_t m = 0; m < 5; m++) {
            targets.push_back(mub_family(2)[m].basis[static_cast<size_t>(label(rng))]);
        }
        QuantumState best = equidistant_state(targets);
        double score = average_overlap(targets, best);
        for (const QuantumState &t : targets) {
            EXPECT_GE(score + 1e-12, average_overlap(targets, t));
        }
        for (int i = 0; i < 1000; i++) {
            EXPECT_GE(score + 1e-12, average_overlap(targets, random_state(2, rng)));
        }
    }
}

TEST(equidistant_state, permutation_invariant_property) {
    Rng rng(37);
    std::uniform_int_distribution<int> label(0, 3);
    for (int trial = 0; trial < 50; trial++) {
        std::vector<QuantumState> targets;
        for (size_t m = 0; m < 5; m++) {
            targets.push_back(mub_family(2)[m].basis[static_cast<size_t>(label(rng))]);
        }
        QuantumState a = equidistant_state(targets);
        std::shuffle(targets.begin(), targets.end(), rng);
        QuantumState b = equidistant_state(targets);
        EXPECT_NEAR(a.fidelity(b), 1.0, 1e-9);
    }
}

TEST(encode_qrac, overlaps_never_worse_than_guessing) {
    // Exhaustive over all 4^5 target lists for the five 2-qubit MUBs.
    for (int code = 0; code < 1024; code++) {
        std::vector<QracTarget> targets;
        for (size_t m = 0; m < 5; m++) {
            targets.push_back({m + 1, index_to_bits(static_cast<size_t>((code >> (2 * m)) & 3), 2)});
        }
        QracEncoding enc = encode_qrac(2, targets);
        EXPECT_NEAR(enc.state.amplitudes().squaredNorm(), 1.0, 1e-10);
        for (size_t r = 0; r < 5; r++) {
            EXPECT_GE(enc.overlaps[r], 0.25 - 1e-9);
            double direct = mub_family(2)[r].state_for_label(enc.targets[r].bits).fidelity(enc.state);
            EXPECT_NEAR(enc.overlaps[r], direct, 1e-9);
        }
    }
}

TEST(encode_qrac, min_fidelity_variant_not_worse_on_worst_row) {
    Rng rng(41);
    std::uniform_int_distribution<int> label(0, 3);
    for (int trial = 0; trial < 20; trial++) {
        std::vector<QracTarget> targets;
        for (size_t m = 0; m < 5; m++) {
            targets.push_back({m + 1, index_to_bits(static_cast<size_t>(label(rng)), 2)});
        }
        QracEncoding avg = encode_qrac(2, targets);
        QracEncoding minf = encode_qrac(2, targets, QracObjective::min_fidelity);
        double worst_avg = *std::min_element(avg.overlaps.begin(), avg.overlaps.end());
        double worst_min = *std::min_element(minf.overlaps.begin(), minf.overlaps.end());
        EXPECT_GE(worst_min, worst_avg - 1e-12);
    }
}

TEST(per_copy_distribution, single_row_eigenstate) {
    QracEncoding enc = encode_qrac(2, {{1, "11"}});
    std::vector<double> p = per_copy_distribution(enc, 1);
    EXPECT_NEAR(p[3], 1.0, 1e-12);
    EXPECT_THROW(per_copy_distribution(enc, 0), Error);
    EXPECT_THROW(per_copy_distribution(enc, 6), Error);
}

TEST(per_copy_distribution, rows_sum_to_one) {
    QracEncoding enc = encode_qrac(2, {{1, "01"}, {2, "10"}, {3, "11"}});
    for (size_t m = 1; m <= 5; m++) {
        std::vector<double> p = per_copy_distribution(enc, m);
        double total = 0;
        for (double x : p) {
            total += x;
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
    }
}

TEST(bloch_vector, axes) {
    std::array<double, 3> z = bloch_vector(QuantumState::basis(1, 0));
    EXPECT_NEAR(z[2], 1, 1e-12);
    double r = 1 / std::sqrt(2.0);
    std::array<double, 3> x = bloch_vector(QuantumState(1, qpdb::testing::ket({r, r})));
    EXPECT_NEAR(x[0], 1, 1e-12);
    EXPECT_NEAR(x[1], 0, 1e-12);
    EXPECT_THROW(bloch_vector(QuantumState::basis(2, 0)), Error);
}
