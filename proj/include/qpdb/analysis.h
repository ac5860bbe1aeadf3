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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qpdb/database.h"
#include "qpdb/session.h"

namespace qpdb {

/// Probability that outcome `correct` wins the plurality vote among
/// `copies` independent draws from `probs`. Under TieRule::random a k-way
/// tie at the top counts 1/k.
///
/// Exact DP: for each count a of the correct outcome, the others are
/// assigned one at a time as conditional binomials, tracking the copies
/// left and how many others reached a. O(m * c^3) for m outcomes.
double plurality_probability(size_t copies, std::span<const double> probs, size_t correct = 0,
                             TieRule rule = TieRule::strict);

/// Brute-force reference over all m^c outcome sequences.
double plurality_probability_enumerated(size_t copies, std::span<const double> probs, size_t correct = 0,
                                        TieRule rule = TieRule::strict);

struct RetrievalModel {
    std::vector<double> probs;  // probs[0] is the correct outcome
    size_t blocks = 1;
    SplitRule split = SplitRule::balanced;
    TieRule tie = TieRule::random;
};

/// p_correct followed by (1 - p_correct)/(outcomes - 1) for the rest.
std::vector<double> symmetric_probs(double p_correct, size_t outcomes);

/// Probability that all M rows decode correctly on every block.
double row_success(const RetrievalModel &model, size_t copies, size_t num_keys);

struct TableRow {
    size_t copies;
    size_t num_keys;
    double p;
};

struct RuleResult {
    TieRule tie;
    SplitRule split;
    std::vector<TableRow> rows;
    double max_error = 0;  // against the reference column
    bool matches = false;
};

struct ExampleTableReport {
    std::vector<RuleResult> m1;  // every rule combination, default first
    std::vector<RuleResult> m2;
    int m1_choice = -1;          // first matching entry, or -1
    int m2_choice = -1;
};

/// Reference grid: per-copy success 0.5424, four outcomes, 65 blocks.
inline constexpr double kExampleProbability = 0.5424;
inline constexpr size_t kExampleBlocks = 65;
inline constexpr double kTableTolerance = 2e-3;
const std::vector<TableRow> &example_reference_table();

/// Evaluates every tie/split combination against the reference values.
ExampleTableReport reproduce_example_table();

/// Exact success probability of a real session: every chosen row decodes
/// correctly on every block, using each block's actual outcome
/// distribution in that row's MUB.
double session_success(const EncodedDatabase &db, std::span<const std::string> keys, size_t copies, TieRule rule);

struct MonteCarloReport {
    size_t trials = 0;
    size_t successes = 0;
    double empirical = 0;
    double analytic = 0;
    double z = 0;  // (empirical - analytic) / standard error
};

/// Runs `trials` full sessions through the wire protocol, counting those in
/// which every chosen row came back exactly.
MonteCarloReport monte_carlo_validate(const EncodedDatabase &db, std::span<const std::string> keys, size_t copies,
                                      size_t trials, uint64_t seed, TieRule rule = TieRule::strict);

/// Text and CSV renderings of (k, M, p) rows.
std::string format_table(std::span<const TableRow> rows);
std::string format_csv(std::span<const TableRow> rows);

}  // namespace qpdb
