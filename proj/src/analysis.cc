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

#include "qpdb/analysis.h"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "qpdb/error.h"
#include "qpdb/mub.h"

namespace qpdb {

namespace {

void check_distribution(std::span<const double> probs, size_t correct) {
    if (probs.size() < 2 || correct >= probs.size()) {
        throw Error(ErrorKind::invalid_argument, "need at least two outcomes and a valid correct index");
    }
    double total = 0;
    for (double p : probs) {
        if (!(p >= 0) || !std::isfinite(p)) {
            throw Error(ErrorKind::invalid_argument, "outcome probabilities must be finite and nonnegative");
        }
        total += p;
    }
    if (std::abs(total - 1) > 1e-9) {
        throw Error(ErrorKind::invalid_argument, "outcome probabilities sum to " + std::to_string(total));
    }
}

double binomial_pmf(size_t n, size_t x, double p) {
    if (x > n) {
        return 0;
    }
    if (p <= 0) {
        return x == 0 ? 1 : 0;
    }
    if (p >= 1) {
        return x == n ? 1 : 0;
    }
    double log_choose = std::lgamma(double(n) + 1) - std::lgamma(double(x) + 1) - std::lgamma(double(n - x) + 1);
    return std::exp(log_choose + double(x) * std::log(p) + double(n - x) * std::log1p(-p));
}

}  // namespace

double plurality_probability(size_t copies, std::span<const double> probs, size_t correct, TieRule rule) {
    if (copies == 0) {
        throw Error(ErrorKind::invalid_argument, "plurality needs at least one copy");
    }
    check_distribution(probs, correct);
    std::vector<double> others;
    for (size_t i = 0; i < probs.size(); i++) {
        if (i != correct) {
            others.push_back(probs[i]);
        }
    }
    double rest = std::accumulate(others.begin(), others.end(), 0.0);
    if (rest <= 0) {
        return 1;
    }
    // mass[j]: conditional probability mass of others j.. given "not correct".
    size_t m = others.size();
    std::vector<double> mass(m + 1, 0);
    for (size_t j = m; j-- > 0;) {
        mass[j] = mass[j + 1] + others[j] / rest;
    }

    const size_t c = copies;
    const size_t ties_cap = rule == TieRule::strict ? 1 : m + 1;
    double total = 0;
    // dp[left][ties]: probability of the others assigned so far, with
    // `left` copies still to place.
    std::vector<double> dp((c + 1) * ties_cap), next((c + 1) * ties_cap);
    for (size_t a = 1; a <= c; a++) {
        double p_a = binomial_pmf(c, a, probs[correct]);
        if (p_a == 0) {
            continue;
        }
        size_t n0 = c - a;
        std::fill(dp.begin(), dp.end(), 0);
        dp[n0 * ties_cap] = 1;
        for (size_t j = 0; j < m; j++) {
            std::fill(next.begin(), next.end(), 0);
            double q = mass[j] > 0 ? std::min(1.0, others[j] / rest / mass[j]) : 0;
            if (j + 1 == m) {
                q = 1;  // the last outcome takes whatever is left
            }
            for (size_t left = 0; left <= n0; left++) {
                for (size_t t = 0; t < ties_cap; t++) {
                    double w = dp[left * ties_cap + t];
                    if (w == 0) {
                        continue;
                    }
                    size_t hi = std::min(left, a);
                    for (size_t x = 0; x <= hi; x++) {
                        size_t nt = t + (x == a);
                        if (nt >= ties_cap) {
                            continue;  // strict rule: a tie with the top is a loss
                        }
                        double px = binomial_pmf(left, x, q);
                        if (px != 0) {
                            next[(left - x) * ties_cap + nt] += w * px;
                        }
                    }
                }
            }
            std::swap(dp, next);
        }
        double win = 0;
        for (size_t t = 0; t < ties_cap; t++) {
            win += dp[t] / double(t + 1);
        }
        total += p_a * win;
    }
    return std::min(1.0, total);
}

double plurality_probability_enumerated(size_t copies, std::span<const double> probs, size_t correct, TieRule rule) {
    check_distribution(probs, correct);
    size_t m = probs.size();
    std::vector<size_t> seq(copies, 0);
    double total = 0;
    for (;;) {
        std::vector<size_t> counts(m, 0);
        double p = 1;
        for (size_t s : seq) {
            counts[s]++;
            p *= probs[s];
        }
        size_t best = *std::max_element(counts.begin(), counts.end());
        size_t ties = static_cast<size_t>(std::count(counts.begin(), counts.end(), best));
        if (counts[correct] == best && best > 0) {
            if (ties == 1) {
                total += p;
            } else if (rule == TieRule::random) {
                total += p / double(ties);
            }
        }
        size_t i = 0;
        while (i < copies && ++seq[i] == m) {
            seq[i++] = 0;
        }
        if (i == copies) {
            break;
        }
    }
    return total;
}

std::vector<double> symmetric_probs(double p_correct, size_t outcomes) {
    if (outcomes < 2 || !(p_correct >= 0 && p_correct <= 1)) {
        throw Error(ErrorKind::invalid_argument, "need p_correct in [0,1] and at least two outcomes");
    }
    std::vector<double> probs(outcomes, (1 - p_correct) / double(outcomes - 1));
    probs[0] = p_correct;
    return probs;
}

double row_success(const RetrievalModel &model, size_t copies, size_t num_keys) {
    if (copies == 0 || num_keys == 0) {
        throw Error(ErrorKind::invalid_argument, "k and M must be positive");
    }
    check_distribution(model.probs, 0);
    double p = 1;
    for (size_t share : split_copies(copies, num_keys, model.split)) {
        if (share == 0) {
            return 0;
        }
        p *= std::pow(plurality_probability(share, model.probs, 0, model.tie), double(model.blocks));
    }
    return p;
}

const std::vector<TableRow> &example_reference_table() {
    static const std::vector<TableRow> rows = {
        {1, 1, 0.0000},  {11, 1, 0.0006}, {21, 1, 0.1724}, {31, 1, 0.6429}, {41, 1, 0.8927}, {51, 1, 0.9709},
        {61, 1, 0.9923}, {71, 1, 0.9980}, {1, 2, 0.0000},  {11, 2, 0.0000}, {21, 2, 0.0000}, {31, 2, 0.0005},
        {41, 2, 0.0236}, {51, 2, 0.1530}, {61, 2, 0.3882}, {71, 2, 0.6194},
    };
    return rows;
}

ExampleTableReport reproduce_example_table() {
    ExampleTableReport report;
    const std::pair<TieRule, SplitRule> combos[] = {
        {TieRule::strict, SplitRule::balanced},
        {TieRule::random, SplitRule::balanced},
        {TieRule::strict, SplitRule::ceiling},
        {TieRule::random, SplitRule::ceiling},
    };
    for (size_t m : {1, 2}) {
        std::vector<RuleResult> &column = m == 1 ? report.m1 : report.m2;
        int &choice = m == 1 ? report.m1_choice : report.m2_choice;
        for (auto [tie, split] : combos) {
            if (m == 1 && split == SplitRule::ceiling) {
                continue;  // identical to balanced for a single key
            }
            RetrievalModel model{symmetric_probs(kExampleProbability, 4), kExampleBlocks, split, tie};
            RuleResult r{tie, split, {}, 0, false};
            for (const TableRow &ref : example_reference_table()) {
                if (ref.num_keys != m) {
                    continue;
                }
                double p = row_success(model, ref.copies, m);
                r.rows.push_back({ref.copies, m, p});
                r.max_error = std::max(r.max_error, std::abs(p - ref.p));
            }
            r.matches = r.max_error <= kTableTolerance;
            if (r.matches && choice < 0) {
                choice = static_cast<int>(column.size());
            }
            column.push_back(std::move(r));
        }
    }
    return report;
}

double session_success(const EncodedDatabase &db, std::span<const std::string> keys, size_t copies, TieRule rule) {
    std::vector<std::string> sorted(keys.begin(), keys.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<size_t> shares = split_copies(copies, sorted.size());
    double p = 1;
    for (size_t i = 0; i < sorted.size(); i++) {
        size_t id = db.info.mub_id(sorted[i]);
        if (shares[i] == 0) {
            return 0;
        }
        for (const QracEncoding &block : db.blocks) {
            std::vector<double> dist = per_copy_distribution(block, id);
            // Renormalize away rounding so the distribution check holds exactly.
            double s = std::accumulate(dist.begin(), dist.end(), 0.0);
            for (double &d : dist) {
                d /= s;
            }
            size_t correct = bits_to_index(block.targets[id - 1].bits);
            p *= plurality_probability(shares[i], dist, correct, rule);
        }
    }
    return p;
}

MonteCarloReport monte_carlo_validate(const EncodedDatabase &db, std::span<const std::string> keys, size_t copies,
                                      size_t trials, uint64_t seed, TieRule rule) {
    if (trials == 0) {
        throw Error(ErrorKind::invalid_argument, "trials must be positive");
    }
    StateTable table = db.state_table();
    BobOptions options{std::vector<std::string>(keys.begin(), keys.end()), rule, false};
    Rng rng(seed);
    MonteCarloReport report;
    report.trials = trials;
    for (size_t t = 0; t < trials; t++) {
        SessionOutcome outcome = run_local_session(table, static_cast<uint32_t>(copies), options, rng);
        bool all = true;
        for (size_t i = 0; i < outcome.result.chosen_keys.size(); i++) {
            size_t row = db.info.mub_id(outcome.result.chosen_keys[i]) - 1;
            all = all && outcome.result.fragment_bits[i] == db.payloads[row];
        }
        report.successes += all;
    }
    report.empirical = double(report.successes) / double(trials);
    report.analytic = session_success(db, keys, copies, rule);
    double se = std::sqrt(report.analytic * (1 - report.analytic) / double(trials));
    double diff = report.empirical - report.analytic;
    if (se > 0) {
        report.z = diff / se;
    } else {
        report.z = std::abs(diff) < 1e-12 ? 0 : std::copysign(INFINITY, diff);
    }
    return report;
}

std::string format_table(std::span<const TableRow> rows) {
    std::ostringstream out;
    char line[64];
    std::snprintf(line, sizeof(line), "%6s %4s %8s\n", "k", "M", "p");
    out << line;
    for (const TableRow &r : rows) {
        std::snprintf(line, sizeof(line), "%6zu %4zu %8.4f\n", r.copies, r.num_keys, r.p);
        out << line;
    }
    return out.str();
}

std::string format_csv(std::span<const TableRow> rows) {
    std::ostringstream out;
    out << "k,M,p\n";
    char p[32];
    for (const TableRow &r : rows) {
        std::snprintf(p, sizeof(p), "%.10f", r.p);
        out << r.copies << ',' << r.num_keys << ',' << p << '\n';
    }
    return out.str();
}

}  // namespace qpdb
