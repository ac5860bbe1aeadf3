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
#include <sstream>

#include "gtest/gtest.h"

#include "qpdb/error.h"

using namespace qpdb;

namespace {

const EncodedDatabase &users_encoded() {
    static const EncodedDatabase db = [] {
        std::istringstream w("phone 30 int\nemail_name 91 ascii\n"
                             "domain 9 enum gmail.com yahoo.com outlook.com icloud.com aol.com\n");
        std::istringstream t("name,phone,email_name,domain\n"
                             "Anton Johnson,311234567,anton.johnson,gmail.com\n"
                             "Brian Smith,422345678,bsmith,yahoo.com\n"
                             "Cynthia Lee,513456789,cynthia.lee,outlook.com\n"
                             "Daniel Kim,644567890,dkim,icloud.com\n"
                             "Eva Martínez,345678901,eva.martinez,aol.com\n");
        return encode_database(parse_database(t, parse_widths(w)), 2);
    }();
    return db;
}

}  // namespace

TEST(plurality_probability, single_copy_is_p_correct) {
    std::vector<double> probs = symmetric_probs(0.5424, 4);
    EXPECT_NEAR(plurality_probability(1, probs), 0.5424, 1e-15);
    EXPECT_NEAR(plurality_probability(1, probs, 2), (1 - 0.5424) / 3, 1e-15);
}

TEST(plurality_probability, certain_outcome) {
    std::vector<double> probs = {1, 0, 0, 0};
    for (size_t c : {1, 2, 17, 80}) {
        EXPECT_DOUBLE_EQ(plurality_probability(c, probs), 1.0);
        EXPECT_DOUBLE_EQ(plurality_probability(c, probs, 1), 0.0);
    }
}

TEST(plurality_probability, matches_enumeration) {
    Rng rng(17);
    std::vector<std::vector<double>> dists = {symmetric_probs(0.5424, 4), {0.25, 0.25, 0.25, 0.25},
                                              {0.1, 0.6, 0.3}, {0.5, 0.5, 0, 0}};
    for (int i = 0; i < 4; i++) {
        std::vector<double> d(4);
        double s = 0;
        for (double &x : d) {
            x = uniform01(rng);
            s += x;
        }
        for (double &x : d) {
            x /= s;
        }
        dists.push_back(d);
    }
    for (const std::vector<double> &d : dists) {
        for (size_t c = 1; c <= 7; c++) {
            for (size_t correct = 0; correct < d.size(); correct++) {
                for (TieRule rule : {TieRule::strict, TieRule::random}) {
                    EXPECT_NEAR(plurality_probability(c, d, correct, rule),
                                plurality_probability_enumerated(c, d, correct, rule), 1e-12)
                        << "c=" << c << " correct=" << correct;
                }
            }
        }
    }
}

TEST(plurality_probability, random_ties_sum_to_one) {
    std::vector<double> d = {0.4, 0.3, 0.2, 0.1};
    for (size_t c : {1, 5, 12, 40}) {
        double total = 0;
        for (size_t i = 0; i < 4; i++) {
            total += plurality_probability(c, d, i, TieRule::random);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
    }
}

TEST(plurality_probability, monotone_in_odd_copies) {
    std::vector<double> probs = symmetric_probs(0.5424, 4);
    for (TieRule rule : {TieRule::strict, TieRule::random}) {
        double prev = 0;
        for (size_t c = 1; c <= 81; c += 2) {
            double q = plurality_probability(c, probs, 0, rule);
            EXPECT_GE(q, prev - 1e-15) << c;
            prev = q;
        }
    }
}

TEST(plurality_probability, rejects_bad_input) {
    std::vector<double> bad = {0.5, 0.6};
    EXPECT_THROW(plurality_probability(3, bad), Error);
    std::vector<double> ok = {0.5, 0.5};
    EXPECT_THROW(plurality_probability(0, ok), Error);
    EXPECT_THROW(plurality_probability(1, ok, 2), Error);
}

TEST(row_success, reference_points) {
    RetrievalModel model{symmetric_probs(0.5424, 4), 65, SplitRule::balanced, TieRule::random};
    EXPECT_NEAR(row_success(model, 41, 1), 0.8927, 2e-3);
    EXPECT_LT(row_success(model, 1, 1), 5e-5);
    EXPECT_NEAR(row_success(model, 41, 2), 0.0236, 2e-3);
    // q^65 at k=41 equals the row success.
    double q = plurality_probability(41, model.probs, 0, TieRule::random);
    EXPECT_NEAR(std::pow(q, 65), row_success(model, 41, 1), 1e-12);
    double prev = 0;
    for (size_t k = 1; k <= 71; k += 10) {
        double p = row_success(model, k, 1);
        EXPECT_GE(p, prev);
        prev = p;
    }
    EXPECT_EQ(row_success(model, 1, 2), 0.0);
}

TEST(reproduce_example_table, finds_matching_rules) {
    ExampleTableReport r = reproduce_example_table();
    ASSERT_GE(r.m1_choice, 0);
    ASSERT_GE(r.m2_choice, 0);
    EXPECT_EQ(r.m1[r.m1_choice].tie, TieRule::random);
    EXPECT_EQ(r.m2[r.m2_choice].tie, TieRule::random);
    EXPECT_EQ(r.m2[r.m2_choice].split, SplitRule::balanced);
    // Strict ties miss the M=1 column at k=41 by about 0.03.
    EXPECT_FALSE(r.m1[0].matches);
    const RuleResult &m1 = r.m1[r.m1_choice];
    EXPECT_NEAR(m1.rows[6].p, 0.9923, 2e-3);
    const RuleResult &m2 = r.m2[r.m2_choice];
    EXPECT_NEAR(m2.rows[7].p, 0.6194, 2e-3);
    EXPECT_LT(m2.rows[2].p, 5e-5);
}

TEST(format, table_and_csv) {
    std::vector<TableRow> rows = {{41, 1, 0.89271}};
    EXPECT_EQ(format_table(rows), "     k    M        p\n    41    1   0.8927\n");
    EXPECT_EQ(format_csv(rows), "k,M,p\n41,1,0.8927100000\n");
}

TEST(session_success, bracket_between_one_and_two_rows) {
    const EncodedDatabase &db = users_encoded();
    std::vector<std::string> one = {"Anton Johnson"};
    std::vector<std::string> two = {"Anton Johnson", "Brian Smith"};
    double p1 = session_success(db, one, 41, TieRule::strict);
    double p2 = session_success(db, two, 41, TieRule::strict);
    EXPECT_GT(p1, p2);
    EXPECT_GT(p1, 0);
    EXPECT_LT(p1, 1);
}

TEST(monte_carlo_validate, small_run_agrees) {
    const EncodedDatabase &db = users_encoded();
    std::vector<std::string> keys = {"Cynthia Lee"};
    MonteCarloReport r = monte_carlo_validate(db, keys, 21, 300, 2024);
    EXPECT_EQ(r.trials, 300u);
    EXPECT_LT(std::abs(r.z), 4.0) << r.empirical << " vs " << r.analytic;
    MonteCarloReport none = monte_carlo_validate(db, keys, 1, 200, 7);
    EXPECT_EQ(none.successes, 0u);
}
