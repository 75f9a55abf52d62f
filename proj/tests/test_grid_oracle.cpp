#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fighter/dp_solver.hpp"
#include "fighter/grid_oracle.hpp"
#include "oracles.hpp"

using namespace fighter;

namespace {

double max_diff(const ValueTable& t, const GridTable& g, int n) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.t.size(); ++i) m = std::max(m, std::abs(t.value_at(n, g.t[i]) - g.N[n][i]));
    return m;
}

// Node indices where K[n] changes.
std::vector<std::size_t> transitions(const GridTable& g, int n) {
    std::vector<std::size_t> out;
    for (std::size_t i = 1; i < g.t.size(); ++i) {
        if (g.K[n][i] != g.K[n][i - 1]) out.push_back(i);
    }
    return out;
}

}  // namespace

TEST(Grid, FrailTransitions) {
    const auto g = solve_grid(KillSequence::geometric(0.5, 5, 0.0), 5, 6.0, 1e-3);
    const auto tr = transitions(g, 5);
    ASSERT_EQ(tr.size(), 3u);
    const double want[3] = {oracle::kLog1514, oracle::kLog32, oracle::kFrailCrossing};
    for (int i = 0; i < 3; ++i) {
        EXPECT_LE(g.t[tr[i] - 1], want[i]);
        EXPECT_GE(g.t[tr[i]], want[i]);
    }
    EXPECT_EQ(g.K[5][tr[2]], 2);
}

TEST(Grid, SmoothedSingleMissile) {
    const auto g = solve_grid(KillSequence::geometric(0.5, 3, 0.4), 3, 6.0, 1e-3);
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        EXPECT_NEAR(g.N_star[1][i], 0.5 * (1.0 - std::exp(-g.t[i])), 1e-10);
        EXPECT_EQ(g.N_star[0][i], 0.0);
        EXPECT_EQ(g.N[1][i], 0.5);
    }
}

TEST(Grid, SingleLevel) {
    const auto g = solve_grid(KillSequence::geometric(0.6, 1, 0.2), 1, 2.0, 0.01);
    ASSERT_EQ(g.t.size(), 201u);
    for (double v : g.N[1]) EXPECT_DOUBLE_EQ(v, 0.4);
    for (int k : g.K[1]) EXPECT_EQ(k, 1);
}

TEST(Grid, RejectsCoarseStep) {
    const auto s = KillSequence::geometric(0.5, 3, 0.0);
    EXPECT_THROW(solve_grid(s, 3, 1.0, 0.02), std::invalid_argument);
    EXPECT_THROW(solve_grid(s, 3, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(solve_grid(s, 4, 1.0, 0.001), std::invalid_argument);
}

TEST(Grid, BoundaryAndMonotone) {
    const auto g = solve_grid(KillSequence::geometric(0.3, 4, 0.5), 4, 4.0, 1e-3);
    for (int n = 1; n <= 4; ++n) {
        for (std::size_t i = 1; i < g.t.size(); ++i) {
            EXPECT_GE(g.N[n][i], g.N[n][i - 1] - 1e-14);
            EXPECT_GE(g.N[n][i], 0.0);
        }
    }
}

class OracleAgreement : public ::testing::TestWithParam<std::pair<double, double>> {};

TEST_P(OracleAgreement, ValuesAndPolicies) {
    const auto [u, q] = GetParam();
    const auto seq = KillSequence::geometric(q, 5, u);
    const auto t = solve(seq, 5, 6.0);
    const auto g = solve_grid(seq, 5, 6.0, 1e-3);
    for (int n = 1; n <= 5; ++n) {
        EXPECT_LE(max_diff(t, g, n), 1e-6) << n;
        const auto bps = t.policy(n).breakpoints();
        for (std::size_t i = 0; i < g.t.size(); ++i) {
            if (g.K[n][i] == t.policy_at(n, g.t[i])) continue;
            const bool near = std::any_of(bps.begin(), bps.end(),
                                          [&](double b) { return std::abs(b - g.t[i]) <= g.h; });
            EXPECT_TRUE(near) << "n = " << n << ", t = " << g.t[i];
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Grid, OracleAgreement,
                         ::testing::Values(std::pair{0.0, 0.3}, std::pair{0.0, 0.5}, std::pair{0.0, 0.7},
                                           std::pair{0.5, 0.3}, std::pair{0.5, 0.5}, std::pair{0.5, 0.7},
                                           std::pair{1.0, 0.3}, std::pair{1.0, 0.5}, std::pair{1.0, 0.7}));

TEST(Grid, StepHalvingIsFourthOrder) {
    const auto seq = KillSequence::geometric(0.5, 5, 0.0);
    const auto t = solve(seq, 5, 6.0);
    const auto coarse = solve_grid(seq, 5, 6.0, 0.03);
    const auto fine = solve_grid(seq, 5, 6.0, 0.015);
    double e1 = 0.0, e2 = 0.0;
    for (int n = 1; n <= 5; ++n) {
        e1 = std::max(e1, max_diff(t, coarse, n));
        e2 = std::max(e2, max_diff(t, fine, n));
    }
    ASSERT_GT(e2, 0.0);
    EXPECT_GE(e1 / e2, 8.0);
}

TEST(Grid, CsvColumns) {
    const auto g = solve_grid(KillSequence::geometric(0.5, 2, 0.0), 2, 1.0, 0.01);
    std::ostringstream os;
    write_grid_csv(os, g);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,n,N,N_star,K");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 2 * 101);
}
