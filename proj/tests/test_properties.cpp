// Randomized invariants. Every generator is seeded, so failures replay exactly;
// the failing case index is printed with each assertion.
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "fighter/dp_solver.hpp"

using namespace fighter;

namespace {

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

    // Strictly increasing, strictly concave, inside [0,1].
    std::vector<double> concave_sequence(int j_max) {
        std::vector<double> inc(static_cast<std::size_t>(j_max));
        double d = uniform(0.05, 1.0 / j_max);
        for (auto& x : inc) {
            x = d;
            d *= uniform(0.3, 0.95);
        }
        std::vector<double> a{0.0};
        for (double x : inc) a.push_back(a.back() + x);
        return a;
    }

    ExpPoly exp_poly(int max_degree, double scale) {
        std::vector<double> c(static_cast<std::size_t>(integer(0, max_degree) + 1));
        for (auto& x : c) x = uniform(-scale, scale);
        return ExpPoly(uniform(-scale, scale), std::move(c));
    }

    PiecewiseExpPoly piecewise(double t_max, int max_pieces, int max_degree, double scale) {
        const int k = integer(1, max_pieces);
        std::vector<double> b{0.0};
        for (int i = 1; i < k; ++i) b.push_back(uniform(0.0, t_max));
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        b.push_back(t_max);
        std::vector<ExpPoly> pieces;
        for (std::size_t i = 0; i + 1 < b.size(); ++i) pieces.push_back(exp_poly(max_degree, scale));
        return PiecewiseExpPoly(b, pieces);
    }

private:
    std::mt19937_64 rng_;
};

bool near_break(const PiecewiseExpPoly& f, double t, double eps) {
    for (double b : f.breakpoints()) {
        if (std::abs(b - t) < eps) return true;
    }
    return false;
}

}  // namespace

TEST(KillSequenceProperties, GeneratedSequencesValidate) {
    Gen g(1);
    for (int c = 0; c < 500; ++c) {
        const int j_max = g.integer(1, 12);
        const auto a = g.concave_sequence(j_max);
        const auto s = KillSequence::validate(a, g.uniform(0.0, 1.0));
        ASSERT_EQ(s.values(), a) << c;
        for (int j = 0; j < j_max; ++j) ASSERT_GT(s.a(j + 1), s.a(j)) << c;
    }
}

TEST(KillSequenceProperties, BrokenSequencesNameTheFirstOffender) {
    Gen g(2);
    for (int c = 0; c < 500; ++c) {
        const int j_max = g.integer(3, 10);
        auto a = g.concave_sequence(j_max);
        const int j = g.integer(1, j_max - 1);
        // Make the increment into j+1 at least as large as the one into j.
        const double grow = (a[j] - a[j - 1]) * g.uniform(1.0, 1.2);
        const double shift = a[j] + grow - a[j + 1];
        for (std::size_t i = static_cast<std::size_t>(j) + 1; i < a.size(); ++i) a[i] += shift;
        try {
            KillSequence::validate(a, 0.5);
            ADD_FAILURE() << "case " << c << " accepted";
        } catch (const InvalidSequence& e) {
            EXPECT_EQ(e.kind(), InvalidSequence::Kind::NotConcave) << c;
            EXPECT_EQ(e.index(), static_cast<std::size_t>(j - 1)) << c;
        }
    }
}

TEST(KillSequenceProperties, VMonotoneOverGrid) {
    for (int qi = 1; qi <= 9; ++qi) {
        for (int ui = 0; ui <= 10; ++ui) {
            const double q = qi / 10.0, u = ui / 10.0;
            const auto s = KillSequence::geometric(q, 10, u);
            for (int j = 1; j + 1 <= 9; ++j) {
                EXPECT_LE(s.v(j), s.v(j + 1) + 1e-15) << q << " " << u << " " << j;
            }
            for (int j = 1; j <= 9; ++j) {
                EXPECT_LE(s.v(j), 1e-15) << q << " " << u << " " << j;
                if (u > 0.0) {
                    EXPECT_LT(s.v(j), 0.0) << q << " " << u << " " << j;
                }
            }
        }
    }
}

TEST(KillSequenceProperties, VMonotoneForCustomSequences) {
    Gen g(3);
    for (int c = 0; c < 300; ++c) {
        const double u = c % 5 == 0 ? 0.0 : g.uniform(0.0, 1.0);
        const auto s = KillSequence::validate(g.concave_sequence(g.integer(3, 10)), u);
        for (int j = 1; j + 1 < s.j_max(); ++j) EXPECT_LE(s.v(j), s.v(j + 1) + 1e-15) << c;
        for (int j = 1; j < s.j_max(); ++j) {
            EXPECT_LE(s.v(j), 1e-15) << c;
            if (u > 0.0) {
                EXPECT_LT(s.v(j), 0.0) << c;
            }
        }
    }
}

TEST(KillSequenceProperties, SurvivalShape) {
    Gen g(4);
    for (int c = 0; c < 300; ++c) {
        const double u = c % 3 == 0 ? 0.0 : g.uniform(0.0, 1.0);
        const auto s = KillSequence::validate(g.concave_sequence(g.integer(2, 10)), u);
        for (int j = 1; j <= s.j_max(); ++j) {
            if (j > 1) {
                EXPECT_GE(s.survival(j), s.survival(j - 1)) << c;
            }
            const bool equal = s.survival(j) == s.a(j);
            EXPECT_EQ(equal, u == 0.0 || s.a(j) == 1.0) << c << " j = " << j;
        }
    }
}

TEST(SmoothProperties, StartsAtZero) {
    Gen g(5);
    for (int c = 0; c < 300; ++c) {
        const auto f = g.piecewise(g.uniform(0.5, 10.0), 4, 4, 2.0);
        EXPECT_NEAR(smooth(f, 12)(0.0), 0.0, 1e-15) << c;
    }
}

TEST(SmoothProperties, DerivativeIdentity) {
    Gen g(6);
    constexpr double h = 1e-6;
    for (int c = 0; c < 200; ++c) {
        const double t_max = g.uniform(1.0, 10.0);
        const auto f = g.piecewise(t_max, 4, 3, 1.0);
        const auto s = smooth(f, 12);
        for (int i = 0; i < 20; ++i) {
            const double t = g.uniform(2 * h, t_max - 2 * h);
            if (near_break(f, t, 1e-5)) continue;
            const double fd = (s(t + h) - s(t - h)) / (2 * h);
            const double rhs = f(t) - s(t);
            EXPECT_LE(std::abs(fd - rhs), 1e-5 * std::max(std::abs(rhs), 1e-3)) << c << " t = " << t;
        }
    }
}

TEST(SmoothProperties, BoundedByRunningSup) {
    Gen g(7);
    for (int c = 0; c < 200; ++c) {
        const double t_max = g.uniform(1.0, 10.0);
        std::vector<double> b{0.0, g.uniform(0.1, t_max - 0.1), t_max};
        std::vector<ExpPoly> pieces;
        for (int k = 0; k < 2; ++k) {
            // alpha >= sum |beta_m| max_t t^m e^{-t} keeps the piece non-negative.
            auto p = g.exp_poly(3, 1.0);
            double floor = 0.0;
            for (std::size_t m = 0; m < p.coeffs().size(); ++m) {
                floor += std::abs(p.coeffs()[m]) * (m == 0 ? 1.0 : std::pow(m / M_E, static_cast<double>(m)));
            }
            pieces.emplace_back(floor + g.uniform(0.0, 0.5), p.coeffs());
        }
        const PiecewiseExpPoly f(b, pieces);
        const auto s = smooth(f, 8);
        double sup = 0.0;
        for (double t = 0.0; t <= t_max; t += 1e-3) {
            sup = std::max(sup, f(t));
            ASSERT_GE(f(t), 0.0) << c;
            EXPECT_GE(s(t), -1e-15) << c;
            EXPECT_LE(s(t), sup + 1e-6) << c << " t = " << t;
        }
    }
}

TEST(EnvelopeProperties, Dominance) {
    Gen g(8);
    for (int c = 0; c < 150; ++c) {
        const double t_max = g.uniform(1.0, 8.0);
        const int k = g.integer(1, 5);
        std::vector<PiecewiseExpPoly> fs;
        std::vector<int> labels;
        for (int i = 0; i < k; ++i) {
            fs.push_back(g.piecewise(t_max, 3, 2, 1.0));
            labels.push_back(i + 1);
        }
        const auto e = upper_envelope(fs, labels);
        for (double t = 0.0; t <= t_max; t += t_max / 997.0) {
            double best = -1e300;
            for (const auto& f : fs) {
                best = std::max(best, f(t));
                EXPECT_GE(e.value(t), f(t) - 1e-9) << c << " t = " << t;
            }
            // The chosen label's function matches the envelope; near a switch the
            // root bracket allows a slightly smaller value.
            const int lab = e.policy.at(t);
            EXPECT_NEAR(e.value(t), fs[static_cast<std::size_t>(lab - 1)](t), 1e-12) << c << " t = " << t;
            EXPECT_NEAR(e.value(t), best, 1e-8) << c << " t = " << t;
        }
    }
}

TEST(SolverProperties, RecursionIdentity) {
    Gen g(9);
    for (int c = 0; c < 40; ++c) {
        const double u = c % 4 == 0 ? 0.0 : (c % 4 == 1 ? 1.0 : g.uniform(0.0, 1.0));
        const int n_max = g.integer(2, 6);
        const auto seq = c % 2 ? KillSequence::geometric(g.uniform(0.1, 0.9), n_max, u)
                               : KillSequence::validate(g.concave_sequence(n_max), u);
        const double t_max = g.uniform(1.0, 12.0);
        const auto t = solve(seq, n_max, t_max);
        for (int i = 0; i < 50; ++i) {
            const double x = g.uniform(0.0, t_max);
            for (int n = 1; n < n_max; ++n) {
                for (int j = 1; j <= n; ++j) {
                    const double cj = seq.survival(j);
                    if (cj <= 0.0) continue;
                    const double want = seq.survival(j + 1) / cj * (t.candidate(n, j)(x) - seq.a(j)) + seq.a(j + 1);
                    const double got = t.candidate(n + 1, j + 1)(x);
                    EXPECT_LE(std::abs(got - want), 1e-9 * std::max(1.0, std::abs(want)))
                        << c << " n = " << n << " j = " << j << " t = " << x;
                }
            }
        }
    }
}

TEST(SolverProperties, ValueGrowsWithTimeAndMissiles) {
    Gen g(10);
    for (int c = 0; c < 40; ++c) {
        const int n_max = g.integer(2, 6);
        const auto seq = KillSequence::validate(g.concave_sequence(n_max), g.uniform(0.0, 1.0));
        const double t_max = g.uniform(1.0, 12.0);
        const auto t = solve(seq, n_max, t_max);
        for (int n = 1; n <= n_max; ++n) {
            double prev = 0.0;
            for (double x = 0.0; x <= t_max; x += t_max / 200.0) {
                const double v = t.value_at(n, x);
                EXPECT_GE(v, prev - 1e-13) << c;
                EXPECT_GE(v, t.value_at(n - 1, x) - 1e-13) << c;
                EXPECT_LE(v, n + 1e-12) << c;
                prev = v;
            }
        }
    }
}
