// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "fighter/audit.hpp"
#include "fighter/dp_solver.hpp"
#include "fighter/grid_oracle.hpp"
#include "fighter/simulator.hpp"
#include "oracles.hpp"

using namespace fighter;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const std::string& name, double time_limit, const std::function<void(Outcome&)>& body) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (time_limit > 0.0) {
        o.detail << "; " << secs << " s (limit " << time_limit << " s)";
        o.require(secs < time_limit, "runtime");
    } else {
        o.detail << "; " << secs << " s";
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ":" << o.detail.str() << std::endl;
}

ValueTable frail_table() { return solve(KillSequence::geometric(0.5, 5, 0.0), 5, 6.0); }

double max_oracle_diff(const ValueTable& t, const GridTable& g) {
    double m = 0.0;
    for (int n = 1; n <= t.n_max(); ++n) {
        for (std::size_t i = 0; i < g.t.size(); ++i) {
            m = std::max(m, std::abs(t.value_at(n, g.t[i]) - g.N[static_cast<std::size_t>(n)][i]));
        }
    }
    return m;
}

}  // namespace

int main() {
    std::cout.precision(6);

    criterion(1, "counterexample thresholds (q=1/2, u=0)", 1.0, [](Outcome& o) {
        const auto t = frail_table();
        const auto b3 = t.policy(3).breakpoints();
        const auto b4 = t.policy(4).breakpoints();
        const auto b5 = t.policy(5).breakpoints();
        o.require(b3.size() == 1 && b4.size() == 1 && b5.size() == 3, "switch counts 1/1/3");
        if (!o.pass) return;
        const double d = std::max({std::abs(b3[0] - oracle::kLog32), std::abs(b4[0] - oracle::kLog76),
                                   std::abs(b5[0] - oracle::kLog1514), std::abs(b5[1] - oracle::kLog32)});
        const double last = std::abs(b5[2] - 2.694);
        const auto again = frail_table().policy(5).breakpoints();
        double drift = 0.0;
        for (std::size_t i = 0; i < b5.size(); ++i) drift = std::max(drift, std::abs(again[i] - b5[i]));
        o.detail << " max |t - log(.)| = " << d << " (tol 1e-6); last switch " << std::setprecision(10) << b5[2]
                 << std::setprecision(6) << ", |t - 2.694| = " << last << " (tol 1e-3); rerun drift " << drift
                 << " (tol 1e-8)";
        o.require(d <= 1e-6, "log thresholds");
        o.require(last <= 1e-3, "2.694 threshold");
        o.require(drift <= 1e-8, "reproducibility");
    });

    criterion(2, "[B] violation witness at t = 3", 1.0, [](Outcome& o) {
        const auto t = frail_table();
        const int k4 = t.policy_at(4, 3.0), k5 = t.policy_at(5, 3.0);
        o.detail << " K(4,3) = " << k4 << " (want 3), K(5,3) = " << k5 << " (want 2)";
        o.require(k4 == 3 && k5 == 2, "witness");
    });

    criterion(3, "crossing-equation candidates, coefficient-wise", 0.0, [](Outcome& o) {
        const auto t = frail_table();
        const double l = oracle::kLog32;
        // (3/4)[17/8 - e^{-t}(5/4 + (3/8)(t - l))] and (7/8)[1 + (3/4)(1 - e^{-t})], expanded.
        const ExpPoly want2(0.75 * 17.0 / 8.0, {-0.75 * (1.25 - 0.375 * l), -0.75 * 0.375});
        const ExpPoly want3(0.875 * 1.75, {-0.875 * 0.75});
        double worst = 0.0;
        int pieces = 0;
        const auto compare = [&](const PiecewiseExpPoly& f, const ExpPoly& w) {
            for (std::size_t k = 0; k < f.size(); ++k) {
                const auto p = f.piece(k);
                // Any piece reaching past log(3/2) must carry the closed form there.
                if (p.t_hi <= l + 1e-9) continue;
                ++pieces;
                o.require(p.f.coeffs().size() == w.coeffs().size(), "degree");
                worst = std::max(worst, std::abs(p.f.alpha() - w.alpha()));
                for (std::size_t m = 0; m < std::min(p.f.coeffs().size(), w.coeffs().size()); ++m) {
                    worst = std::max(worst, std::abs(p.f.coeffs()[m] - w.coeffs()[m]));
                }
            }
        };
        compare(t.candidate(5, 2), want2);
        compare(t.candidate(5, 3), want3);
        o.detail << " " << pieces << " pieces reaching t >= log(3/2), max coefficient error " << worst << " (tol 1e-12)";
        o.require(pieces >= 2, "pieces found");
        o.require(worst <= 1e-12, "coefficients");
    });

    criterion(4, "[C] for u in {0,.25,.5,.75,1} x q in {.3,.5,.7}, n_max=6, t_max=20", 30.0, [](Outcome& o) {
        std::size_t witnesses = 0;
        int tables = 0;
        for (double u : {0.0, 0.25, 0.5, 0.75, 1.0}) {
            for (double q : {0.3, 0.5, 0.7}) {
                witnesses += audit_C(solve(KillSequence::geometric(q, 6, u), 6, 20.0)).witnesses.size();
                ++tables;
            }
        }
        o.detail << " " << tables << " tables, " << witnesses << " witnesses";
        o.require(witnesses == 0, "witnesses");
    });

    criterion(5, "[A] and [B] for u=1, q in {.3,.5,.7}, n_max=6, t_max=20", 0.0, [](Outcome& o) {
        std::size_t wa = 0, wb = 0;
        for (double q : {0.3, 0.5, 0.7}) {
            const auto t = solve(KillSequence::geometric(q, 6, 1.0), 6, 20.0);
            wa += audit_A(t).witnesses.size();
            wb += audit_B(t).witnesses.size();
        }
        o.detail << " [A] witnesses " << wa << ", [B] witnesses " << wb;
        o.require(wa == 0 && wb == 0, "witnesses");
    });

    criterion(6, "u=1 range and strict interlacing, n <= 6, t_max=20", 0.0, [](Outcome& o) {
        std::size_t wr = 0, wi = 0;
        double slack = 1e300;
        for (double q : {0.3, 0.5, 0.7}) {
            const auto t = solve(KillSequence::geometric(q, 6, 1.0), 6, 20.0);
            const auto r = audit_range_and_interlace(t, 1e-9);
            wr += r.range.witnesses.size();
            wi += r.interlace.witnesses.size();
            for (int n = 1; n < 6; ++n) {
                const auto th = thresholds(t, n);
                const auto next = thresholds(t, n + 1);
                for (int j = 0; j < n; ++j) {
                    const double lo = j + 1 <= n - 1 ? *th[static_cast<std::size_t>(n - 1 - (j + 1))].t : 0.0;
                    const double mid = *next[static_cast<std::size_t>(n - (j + 1))].t;
                    const double hi = j >= 1 ? *th[static_cast<std::size_t>(n - 1 - j)].t : 1e300;
                    slack = std::min({slack, mid - lo, hi - mid});
                }
            }
        }
        o.detail << " q in {.3,.5,.7}: range witnesses " << wr << ", interlace witnesses " << wi
                 << ", smallest gap " << slack << " (need > 1e-9)";
        o.require(wr == 0 && wi == 0, "witnesses");
        o.require(slack > 1e-9, "margin");
    });

    criterion(7, "limits at t=50 (u=1, q=1/2, s <= 5)", 0.0, [](Outcome& o) {
        const auto t = solve(KillSequence::geometric(0.5, 6, 1.0), 6, 50.0);
        double dd = 0.0, dn = 0.0;
        for (int s = 1; s <= 5; ++s) {
            dd = std::max(dd, std::abs(t.d_star(s, 50.0) - 0.5));
            dn = std::max(dn, std::abs(t.smoothed(s)(50.0) - s * 0.5));
        }
        const auto r = audit_limits(t);
        o.detail << " max |D*(s,50) - a(1)| = " << dd << ", max |N*(s,50) - s a(1)| = " << dn
                 << " (tol 1e-6); audit " << to_string(r.verdict);
        o.require(dd <= 1e-6 && dn <= 1e-6, "limits");
        o.require(r.holds(), "audit");
    });

    criterion(8, "frail regime around q = (1/2)^{1/(n-1)}, n in {2,3}, t in [0,50]", 0.0, [](Outcome& o) {
        for (int n : {2, 3}) {
            const double thr = std::pow(0.5, 1.0 / (n - 1));
            std::vector<ValueTable> tables;
            tables.push_back(solve(KillSequence::geometric(thr + 0.05, n, 0.0), n, 50.0));
            tables.push_back(solve(KillSequence::geometric(thr - 0.05, n, 0.0), n, 50.0));
            const auto& above = tables[0].policy(n).intervals();
            const auto& below = tables[1].policy(n).intervals();
            const bool always_n = above.size() == 1 && above[0].k == n;
            const bool switches = below.size() > 1;
            o.detail << " n=" << n << ": q=" << thr + 0.05 << " keeps K=" << n << " " << (always_n ? "yes" : "no")
                     << ", q=" << thr - 0.05 << " switches " << (switches ? "yes" : "no") << ";";
            o.require(always_n && switches, "regime for n = " + std::to_string(n));
            o.require(audit_remark_regime(tables, n).holds(), "audit for n = " + std::to_string(n));
        }
    });

    criterion(9, "grid oracle agreement and step halving", 60.0, [](Outcome& o) {
        double worst = 0.0, worst_half = 0.0, min_ratio = 1e300;
        for (double u : {0.0, 0.5, 1.0}) {
            for (double q : {0.3, 0.5, 0.7}) {
                const auto seq = KillSequence::geometric(q, 5, u);
                const auto t = solve(seq, 5, 6.0);
                worst = std::max(worst, max_oracle_diff(t, solve_grid(seq, 5, 6.0, 1e-3)));
                worst_half = std::max(worst_half, max_oracle_diff(t, solve_grid(seq, 5, 6.0, 5e-4)));
                const double e1 = max_oracle_diff(t, solve_grid(seq, 5, 6.0, 0.03));
                const double e2 = max_oracle_diff(t, solve_grid(seq, 5, 6.0, 0.015));
                min_ratio = std::min(min_ratio, e1 / e2);
            }
        }
        o.detail << " max |dN| at h=1e-3: " << worst << ", at h=5e-4: " << worst_half
                 << " (tol 1e-6); smallest error ratio h=0.03 -> 0.015: " << min_ratio << " (need >= 8)";
        o.require(worst <= 1e-6 && worst_half <= 1e-6, "agreement");
        o.require(min_ratio >= 8.0, "halving ratio");
    });

    criterion(10, "Monte Carlo vs exact, n=5, t=3, 10^6 reps", 60.0, [](Outcome& o) {
        const auto seq = KillSequence::geometric(0.5, 5, 0.0);
        const auto t = frail_table();
        const double exact = t.value_at(5, 3.0);
        for (std::uint64_t seed : {20240601ULL, 777ULL}) {
            const auto e = simulate(seq, 5, 3.0, optimal_policy(t), 1000000, seed);
            const double z = std::abs(e.mean_kills - exact) / e.std_error;
            o.detail << " seed " << seed << ": mean " << e.mean_kills << " vs " << exact << ", " << z
                     << " standard errors (limit 3);";
            if (z <= 3.0) return;
        }
        o.require(false, "both seeds");
    });

    criterion(11, "property-based suite", 0.0, [](Outcome& o) {
        const std::string cmd = std::string("\"") + PROPERTY_SUITE + "\" --gtest_brief=1 > /dev/null 2>&1";
        const int rc = std::system(cmd.c_str());
        o.detail << " " << PROPERTY_SUITE << " exit status " << rc;
        o.require(rc == 0, "suite");
    });

    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
