#pragma once

#include <optional>
#include <vector>

#include "fighter/envelope.hpp"
#include "fighter/exppoly.hpp"
#include "fighter/kill_sequence.hpp"

namespace fighter {

struct SolverOptions {
    EnvelopeOptions envelope;
    // Polynomial degree cap is n_max + degree_slack.
    int degree_slack = 4;
    double continuity_tol = 1e-9;
};

// Exact value and policy tables for the Fighter recursion
//   N_n(j,t) = a(j) + c(j) N*(n-j,t),  N(n,t) = max_j N_n(j,t),
//   N*(r,t)  = e^{-t} \int_0^t N(r,x) e^x dx,
// with K(n,t) the smallest maximizing j.
class ValueTable {
public:
    const KillSequence& sequence() const noexcept { return seq_; }
    int n_max() const noexcept { return n_max_; }
    double t_max() const noexcept { return t_max_; }
    const SolverOptions& options() const noexcept { return opts_; }

    // N(n,.) for n = 0..n_max.
    const PiecewiseExpPoly& value(int n) const;
    // N*(r,.) for r = 0..n_max-1.
    const PiecewiseExpPoly& smoothed(int r) const;
    // N_n(j,.) for 1 <= j <= n <= n_max.
    const PiecewiseExpPoly& candidate(int n, int j) const;
    // K(n,.) for n = 1..n_max.
    const PiecewisePolicy& policy(int n) const;

    int policy_at(int n, double t) const;
    double value_at(int n, double t) const;

    // D*(s,t) = N*(s,t) - N*(s-1,t), 1 <= s <= n_max-1.
    double d_star(int s, double t) const;

    friend ValueTable solve(const KillSequence&, int, double, const SolverOptions&);

private:
    ValueTable(KillSequence seq, int n_max, double t_max, SolverOptions opts)
        : seq_(std::move(seq)), n_max_(n_max), t_max_(t_max), opts_(opts) {}

    void check_n(int n, int lo) const;

    KillSequence seq_;
    int n_max_;
    double t_max_;
    SolverOptions opts_;
    std::vector<PiecewiseExpPoly> value_;
    std::vector<PiecewiseExpPoly> smoothed_;
    std::vector<std::vector<PiecewiseExpPoly>> candidates_;  // [n][j-1]
    std::vector<PiecewisePolicy> policy_;                    // [n], entry 0 unused
};

ValueTable solve(const KillSequence& seq, int n_max, double t_max, const SolverOptions& opts = {});

struct Threshold {
    int j = 0;
    // nullopt when the switch from j+1 to j happens after t_max.
    std::optional<double> t;
};

class NotInvincible : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Switch times t(n,j), j = n-1 down to 1, where N_n(j+1,.) and N_n(j,.) cross.
// Only defined for u = 1, where each crossing is unique.
std::vector<Threshold> thresholds(const ValueTable& table, int n);

}  // namespace fighter
