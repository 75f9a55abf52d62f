#include "fighter/dp_solver.hpp"

#include <sstream>
#include <stdexcept>

namespace fighter {

void ValueTable::check_n(int n, int lo) const {
    if (n < lo || n > n_max_) {
        std::ostringstream os;
        os << "n = " << n << " outside [" << lo << ", " << n_max_ << "]";
        throw std::out_of_range(os.str());
    }
}

const PiecewiseExpPoly& ValueTable::value(int n) const {
    check_n(n, 0);
    return value_[static_cast<std::size_t>(n)];
}

const PiecewiseExpPoly& ValueTable::smoothed(int r) const {
    if (r < 0 || r >= n_max_) throw std::out_of_range("smoothed index out of range");
    return smoothed_[static_cast<std::size_t>(r)];
}

const PiecewiseExpPoly& ValueTable::candidate(int n, int j) const {
    check_n(n, 1);
    if (j < 1 || j > n) throw std::out_of_range("candidate j out of range");
    return candidates_[static_cast<std::size_t>(n)][static_cast<std::size_t>(j - 1)];
}

const PiecewisePolicy& ValueTable::policy(int n) const {
    check_n(n, 1);
    return policy_[static_cast<std::size_t>(n)];
}

int ValueTable::policy_at(int n, double t) const { return policy(n).at(t); }

double ValueTable::value_at(int n, double t) const { return value(n)(t); }

double ValueTable::d_star(int s, double t) const {
    if (s < 1 || s > n_max_ - 1) throw std::out_of_range("d_star: s outside [1, n_max-1]");
    return smoothed(s)(t) - smoothed(s - 1)(t);
}

ValueTable solve(const KillSequence& seq, int n_max, double t_max, const SolverOptions& opts) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be > 0");
    if (seq.j_max() < n_max) throw std::invalid_argument("kill sequence shorter than n_max");

    ValueTable table(seq, n_max, t_max, opts);
    const int max_degree = n_max + opts.degree_slack;
    const auto n_count = static_cast<std::size_t>(n_max) + 1;
    table.value_.reserve(n_count);
    table.smoothed_.reserve(n_count);
    table.candidates_.resize(n_count);
    table.policy_.resize(n_count);
    table.value_.push_back(PiecewiseExpPoly::constant(0.0, t_max));

    for (int n = 1; n <= n_max; ++n) {
        table.smoothed_.push_back(smooth(table.value_.back(), max_degree));
        auto& cands = table.candidates_[static_cast<std::size_t>(n)];
        std::vector<int> labels;
        for (int j = 1; j <= n; ++j) {
            cands.push_back(linear_combine(table.smoothed_[static_cast<std::size_t>(n - j)],
                                           seq.survival(j), seq.a(j)));
            labels.push_back(j);
        }
        auto env = upper_envelope(cands, labels, opts.envelope);
        if (env.value.max_jump() > opts.continuity_tol) {
            std::ostringstream os;
            os << "value function N(" << n << ",.) discontinuous: jump " << env.value.max_jump();
            throw std::runtime_error(os.str());
        }
        table.value_.push_back(std::move(env.value));
        table.policy_[static_cast<std::size_t>(n)] = std::move(env.policy);
    }
    return table;
}

std::vector<Threshold> thresholds(const ValueTable& table, int n) {
    if (table.sequence().u() != 1.0) {
        throw NotInvincible("thresholds are only defined for u = 1; use the policy breakpoints instead");
    }
    if (n < 1 || n > table.n_max()) throw std::out_of_range("thresholds: n out of range");
    const auto& env = table.options().envelope;
    const double step = env.scan_step > 0.0 ? env.scan_step : std::min(1e-3, table.t_max() / 1e4);
    std::vector<Threshold> out;
    for (int j = n - 1; j >= 1; --j) {
        // N_n(j+1,t) - N_n(j,t) starts at a(j+1) - a(j) > 0 and decreases through zero once.
        const auto gap = difference(table.candidate(n, j + 1), table.candidate(n, j));
        Threshold th{j, std::nullopt};
        for (std::size_t k = 0; k < gap.size() && !th.t; ++k) {
            const auto p = gap.piece(k);
            if (p.f(p.t_hi) > 0.0) continue;
            if (p.f(p.t_lo) <= 0.0) {
                th.t = p.t_lo;
                break;
            }
            th.t = find_root(p.f, p.t_lo, p.t_hi, env.root_tol, step);
        }
        out.push_back(th);
    }
    return out;
}

}  // namespace fighter
