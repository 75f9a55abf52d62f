#include "fighter/grid_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace fighter {

namespace {

constexpr double kTie = 1e-12;
constexpr double kEventTol = 1e-13;

// Non-uniform node set: uniform nodes plus located switch times.
class NodeGrid {
public:
    NodeGrid(double h, std::size_t count) : h_(h) {
        x_.resize(count);
        uniform_.assign(count, true);
        for (std::size_t i = 0; i < count; ++i) x_[i] = static_cast<double>(i) * h;
    }

    std::size_t size() const { return x_.size(); }
    double x(std::size_t i) const { return x_[i]; }
    bool uniform(std::size_t i) const { return uniform_[i]; }
    const std::vector<double>& events() const { return events_; }

    // Step index i with x_i <= t < x_{i+1} (last step for t == x_back).
    std::size_t step_of(double t) const {
        auto it = std::upper_bound(x_.begin(), x_.end(), t);
        auto i = static_cast<std::size_t>(std::distance(x_.begin(), it));
        return std::min(i == 0 ? 0 : i - 1, x_.size() - 2);
    }

    // Lagrange interpolation of f at t using up to four nodes of the
    // event-free segment that contains the step [x_i, x_{i+1}].
    double interp(const std::vector<double>& f, std::size_t i, double t) const {
        // Segment bounds: nearest events at or outside the step, clamped to
        // the stencil reach.
        std::size_t lo = 0, hi = x_.size() - 1;
        auto e = std::upper_bound(events_.begin(), events_.end(), x_[i]);
        if (e != events_.begin()) lo = index_of(*std::prev(e));
        e = std::lower_bound(events_.begin(), events_.end(), x_[i + 1]);
        if (e != events_.end()) hi = index_of(*e);
        lo = std::max(lo, i >= 3 ? i - 3 : std::size_t{0});
        hi = std::min(hi, i + 4);

        std::size_t pick[4];
        std::size_t count = 0;
        std::size_t left = i + 1, right = i + 1;  // next candidates: left-1, right
        const double min_gap = 0.25 * h_;
        const auto too_close = [&](std::size_t k) {
            for (std::size_t c = 0; c < count; ++c) {
                if (std::abs(x_[pick[c]] - x_[k]) < min_gap) return true;
            }
            return false;
        };
        while (count < 4) {
            const bool can_left = left > lo;
            const bool can_right = right <= hi;
            if (!can_left && !can_right) break;
            std::size_t k;
            if (can_left && (!can_right || t - x_[left - 1] <= x_[right] - t)) {
                k = --left;
            } else {
                k = right++;
            }
            if (!too_close(k)) pick[count++] = k;
        }
        double sum = 0.0;
        for (std::size_t a = 0; a < count; ++a) {
            double w = 1.0;
            for (std::size_t b = 0; b < count; ++b) {
                if (a != b) w *= (t - x_[pick[b]]) / (x_[pick[a]] - x_[pick[b]]);
            }
            sum += w * f[pick[a]];
        }
        return sum;
    }

    // Inserts t as an event node; each array gets its interpolated value.
    void insert_event(double t, std::vector<std::vector<double>*> arrays) {
        const std::size_t i = step_of(t);
        std::vector<double> vals;
        for (auto* a : arrays) vals.push_back(interp(*a, i, t));
        const auto pos = static_cast<std::ptrdiff_t>(i + 1);
        x_.insert(x_.begin() + pos, t);
        uniform_.insert(uniform_.begin() + pos, false);
        for (std::size_t k = 0; k < arrays.size(); ++k) arrays[k]->insert(arrays[k]->begin() + pos, vals[k]);
        events_.insert(std::upper_bound(events_.begin(), events_.end(), t), t);
    }

private:
    std::size_t index_of(double t) const {
        return static_cast<std::size_t>(std::distance(x_.begin(), std::lower_bound(x_.begin(), x_.end(), t)));
    }

    double h_;
    std::vector<double> x_;
    std::vector<bool> uniform_;
    std::vector<double> events_;
};

struct Level {
    const KillSequence& seq;
    int n;
    // Candidate values a(j) + c(j) N*(n-j) from smoothed values s_{n-j}.
    template <class Smoothed>
    int argmax(Smoothed&& s, double* best_out) const {
        double best = -INFINITY;
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int j = 1; j <= n; ++j) {
            v[j - 1] = seq.a(j) + seq.survival(j) * s(n - j);
            best = std::max(best, v[j - 1]);
        }
        if (best_out) *best_out = best;
        for (int j = 1; j <= n; ++j) {
            if (v[j - 1] >= best - kTie) return j;
        }
        return n;
    }
};

}  // namespace

GridTable solve_grid(const KillSequence& seq, int n_max, double t_max, double h) {
    if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
    if (seq.j_max() < n_max) throw std::invalid_argument("kill sequence shorter than n_max");
    if (!(h > 0.0) || !(t_max > 0.0) || h > t_max / 100.0) {
        throw std::invalid_argument("grid step must satisfy 0 < h <= t_max/100");
    }
    const auto steps = static_cast<std::size_t>(std::llround(t_max / h));
    NodeGrid grid(h, steps + 1);

    // S[r] = N*(r,.) at all nodes, r = 0..n_max-1.
    std::vector<std::vector<double>> S(static_cast<std::size_t>(n_max));
    S[0].assign(grid.size(), 0.0);
    std::vector<double> switches;

    const auto owned = [&](int upto) {
        std::vector<std::vector<double>*> out;
        for (int r = 0; r <= upto; ++r) out.push_back(&S[static_cast<std::size_t>(r)]);
        return out;
    };

    for (int n = 1; n <= n_max; ++n) {
        const Level level{seq, n};
        const auto at_node = [&](std::size_t i) {
            return [&, i](int r) { return S[static_cast<std::size_t>(r)][i]; };
        };
        const auto off_node = [&](std::size_t step, double t) {
            return [&, step, t](int r) { return grid.interp(S[static_cast<std::size_t>(r)], step, t); };
        };

        // Locate switch times of N(n,.) between consecutive nodes.
        std::vector<double> found;
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            int w = level.argmax(at_node(i), nullptr);
            const int w_end = level.argmax(at_node(i + 1), nullptr);
            double lo = grid.x(i);
            const double hi = grid.x(i + 1);
            for (int guard = 0; w != w_end && guard < 2 * n; ++guard) {
                const auto differs = [&](double t) { return level.argmax(off_node(i, t), nullptr) != w; };
                double a = lo, b = hi;
                while (b - a > kEventTol) {
                    const double m = 0.5 * (a + b);
                    if (m <= a || m >= b) break;
                    if (differs(m)) b = m; else a = m;
                }
                if (b > grid.x(i) + kEventTol && b < hi - kEventTol) found.push_back(b);
                int next = level.argmax(off_node(i, b), nullptr);
                if (next == w) next = w_end;
                w = next;
                lo = b;
            }
        }
        for (double e : found) {
            grid.insert_event(e, owned(n - 1));
            switches.push_back(e);
        }
        if (n == n_max) break;

        // N(n,.) on the (possibly extended) nodes, then RK4 for N*(n,.).
        std::vector<double> Nn(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) level.argmax(at_node(i), &Nn[i]);
        auto& Sn = S[static_cast<std::size_t>(n)];
        Sn.assign(grid.size(), 0.0);
        for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
            const double x0 = grid.x(i);
            const double dt = grid.x(i + 1) - x0;
            double n_mid = 0.0;
            level.argmax(off_node(i, x0 + 0.5 * dt), &n_mid);
            const double y = Sn[i];
            const double k1 = Nn[i] - y;
            const double k2 = n_mid - (y + 0.5 * dt * k1);
            const double k3 = n_mid - (y + 0.5 * dt * k2);
            const double k4 = Nn[i + 1] - (y + dt * k3);
            Sn[i + 1] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }

    GridTable out;
    out.h = h;
    out.t_max = t_max;
    out.n_max = n_max;
    std::sort(switches.begin(), switches.end());
    out.switch_times = switches;
    out.N.assign(static_cast<std::size_t>(n_max) + 1, {});
    out.N_star.assign(static_cast<std::size_t>(n_max), {});
    out.K.assign(static_cast<std::size_t>(n_max) + 1, {});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!grid.uniform(i)) continue;
        out.t.push_back(grid.x(i));
        out.N[0].push_back(0.0);
        for (int r = 0; r < n_max; ++r) out.N_star[static_cast<std::size_t>(r)].push_back(S[static_cast<std::size_t>(r)][i]);
        for (int n = 1; n <= n_max; ++n) {
            const Level level{seq, n};
            double v = 0.0;
            const int k = level.argmax([&](int r) { return S[static_cast<std::size_t>(r)][i]; }, &v);
            out.N[static_cast<std::size_t>(n)].push_back(v);
            out.K[static_cast<std::size_t>(n)].push_back(k);
        }
    }
    return out;
}

void write_grid_csv(std::ostream& os, const GridTable& g) {
    os << "t,n,N,N_star,K\n";
    const auto old = os.precision(17);
    for (std::size_t i = 0; i < g.t.size(); ++i) {
        for (int n = 1; n <= g.n_max; ++n) {
            const auto un = static_cast<std::size_t>(n);
            os << g.t[i] << ',' << n << ',' << g.N[un][i] << ',';
            if (n < g.n_max) os << g.N_star[un][i];
            os << ',' << g.K[un][i] << '\n';
        }
    }
    os.precision(old);
}

}  // namespace fighter
