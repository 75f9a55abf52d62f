#include "fighter/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace fighter {

std::uint64_t SplitMix64::next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

SplitMix64 SplitMix64::for_replication(std::uint64_t seed, std::uint64_t rep) {
    SplitMix64 mix(seed ^ (rep * 0xd1b54a32d192ed03ULL));
    return SplitMix64(mix.next());
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double SplitMix64::exponential() { return -std::log1p(-uniform()); }

Policy optimal_policy(const ValueTable& table) {
    return [&table](int n, double t) { return table.policy_at(n, t); };
}

Policy constant_policy(int k) {
    if (k < 1) throw PolicyError("constant policy needs k >= 1");
    return [k](int n, double) { return std::min(k, n); };
}

Policy all_in_policy() {
    return [](int n, double) { return n; };
}

Policy tabulated_policy(std::vector<PiecewisePolicy> per_n) {
    if (per_n.empty()) throw PolicyError("tabulated policy is empty");
    return [tab = std::move(per_n)](int n, double t) {
        if (n < 1 || n > static_cast<int>(tab.size())) {
            throw PolicyError("tabulated policy has no entry for n = " + std::to_string(n));
        }
        const auto& p = tab[static_cast<std::size_t>(n - 1)];
        return p.at(std::min(t, p.t_max()));
    };
}

namespace {

struct Sums {
    std::int64_t kills = 0;
    std::int64_t squares = 0;
};

// Kills in one replication. Every encounter draws exactly three numbers
// (kill, survival, next gap) so policies stay aligned on shared streams.
int play(const KillSequence& seq, int n, double t, const Policy& policy, SplitMix64& rng, bool engage_at_start) {
    int kills = 0;
    int left = n;
    double remaining = engage_at_start ? t : t - rng.exponential();
    while (left > 0 && remaining >= 0.0) {
        const int k = policy(left, remaining);
        if (k < 1 || k > left) {
            std::ostringstream os;
            os << "policy chose " << k << " with " << left << " missiles left";
            throw PolicyError(os.str());
        }
        const double kill_draw = rng.uniform();
        const double survive_draw = rng.uniform();
        const double gap = rng.exponential();
        const bool killed = kill_draw < seq.a(k);
        const bool survived = killed || survive_draw < seq.u();
        kills += killed ? 1 : 0;
        left -= k;
        if (!survived) break;
        remaining -= gap;
    }
    return kills;
}

Sums run_block(const KillSequence& seq, int n, double t, const Policy& policy, std::int64_t first,
               std::int64_t last, std::uint64_t seed, bool engage_at_start) {
    Sums s;
    for (std::int64_t rep = first; rep < last; ++rep) {
        auto rng = SplitMix64::for_replication(seed, static_cast<std::uint64_t>(rep));
        const std::int64_t k = play(seq, n, t, policy, rng, engage_at_start);
        s.kills += k;
        s.squares += k * k;
    }
    return s;
}

}  // namespace

SimEstimate simulate(const KillSequence& seq, int n, double t, const Policy& policy, std::int64_t reps,
                     std::uint64_t seed, const SimOptions& opts) {
    if (reps < 1) throw std::invalid_argument("reps must be >= 1");
    if (n < 1 || n > seq.j_max()) throw std::invalid_argument("n outside the kill sequence");
    if (!(t >= 0.0)) throw std::invalid_argument("t must be >= 0");

    const int workers = std::max(1, std::min<int>(opts.workers, static_cast<int>(std::min<std::int64_t>(reps, 64))));
    std::vector<Sums> parts(static_cast<std::size_t>(workers));
    if (workers == 1) {
        parts[0] = run_block(seq, n, t, policy, 0, reps, seed, opts.engage_at_start);
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            const std::int64_t first = reps * w / workers;
            const std::int64_t last = reps * (w + 1) / workers;
            pool.emplace_back([&, w, first, last] {
                try {
                    parts[static_cast<std::size_t>(w)] =
                        run_block(seq, n, t, policy, first, last, seed, opts.engage_at_start);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
        for (auto& th : pool) th.join();
        for (auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    Sums total;
    for (const auto& p : parts) {
        total.kills += p.kills;
        total.squares += p.squares;
    }
    SimEstimate est;
    est.reps = reps;
    est.seed = seed;
    const double r = static_cast<double>(reps);
    est.mean_kills = static_cast<double>(total.kills) / r;
    if (reps > 1) {
        const double ss = static_cast<double>(total.squares) - static_cast<double>(total.kills) * est.mean_kills;
        est.std_error = std::sqrt(std::max(0.0, ss / (r - 1.0)) / r);
    }
    return est;
}

std::vector<SimEstimate> compare_policies(const KillSequence& seq, int n, double t,
                                          const std::vector<NamedPolicy>& policies, std::int64_t reps,
                                          std::uint64_t seed, const SimOptions& opts) {
    std::vector<SimEstimate> out;
    for (const auto& p : policies) {
        auto est = simulate(seq, n, t, p.policy, reps, seed, opts);
        est.label = p.label;
        out.push_back(std::move(est));
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const SimEstimate& x, const SimEstimate& y) { return x.mean_kills > y.mean_kills; });
    return out;
}

}  // namespace fighter
