#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fighter/dp_solver.hpp"

namespace fighter {

// SplitMix64 stream. Each replication owns the stream keyed by (seed, rep),
// so results do not depend on how replications are split across workers.
class SplitMix64 {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static SplitMix64 for_replication(std::uint64_t seed, std::uint64_t rep);

    std::uint64_t next();
    // Uniform on [0,1) with 53 random bits.
    double uniform();
    // Unit-rate exponential.
    double exponential();

private:
    std::uint64_t state_;
};

// Allocation rule: (missiles left, time left) -> missiles to spend.
using Policy = std::function<int(int n, double t)>;

class PolicyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Policy optimal_policy(const ValueTable& table);
Policy constant_policy(int k);
// Spend everything at the first encounter.
Policy all_in_policy();
// Per-n piecewise policies (index n-1 holds K(n,.)); times past the last
// interval use its value.
Policy tabulated_policy(std::vector<PiecewisePolicy> per_n);

struct SimEstimate {
    double mean_kills = 0.0;
    double std_error = 0.0;
    std::int64_t reps = 0;
    std::uint64_t seed = 0;
    std::string rng = SplitMix64::kAlgorithm;
    std::string label;

    bool operator==(const SimEstimate&) const = default;
};

struct SimOptions {
    // true: an enemy is confronted at time 0 (estimates N(n,t)); false: the
    // first enemy arrives after a unit-exponential wait (estimates N*(n,t)).
    bool engage_at_start = true;
    int workers = 1;
};

SimEstimate simulate(const KillSequence& seq, int n, double t, const Policy& policy, std::int64_t reps,
                     std::uint64_t seed, const SimOptions& opts = {});

struct NamedPolicy {
    std::string label;
    Policy policy;
};

// Common random numbers: every policy sees the same per-replication stream.
// Sorted by mean, best first (stable for ties).
std::vector<SimEstimate> compare_policies(const KillSequence& seq, int n, double t,
                                          const std::vector<NamedPolicy>& policies, std::int64_t reps,
                                          std::uint64_t seed, const SimOptions& opts = {});

}  // namespace fighter
