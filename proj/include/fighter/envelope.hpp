#pragma once

#include <span>
#include <utility>
#include <vector>

#include "fighter/exppoly.hpp"

namespace fighter {

struct PolicyInterval {
    double t_lo = 0.0;
    double t_hi = 0.0;
    int k = 0;

    bool operator==(const PolicyInterval&) const = default;
};

// Piecewise-constant allocation over [0, t_max): intervals are left-closed,
// right-open, contiguous, and adjacent intervals carry different k.
class PiecewisePolicy {
public:
    PiecewisePolicy() = default;
    explicit PiecewisePolicy(std::vector<PolicyInterval> intervals);

    const std::vector<PolicyInterval>& intervals() const noexcept { return intervals_; }
    double t_max() const { return intervals_.back().t_hi; }

    // t == t_max resolves to the last interval.
    int at(double t) const;

    // Interior switch times, in increasing order.
    std::vector<double> breakpoints() const;

    bool operator==(const PiecewisePolicy&) const = default;

private:
    std::vector<PolicyInterval> intervals_;
};

struct EnvelopeOptions {
    // Scan step for crossing detection; <= 0 means min(1e-3, t_max / 1e4).
    double scan_step = 0.0;
    double root_tol = 1e-10;
    // Values closer than this are treated as tied (smallest label wins).
    double tie_tol = 1e-12;
};

struct Envelope {
    PiecewiseExpPoly value;
    PiecewisePolicy policy;
};

// Pointwise maximum of fs with the argmax label per interval; ties go to the
// smallest label. Labels must be strictly increasing.
Envelope upper_envelope(std::span<const PiecewiseExpPoly> fs, std::span<const int> labels,
                        const EnvelopeOptions& opts = {});

}  // namespace fighter
