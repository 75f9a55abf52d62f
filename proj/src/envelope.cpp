#include "fighter/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fighter {

PiecewisePolicy::PiecewisePolicy(std::vector<PolicyInterval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty()) throw std::invalid_argument("policy: no intervals");
    if (intervals_.front().t_lo != 0.0) throw std::invalid_argument("policy: must start at 0");
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto& iv = intervals_[i];
        if (!(iv.t_lo < iv.t_hi)) throw std::invalid_argument("policy: empty interval");
        if (iv.k < 1) throw std::invalid_argument("policy: allocation must be >= 1");
        if (i > 0 && intervals_[i - 1].t_hi != iv.t_lo) throw std::invalid_argument("policy: gap between intervals");
        if (i > 0 && intervals_[i - 1].k == iv.k) throw std::invalid_argument("policy: repeated allocation across a switch");
    }
}

int PiecewisePolicy::at(double t) const {
    if (!(t >= 0.0 && t <= t_max())) throw std::out_of_range("policy: time outside domain");
    auto it = std::upper_bound(intervals_.begin(), intervals_.end(), t,
                               [](double x, const PolicyInterval& iv) { return x < iv.t_hi; });
    if (it == intervals_.end()) return intervals_.back().k;
    return it->k;
}

std::vector<double> PiecewisePolicy::breakpoints() const {
    std::vector<double> b;
    for (std::size_t i = 1; i < intervals_.size(); ++i) b.push_back(intervals_[i].t_lo);
    return b;
}

namespace {

struct Segment {
    double lo;
    double hi;
    std::size_t cand;
    std::size_t piece;
};

// Winner at a point: smallest index within tie_tol of the maximum.
std::size_t winner_at(std::span<const ExpPoly> g, double t, double tie_tol) {
    std::vector<double> v(g.size());
    double best = -INFINITY;
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = g[i](t);
        best = std::max(best, v[i]);
    }
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (v[i] >= best - tie_tol) return i;
    }
    return 0;
}

// Winner on (t, t + eps) for small eps: compare value, then successive
// derivatives, keeping near-ties; remaining ties go to the smallest index.
std::size_t winner_right(std::span<const ExpPoly> g, double t) {
    constexpr double tol = 1e-9;
    constexpr int orders = 4;
    std::vector<std::size_t> alive(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) alive[i] = i;
    std::vector<ExpPoly> d(g.begin(), g.end());
    for (int order = 0; order < orders && alive.size() > 1; ++order) {
        double best = -INFINITY;
        for (auto i : alive) best = std::max(best, d[i](t));
        std::vector<std::size_t> keep;
        for (auto i : alive) {
            if (d[i](t) >= best - tol) keep.push_back(i);
        }
        alive.swap(keep);
        for (auto i : alive) d[i] = d[i].derivative();
    }
    return alive.front();
}

}  // namespace

Envelope upper_envelope(std::span<const PiecewiseExpPoly> fs, std::span<const int> labels,
                        const EnvelopeOptions& opts) {
    if (fs.empty()) throw std::invalid_argument("upper_envelope: empty candidate list");
    if (labels.size() != fs.size()) throw std::invalid_argument("upper_envelope: label count mismatch");
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (!(labels[i - 1] < labels[i])) throw std::invalid_argument("upper_envelope: labels must increase");
    }
    const double t_max = fs.front().t_max();
    for (const auto& f : fs) {
        if (f.t_max() != t_max) throw std::invalid_argument("upper_envelope: domain mismatch");
    }
    const double step = opts.scan_step > 0.0 ? opts.scan_step : std::min(1e-3, t_max / 1e4);

    const auto b = merge_breakpoints(fs);
    std::vector<PiecewiseExpPoly> refined;
    refined.reserve(fs.size());
    for (const auto& f : fs) refined.push_back(f.refined(b));

    std::vector<Segment> segs;
    std::vector<ExpPoly> g(fs.size());
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        const double lo = b[k];
        const double hi = b[k + 1];
        for (std::size_t i = 0; i < fs.size(); ++i) g[i] = refined[i].pieces()[k];

        std::size_t w = winner_right(g, lo);
        double seg_start = lo;
        double t = lo;
        int stalls = 0;
        while (t < hi) {
            const double tn = std::min(t + step, hi);
            const std::size_t w2 = winner_at(g, tn, opts.tie_tol);
            if (w2 == w || stalls > static_cast<int>(2 * g.size())) {
                if (w2 != w) {
                    // Could not resolve the switch inside this step; accept the
                    // grid winner at tn.
                    segs.push_back({seg_start, tn, w, k});
                    seg_start = tn;
                    w = w2;
                }
                t = tn;
                stalls = 0;
                continue;
            }
            const ExpPoly h = g[w2] - g[w];
            const bool smaller = w2 < w;
            const auto beats = [&](double x) {
                const double d = h(x);
                return d > 0.0 || (d == 0.0 && smaller);
            };
            const double c = beats(t) ? t : bisect_switch(beats, t, tn, opts.root_tol);
            if (c > seg_start) segs.push_back({seg_start, c, w, k});
            seg_start = std::max(seg_start, c);
            std::size_t nw = winner_right(g, c);
            if (nw == w) nw = w2;
            w = nw;
            t = c;
            ++stalls;
        }
        segs.push_back({seg_start, hi, w, k});
    }

    // Absorb slivers narrower than the root tolerance into the preceding segment.
    std::vector<Segment> clean;
    for (const auto& s : segs) {
        if (s.hi - s.lo <= 0.0) continue;
        if (!clean.empty() && s.hi - s.lo < opts.root_tol) {
            clean.back().hi = s.hi;
            continue;
        }
        clean.push_back(s);
    }

    std::vector<double> vb{0.0};
    std::vector<ExpPoly> vp;
    std::vector<PolicyInterval> pol;
    for (std::size_t i = 0; i < clean.size(); ++i) {
        const auto& s = clean[i];
        const ExpPoly& piece = refined[s.cand].pieces()[s.piece];
        if (!vp.empty() && vp.back() == piece) {
            vb.back() = s.hi;
        } else {
            vp.push_back(piece);
            vb.push_back(s.hi);
        }
        const int k = labels[s.cand];
        if (!pol.empty() && pol.back().k == k) {
            pol.back().t_hi = s.hi;
        } else {
            pol.push_back({s.lo, s.hi, k});
        }
    }
    vb.back() = t_max;
    pol.back().t_hi = t_max;
    return {PiecewiseExpPoly(std::move(vb), std::move(vp)), PiecewisePolicy(std::move(pol))};
}

}  // namespace fighter
