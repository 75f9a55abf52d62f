#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace fighter {

// f(t) = alpha + e^{-t} * sum_m coeffs[m] * t^m.
//
// This family is closed under the exponential smoothing
//   S[f](t) = e^{-t} \int_0^t f(x) e^x dx
// and under affine maps, which is all the recursion needs.
class ExpPoly {
public:
    ExpPoly() = default;
    explicit ExpPoly(double alpha, std::vector<double> coeffs = {});

    static ExpPoly constant(double alpha) { return ExpPoly(alpha); }

    double alpha() const noexcept { return alpha_; }
    const std::vector<double>& coeffs() const noexcept { return coeffs_; }

    // Degree of the polynomial factor; -1 when the e^{-t} part vanishes.
    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }

    double operator()(double t) const;
    ExpPoly derivative() const;

    ExpPoly operator-(const ExpPoly& rhs) const;
    ExpPoly affine(double scale, double offset) const;

    bool operator==(const ExpPoly&) const = default;

private:
    void trim();

    double alpha_ = 0.0;
    std::vector<double> coeffs_;
};

class DegreeOverflow : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Piece {
    double t_lo = 0.0;
    double t_hi = 0.0;
    ExpPoly f;
};

// Pieces on [tau_k, tau_{k+1}) covering [0, t_max]; the last piece is also
// closed on the right.
class PiecewiseExpPoly {
public:
    PiecewiseExpPoly() = default;
    PiecewiseExpPoly(std::vector<double> breakpoints, std::vector<ExpPoly> pieces);

    static PiecewiseExpPoly constant(double value, double t_max);

    double t_max() const noexcept { return breaks_.back(); }
    std::size_t size() const noexcept { return pieces_.size(); }
    const std::vector<double>& breakpoints() const noexcept { return breaks_; }
    const std::vector<ExpPoly>& pieces() const noexcept { return pieces_; }
    Piece piece(std::size_t k) const { return {breaks_[k], breaks_[k + 1], pieces_[k]}; }

    // Index of the piece active at t (left-closed, right-open).
    std::size_t locate(double t) const;
    double operator()(double t) const;

    // Largest |left limit - right limit| over interior breakpoints.
    double max_jump() const;
    int max_degree() const;

    // Same function re-expressed on a finer sorted breakpoint set that
    // contains every current breakpoint.
    PiecewiseExpPoly refined(std::span<const double> breaks) const;

    bool operator==(const PiecewiseExpPoly&) const = default;

private:
    std::vector<double> breaks_;
    std::vector<ExpPoly> pieces_;
};

double evaluate(const PiecewiseExpPoly& f, double t);

// offset + scale * f, coefficient-wise.
PiecewiseExpPoly linear_combine(const PiecewiseExpPoly& f, double scale, double offset);

// f - g on the union of both breakpoint sets.
PiecewiseExpPoly difference(const PiecewiseExpPoly& f, const PiecewiseExpPoly& g);

// S[f](t) = e^{-t} \int_0^t f(x) e^x dx, exactly. Output breakpoints equal the
// input breakpoints. Throws DegreeOverflow when a piece would exceed max_degree.
PiecewiseExpPoly smooth(const PiecewiseExpPoly& f, int max_degree);

// Union of breakpoints, sorted, with near-duplicates (< 1e-14 apart) removed.
std::vector<double> merge_breakpoints(std::span<const PiecewiseExpPoly> fs);

// Sign-change search for g on [lo, hi]: scans at resolution `scan_step` and
// refines the first sign change by bisection until the bracket is narrower
// than tol. nullopt when no sign change is seen.
std::optional<double> find_root(const ExpPoly& g, double lo, double hi, double tol,
                                double scan_step = 1e-3);

// Returns the point where pred switches from false to true, assuming
// pred(lo) == false and pred(hi) == true, to bracket width tol.
template <class Pred>
double bisect_switch(Pred&& pred, double lo, double hi, double tol) {
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (pred(mid)) hi = mid; else lo = mid;
    }
    return hi;
}

}  // namespace fighter
