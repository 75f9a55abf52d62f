#include "fighter/exppoly.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fighter {

ExpPoly::ExpPoly(double alpha, std::vector<double> coeffs) : alpha_(alpha), coeffs_(std::move(coeffs)) {
    trim();
}

void ExpPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double ExpPoly::operator()(double t) const {
    if (coeffs_.empty()) return alpha_;
    double p = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) p = p * t + *it;
    return alpha_ + std::exp(-t) * p;
}

ExpPoly ExpPoly::derivative() const {
    // d/dt e^{-t} p(t) = e^{-t} (p'(t) - p(t))
    std::vector<double> d(coeffs_.size());
    for (std::size_t m = 0; m < coeffs_.size(); ++m) {
        const double next = m + 1 < coeffs_.size() ? static_cast<double>(m + 1) * coeffs_[m + 1] : 0.0;
        d[m] = next - coeffs_[m];
    }
    return ExpPoly(0.0, std::move(d));
}

ExpPoly ExpPoly::operator-(const ExpPoly& rhs) const {
    std::vector<double> c(std::max(coeffs_.size(), rhs.coeffs_.size()), 0.0);
    for (std::size_t m = 0; m < coeffs_.size(); ++m) c[m] += coeffs_[m];
    for (std::size_t m = 0; m < rhs.coeffs_.size(); ++m) c[m] -= rhs.coeffs_[m];
    return ExpPoly(alpha_ - rhs.alpha_, std::move(c));
}

ExpPoly ExpPoly::affine(double scale, double offset) const {
    std::vector<double> c(coeffs_);
    for (auto& x : c) x *= scale;
    return ExpPoly(offset + scale * alpha_, std::move(c));
}

PiecewiseExpPoly::PiecewiseExpPoly(std::vector<double> breakpoints, std::vector<ExpPoly> pieces)
    : breaks_(std::move(breakpoints)), pieces_(std::move(pieces)) {
    if (pieces_.empty() || breaks_.size() != pieces_.size() + 1) {
        throw std::invalid_argument("piecewise: need K pieces and K+1 breakpoints");
    }
    if (breaks_.front() != 0.0) throw std::invalid_argument("piecewise: domain must start at 0");
    for (std::size_t k = 0; k + 1 < breaks_.size(); ++k) {
        if (!(breaks_[k] < breaks_[k + 1])) {
            throw std::invalid_argument("piecewise: breakpoints must be strictly increasing");
        }
    }
}

PiecewiseExpPoly PiecewiseExpPoly::constant(double value, double t_max) {
    return PiecewiseExpPoly({0.0, t_max}, {ExpPoly::constant(value)});
}

std::size_t PiecewiseExpPoly::locate(double t) const {
    if (!(t >= 0.0 && t <= t_max())) {
        std::ostringstream os;
        os << "time " << t << " outside [0, " << t_max() << "]";
        throw std::out_of_range(os.str());
    }
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
    auto k = static_cast<std::size_t>(std::distance(breaks_.begin(), it));
    return std::min(k == 0 ? 0 : k - 1, pieces_.size() - 1);
}

double PiecewiseExpPoly::operator()(double t) const { return pieces_[locate(t)](t); }

double PiecewiseExpPoly::max_jump() const {
    double jump = 0.0;
    for (std::size_t k = 1; k < pieces_.size(); ++k) {
        const double t = breaks_[k];
        jump = std::max(jump, std::abs(pieces_[k - 1](t) - pieces_[k](t)));
    }
    return jump;
}

int PiecewiseExpPoly::max_degree() const {
    int d = -1;
    for (const auto& p : pieces_) d = std::max(d, p.degree());
    return d;
}

PiecewiseExpPoly PiecewiseExpPoly::refined(std::span<const double> breaks) const {
    std::vector<double> b(breaks.begin(), breaks.end());
    std::vector<ExpPoly> p;
    p.reserve(b.size() - 1);
    for (std::size_t k = 0; k + 1 < b.size(); ++k) {
        p.push_back(pieces_[locate(0.5 * (b[k] + b[k + 1]))]);
    }
    return PiecewiseExpPoly(std::move(b), std::move(p));
}

double evaluate(const PiecewiseExpPoly& f, double t) { return f(t); }

PiecewiseExpPoly linear_combine(const PiecewiseExpPoly& f, double scale, double offset) {
    std::vector<ExpPoly> p;
    p.reserve(f.size());
    for (const auto& e : f.pieces()) p.push_back(e.affine(scale, offset));
    return PiecewiseExpPoly(f.breakpoints(), std::move(p));
}

std::vector<double> merge_breakpoints(std::span<const PiecewiseExpPoly> fs) {
    std::vector<double> all;
    for (const auto& f : fs) all.insert(all.end(), f.breakpoints().begin(), f.breakpoints().end());
    std::sort(all.begin(), all.end());
    std::vector<double> out;
    for (double t : all) {
        if (out.empty() || t - out.back() > 1e-14) out.push_back(t);
    }
    // Keep the exact t_max as the last entry.
    if (!all.empty()) out.back() = all.back();
    return out;
}

PiecewiseExpPoly difference(const PiecewiseExpPoly& f, const PiecewiseExpPoly& g) {
    if (f.t_max() != g.t_max()) throw std::invalid_argument("difference: domain mismatch");
    const PiecewiseExpPoly both[] = {f, g};
    const auto b = merge_breakpoints(both);
    const auto fr = f.refined(b);
    const auto gr = g.refined(b);
    std::vector<ExpPoly> p;
    for (std::size_t k = 0; k < fr.size(); ++k) p.push_back(fr.pieces()[k] - gr.pieces()[k]);
    return PiecewiseExpPoly(b, std::move(p));
}

PiecewiseExpPoly smooth(const PiecewiseExpPoly& f, int max_degree) {
    // On piece k with f = alpha + e^{-x} sum b_m x^m:
    //   \int_{tau}^{t} f(x) e^x dx = alpha (e^t - e^tau) + sum b_m (t^{m+1} - tau^{m+1}) / (m+1)
    // so S[f](t) = alpha + e^{-t} [ C_k - alpha e^tau - sum b_m tau^{m+1}/(m+1)
    //                               + sum b_m t^{m+1}/(m+1) ],
    // with C_k = \int_0^{tau} f(x) e^x dx carried across breakpoints. Since
    // C_k = e^tau S[f](tau) = alpha_prev e^tau + p_prev(tau), the constant is
    // assembled as (alpha_prev - alpha) e^tau + p_prev(tau) - shift.
    std::vector<ExpPoly> out;
    out.reserve(f.size());
    double prev_alpha = 0.0;
    double prev_poly = 0.0;
    const auto& b = f.breakpoints();
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto& piece = f.pieces()[k];
        const double tau = b[k];
        const double alpha = piece.alpha();
        const auto& beta = piece.coeffs();
        std::vector<double> c(beta.size() + 1, 0.0);
        double shift = 0.0;
        double tau_pow = tau;
        for (std::size_t m = 0; m < beta.size(); ++m) {
            const double w = beta[m] / static_cast<double>(m + 1);
            c[m + 1] = w;
            shift += w * tau_pow;
            tau_pow *= tau;
        }
        c[0] = (prev_alpha - alpha) * std::exp(tau) + prev_poly - shift;
        ExpPoly s(alpha, std::move(c));
        if (s.degree() > max_degree) {
            std::ostringstream os;
            os << "smoothing produced degree " << s.degree() << " above cap " << max_degree;
            throw DegreeOverflow(os.str());
        }
        const double next = b[k + 1];
        prev_alpha = s.alpha();
        prev_poly = 0.0;
        for (auto it = s.coeffs().rbegin(); it != s.coeffs().rend(); ++it) prev_poly = prev_poly * next + *it;
        out.push_back(std::move(s));
    }
    return PiecewiseExpPoly(b, std::move(out));
}

std::optional<double> find_root(const ExpPoly& g, double lo, double hi, double tol, double scan_step) {
    if (!(lo < hi)) throw std::invalid_argument("find_root: need lo < hi");
    if (!(tol > 0.0) || !(scan_step > 0.0)) throw std::invalid_argument("find_root: bad tolerance");
    const double g_lo = g(lo);
    if (g_lo == 0.0) return lo;
    const bool neg = g_lo < 0.0;
    const auto crossed = [&](double t) {
        const double v = g(t);
        return v == 0.0 || (v < 0.0) != neg;
    };
    const auto steps = static_cast<std::size_t>(std::ceil((hi - lo) / scan_step));
    double prev = lo;
    for (std::size_t i = 1; i <= steps; ++i) {
        const double t = i == steps ? hi : lo + static_cast<double>(i) * scan_step;
        if (crossed(t)) {
            if (g(t) == 0.0) return t;
            return bisect_switch(crossed, prev, t, tol);
        }
        prev = t;
    }
    return std::nullopt;
}

}  // namespace fighter
