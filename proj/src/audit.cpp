#include "fighter/audit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace fighter {

const char* to_string(Property p) {
    switch (p) {
        case Property::A: return "A";
        case Property::B: return "B";
        case Property::C: return "C";
        case Property::Range: return "RANGE";
        case Property::Interlace: return "INTERLACE";
        case Property::ConcaveN: return "CONCAVE_N";
        case Property::TP2: return "TP2";
        case Property::Limits: return "LIMITS";
        case Property::Remark: return "REMARK";
    }
    return "?";
}

const char* to_string(Verdict v) { return v == Verdict::Holds ? "holds" : "violated"; }

Property property_from_string(const std::string& s) {
    for (auto p : {Property::A, Property::B, Property::C, Property::Range, Property::Interlace,
                   Property::ConcaveN, Property::TP2, Property::Limits, Property::Remark}) {
        if (s == to_string(p)) return p;
    }
    throw std::invalid_argument("unknown property '" + s + "'");
}

std::vector<double> uniform_grid(double t_max, double step) {
    if (!(step > 0.0) || !(t_max > 0.0)) throw std::invalid_argument("uniform_grid: bad step");
    std::vector<double> g;
    const auto count = static_cast<long long>(std::floor(t_max / step + 1e-9));
    for (long long i = 0; i <= count; ++i) g.push_back(static_cast<double>(i) * step);
    return g;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

AuditParams params_of(const ValueTable& table, std::string grid) {
    AuditParams p;
    p.u = table.sequence().u();
    p.a = table.sequence().values();
    p.q = table.sequence().q();
    p.n_max = table.n_max();
    p.t_max = table.t_max();
    p.grid = std::move(grid);
    return p;
}

std::string probe_desc(std::span<const double> probes) {
    std::ostringstream os;
    if (probes.empty()) {
        os << "exact intervals";
    } else {
        os << "exact intervals; witnesses at " << probes.size() << " probes on [" << probes.front() << ", "
           << probes.back() << "]";
    }
    return os.str();
}

// First probe inside [lo, hi), else the midpoint.
double probe_in(double lo, double hi, std::span<const double> probes) {
    auto it = std::lower_bound(probes.begin(), probes.end(), lo);
    if (it != probes.end() && *it < hi) return *it;
    return 0.5 * (lo + hi);
}

std::string ab_basis(Property p, double u) {
    if (u == 1.0) return "proven for u = 1";
    if (u == 0.0) return p == Property::A ? "proven for u = 0" : "known to fail for u = 0 (from n = 5, q = 1/2)";
    return "exploratory (no proven guarantee for 0 < u < 1)";
}

struct Overlap {
    double lo;
    double hi;
    int k_n;
    int k_next;
};

// Pieces where both policies are constant.
std::vector<Overlap> intersect(const PiecewisePolicy& a, const PiecewisePolicy& b) {
    std::vector<Overlap> out;
    const auto& ia = a.intervals();
    const auto& ib = b.intervals();
    std::size_t i = 0, j = 0;
    while (i < ia.size() && j < ib.size()) {
        const double lo = std::max(ia[i].t_lo, ib[j].t_lo);
        const double hi = std::min(ia[i].t_hi, ib[j].t_hi);
        if (lo < hi) out.push_back({lo, hi, ia[i].k, ib[j].k});
        if (ia[i].t_hi < ib[j].t_hi) ++i; else if (ib[j].t_hi < ia[i].t_hi) ++j; else { ++i; ++j; }
    }
    return out;
}

template <class Bad>
AuditReport compare_consecutive(const ValueTable& table, Property prop, std::span<const double> probes,
                                Bad&& bad) {
    AuditReport r;
    r.property = prop;
    r.params = params_of(table, probe_desc(probes));
    std::size_t comparisons = 0;
    for (int n = 1; n < table.n_max(); ++n) {
        for (const auto& o : intersect(table.policy(n), table.policy(n + 1))) {
            ++comparisons;
            if (!bad(o.k_n, o.k_next)) continue;
            Witness w;
            w.n = n;
            w.n2 = n + 1;
            w.t = w.t2 = probe_in(o.lo, o.hi, probes);
            w.k = o.k_n;
            w.k2 = o.k_next;
            std::ostringstream os;
            os << "on [" << o.lo << ", " << o.hi << ")";
            w.note = os.str();
            r.witnesses.push_back(w);
        }
    }
    std::ostringstream os;
    os << comparisons << " interval comparisons over n = 1.." << table.n_max();
    r.checked = os.str();
    r.verdict = r.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return r;
}

void require_u(const ValueTable& table, double u, const char* what) {
    if (table.sequence().u() != u) {
        std::ostringstream os;
        os << what << " requires u = " << u;
        throw AuditError(os.str());
    }
}

}  // namespace

AuditReport audit_A(const ValueTable& table, std::span<const double> probes) {
    AuditReport r;
    r.property = Property::A;
    r.params = params_of(table, probe_desc(probes));
    r.basis = ab_basis(Property::A, table.sequence().u());
    std::size_t comparisons = 0;
    for (int n = 1; n <= table.n_max(); ++n) {
        const auto& iv = table.policy(n).intervals();
        for (std::size_t i = 0; i + 1 < iv.size(); ++i) {
            ++comparisons;
            if (iv[i + 1].k <= iv[i].k) continue;
            Witness w;
            w.n = w.n2 = n;
            w.t = probe_in(iv[i].t_lo, iv[i].t_hi, probes);
            w.t2 = probe_in(iv[i + 1].t_lo, iv[i + 1].t_hi, probes);
            w.k = iv[i].k;
            w.k2 = iv[i + 1].k;
            std::ostringstream os;
            os << "K increases at t = " << iv[i + 1].t_lo;
            w.note = os.str();
            r.witnesses.push_back(w);
        }
    }
    std::ostringstream os;
    os << comparisons << " adjacent-interval comparisons over n = 1.." << table.n_max();
    r.checked = os.str();
    r.verdict = r.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return r;
}

AuditReport audit_B(const ValueTable& table, std::span<const double> probes) {
    auto r = compare_consecutive(table, Property::B, probes, [](int k, int k_next) { return k > k_next; });
    r.basis = ab_basis(Property::B, table.sequence().u());
    return r;
}

AuditReport audit_C(const ValueTable& table, std::span<const double> probes) {
    auto r = compare_consecutive(table, Property::C, probes, [](int k, int k_next) { return k_next > k + 1; });
    r.basis = "proven for all u in [0,1]";
    return r;
}

RangeInterlaceReports audit_range_and_interlace(const ValueTable& table, double margin) {
    require_u(table, 1.0, "range/interlace audit");
    const int n_max = table.n_max();
    const auto& last = table.policy(n_max).intervals();
    if (last.back().k != 1) {
        std::ostringstream os;
        os << "t_max too small: K(" << n_max << ",.) only reaches " << last.back().k << " by t = " << table.t_max();
        throw AuditError(os.str());
    }

    RangeInterlaceReports out;
    auto& range = out.range;
    range.property = Property::Range;
    range.params = params_of(table, "exact intervals");
    range.basis = "proven for u = 1";
    for (int n = 1; n <= n_max; ++n) {
        const auto& iv = table.policy(n).intervals();
        bool ok = static_cast<int>(iv.size()) == n;
        for (std::size_t i = 0; ok && i < iv.size(); ++i) ok = iv[i].k == n - static_cast<int>(i);
        if (!ok) {
            Witness w;
            w.n = w.n2 = n;
            w.k = iv.front().k;
            w.k2 = iv.back().k;
            w.value = static_cast<double>(iv.size());
            w.bound = n;
            w.note = "policy does not step through n, n-1, ..., 1";
            range.witnesses.push_back(w);
        }
    }
    range.checked = "policy(n) for n = 1.." + std::to_string(n_max);
    range.verdict = range.witnesses.empty() ? Verdict::Holds : Verdict::Violated;

    // th[n][j] = t(n,j), j = 0..n, with t(n,0) = inf and t(n,n) = 0.
    std::vector<std::vector<double>> th(static_cast<std::size_t>(n_max) + 1);
    for (int n = 1; n <= n_max; ++n) {
        auto& row = th[static_cast<std::size_t>(n)];
        row.assign(static_cast<std::size_t>(n) + 1, kInf);
        row[static_cast<std::size_t>(n)] = 0.0;
        for (const auto& x : thresholds(table, n)) row[static_cast<std::size_t>(x.j)] = x.t ? *x.t : kInf;
    }
    auto& inter = out.interlace;
    inter.property = Property::Interlace;
    inter.params = params_of(table, "threshold roots");
    inter.basis = "proven for u = 1";
    std::size_t checks = 0;
    for (int n = 1; n < n_max; ++n) {
        const auto& lo_row = th[static_cast<std::size_t>(n)];
        const auto& hi_row = th[static_cast<std::size_t>(n) + 1];
        for (int j = 0; j <= n - 1; ++j) {
            const double left = lo_row[static_cast<std::size_t>(j) + 1];   // t(n, j+1)
            const double mid = hi_row[static_cast<std::size_t>(j) + 1];    // t(n+1, j+1)
            const double right = lo_row[static_cast<std::size_t>(j)];      // t(n, j)
            ++checks;
            const bool ok_left = mid - left > margin;
            const bool ok_right = right == kInf ? mid < kInf : right - mid > margin;
            if (ok_left && ok_right) continue;
            Witness w;
            w.n = n;
            w.n2 = n + 1;
            w.k = j + 1;
            w.t = left;
            w.t2 = mid;
            w.value = right;
            w.bound = margin;
            w.note = "t(n,j+1) < t(n+1,j+1) < t(n,j) fails for j = " + std::to_string(j);
            inter.witnesses.push_back(w);
        }
    }
    inter.checked = std::to_string(checks) + " interlacing triples";
    inter.verdict = inter.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return out;
}

AuditReport audit_concave_n(const ValueTable& table, std::span<const double> probes, double tol) {
    require_u(table, 1.0, "concavity-in-n audit");
    AuditReport r;
    r.property = Property::ConcaveN;
    r.params = params_of(table, probe_desc(probes));
    r.basis = "proven for u = 1";
    for (double t : probes) {
        for (int n = 1; n < table.n_max(); ++n) {
            const double up = table.value_at(n + 1, t) - table.value_at(n, t);
            const double down = table.value_at(n, t) - table.value_at(n - 1, t);
            if (up <= down + tol) continue;
            Witness w;
            w.n = n;
            w.n2 = n + 1;
            w.t = w.t2 = t;
            w.value = up;
            w.bound = down;
            w.note = "increment grows in n";
            r.witnesses.push_back(w);
        }
    }
    r.checked = std::to_string(probes.size()) + " probes x " + std::to_string(table.n_max() - 1) + " increments";
    r.verdict = r.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return r;
}

AuditReport audit_tp2(const ValueTable& table, std::span<const double> probes, double tol) {
    require_u(table, 0.0, "TP2 ratio audit");
    AuditReport r;
    r.property = Property::TP2;
    r.params = params_of(table, probe_desc(probes));
    r.basis = "proven for u = 0";
    for (int k = 2; k <= table.n_max() - 1; ++k) {
        double prev = -kInf;
        double prev_t = 0.0;
        for (double t : probes) {
            const double ratio = table.value_at(k, t) / table.value_at(k - 1, t);
            if (ratio < prev - tol * std::abs(prev)) {
                Witness w;
                w.n = k;
                w.n2 = k - 1;
                w.t = prev_t;
                w.t2 = t;
                w.value = ratio;
                w.bound = prev;
                w.note = "ratio N(k,t)/N(k-1,t) decreases";
                r.witnesses.push_back(w);
            }
            prev = ratio;
            prev_t = t;
        }
    }
    r.checked = std::to_string(probes.size()) + " probes for k = 2.." + std::to_string(table.n_max() - 1);
    r.verdict = r.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return r;
}

AuditReport audit_limits(const ValueTable& table, double tol) {
    require_u(table, 1.0, "limit audit");
    if (table.t_max() < 50.0) throw AuditError("t_max too small: limit audit needs t_max >= 50");
    AuditReport r;
    r.property = Property::Limits;
    r.params = params_of(table, "t = 1e-6 and t = t_max");
    r.basis = "proven for u = 1";
    const double a1 = table.sequence().a(1);
    const double t_small = 1e-6;
    const double t_big = table.t_max();
    const auto add = [&](int s, double t, double value, double bound, const char* note) {
        Witness w;
        w.n = w.n2 = s;
        w.t = w.t2 = t;
        w.value = value;
        w.bound = bound;
        w.note = note;
        r.witnesses.push_back(w);
    };
    int s_count = 0;
    for (int s = 1; s <= table.n_max() - 1; ++s, ++s_count) {
        const double d0 = table.d_star(s, t_small);
        if (!(std::abs(d0) <= tol)) add(s, t_small, d0, tol, "D*(s,t) does not vanish as t -> 0");
        const double d1 = table.d_star(s, t_big);
        if (!(std::abs(d1 - a1) <= tol)) add(s, t_big, d1, a1, "D*(s,t) does not approach a(1)");
        const double ns = table.smoothed(s)(t_big);
        if (!(std::abs(ns - s * a1) <= tol)) add(s, t_big, ns, s * a1, "N*(s,t) does not approach s a(1)");
    }
    r.checked = std::to_string(3 * s_count) + " limit checks at tolerance " + std::to_string(tol);
    r.verdict = r.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return r;
}

AuditReport audit_remark_regime(std::span<const ValueTable> tables, int n) {
    if (tables.empty()) throw std::invalid_argument("remark audit: no tables");
    if (n < 2) throw std::invalid_argument("remark audit: n must be >= 2");
    AuditReport r;
    r.property = Property::Remark;
    r.basis = "proven for u = 0, geometric a(j)";
    const double threshold = std::pow(0.5, 1.0 / (n - 1));
    std::ostringstream grid;
    grid << "q in {";
    int used = 0, skipped = 0;
    for (const auto& table : tables) {
        require_u(table, 0.0, "remark audit");
        const auto q = table.sequence().q();
        if (!q) throw AuditError("remark audit needs geometric sequences");
        if (table.t_max() < 50.0) throw AuditError("t_max too small: remark audit needs t_max >= 50");
        if (std::abs(*q - threshold) < 1e-9) {
            ++skipped;
            continue;
        }
        grid << (used ? ", " : "") << *q;
        ++used;
        const auto& iv = table.policy(n).intervals();
        const bool always_n = iv.size() == 1 && iv.front().k == n;
        const bool expected = *q > threshold;
        if (always_n == expected) continue;
        Witness w;
        w.n = w.n2 = n;
        w.k = iv.front().k;
        w.k2 = iv.back().k;
        w.t = iv.size() > 1 ? iv[1].t_lo : 0.0;
        w.value = *q;
        w.bound = threshold;
        w.note = expected ? "K(n,.) switches although q is above the threshold"
                          : "K(n,.) never switches although q is below the threshold";
        r.witnesses.push_back(w);
    }
    grid << "}";
    r.params = params_of(tables.front(), grid.str());
    r.params.q.reset();
    r.checked = std::to_string(used) + " tables, " + std::to_string(skipped) + " boundary tables skipped";
    r.verdict = r.witnesses.empty() ? Verdict::Holds : Verdict::Violated;
    return r;
}

}  // namespace fighter
