#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fighter/dp_solver.hpp"

namespace fighter {

enum class Property { A, B, C, Range, Interlace, ConcaveN, TP2, Limits, Remark };
enum class Verdict { Holds, Violated };

const char* to_string(Property p);
const char* to_string(Verdict v);
Property property_from_string(const std::string& s);

// One counterexample. Policy properties fill n/t/k (and n2/t2/k2 for the
// comparison state); numeric properties fill value and bound.
struct Witness {
    int n = 0;
    int n2 = 0;
    double t = 0.0;
    double t2 = 0.0;
    int k = 0;
    int k2 = 0;
    double value = 0.0;
    double bound = 0.0;
    std::string note;

    bool operator==(const Witness&) const = default;
};

struct AuditParams {
    double u = 0.0;
    std::vector<double> a;
    std::optional<double> q;
    int n_max = 0;
    double t_max = 0.0;
    std::string grid;

    bool operator==(const AuditParams&) const = default;
};

struct AuditReport {
    Property property = Property::A;
    AuditParams params;
    Verdict verdict = Verdict::Holds;
    // What backs the expectation: a proven result, a known counterexample, or
    // nothing (exploratory).
    std::string basis;
    // What was examined, e.g. "exact intervals: 17 comparisons".
    std::string checked;
    std::vector<Witness> witnesses;

    bool holds() const { return verdict == Verdict::Holds; }
    bool operator==(const AuditReport&) const = default;
};

// Probe times used for witness coordinates and for the grid-based checks.
std::vector<double> uniform_grid(double t_max, double step);

// K(n,.) non-increasing in t, from the exact interval lists.
AuditReport audit_A(const ValueTable& table, std::span<const double> probes = {});
// K(n,t) <= K(n+1,t), by exact interval intersection.
AuditReport audit_B(const ValueTable& table, std::span<const double> probes = {});
// K(n+1,t) <= K(n,t) + 1, by exact interval intersection.
AuditReport audit_C(const ValueTable& table, std::span<const double> probes = {});

class AuditError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RangeInterlaceReports {
    AuditReport range;
    AuditReport interlace;
};

// u = 1 only. Every K(n,.) visits n, n-1, ..., 1 in order, and
// t(n,j+1) < t(n+1,j+1) < t(n,j) with t(n,n) = 0, t(n,0) = inf.
// Throws AuditError when K(n_max,.) never reaches 1 before t_max.
RangeInterlaceReports audit_range_and_interlace(const ValueTable& table, double margin = 1e-9);

// u = 1: N(n+1,t) - N(n,t) <= N(n,t) - N(n-1,t) at every probe.
AuditReport audit_concave_n(const ValueTable& table, std::span<const double> probes, double tol = 1e-12);
// u = 0: N(k,t)/N(k-1,t) non-decreasing along the probes for k <= n_max - 1.
AuditReport audit_tp2(const ValueTable& table, std::span<const double> probes, double tol = 1e-12);

// u = 1, t_max >= 50: D*(s,t) -> 0 as t -> 0, D*(s,t) -> a(1) and
// N*(s,t) -> s a(1) as t grows, for s <= n_max - 1.
AuditReport audit_limits(const ValueTable& table, double tol = 1e-6);

// Frail, geometric tables over a q grid: K(n,.) == n on [0, t_max] exactly
// when q > (1/2)^{1/(n-1)}. Tables with q within 1e-9 of the boundary are skipped.
AuditReport audit_remark_regime(std::span<const ValueTable> tables, int n);

}  // namespace fighter
