#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "json.hpp"

#include "fighter/audit.hpp"
#include "fighter/dp_solver.hpp"
#include "fighter/exppoly.hpp"
#include "fighter/simulator.hpp"

namespace fighter {

using json = nlohmann::json;

// PiecewiseExpPoly <-> [{t_lo, t_hi, alpha, coeffs}]
void to_json(json& j, const PiecewiseExpPoly& f);
void from_json(const json& j, PiecewiseExpPoly& f);

// PiecewisePolicy <-> [{t_lo, t_hi, k}]
void to_json(json& j, const PiecewisePolicy& p);
void from_json(const json& j, PiecewisePolicy& p);

void to_json(json& j, const Witness& w);
void from_json(const json& j, Witness& w);
void to_json(json& j, const AuditParams& p);
void from_json(const json& j, AuditParams& p);
void to_json(json& j, const AuditReport& r);
void from_json(const json& j, AuditReport& r);

void to_json(json& j, const SimEstimate& e);
void from_json(const json& j, SimEstimate& e);

// Exported view of a ValueTable: what survives a JSON round trip.
struct TableExport {
    std::vector<double> a;
    double u = 0.0;
    int n_max = 0;
    double t_max = 0.0;
    double root_tol = 0.0;
    double scan_step = 0.0;
    std::vector<PiecewisePolicy> policy;        // index n-1
    std::vector<PiecewiseExpPoly> value;        // index n-1
    std::vector<PiecewiseExpPoly> smoothed;     // index r, r = 0..n_max-1

    bool operator==(const TableExport&) const = default;
};

TableExport export_table(const ValueTable& table);
void to_json(json& j, const TableExport& t);
void from_json(const json& j, TableExport& t);

// Policy CSV: n,t_lo,t_hi,k.
void write_policy_csv(std::ostream& os, const ValueTable& table);
std::vector<PiecewisePolicy> read_policy_csv(std::istream& is);

// Values CSV: t,n,N at the given times.
void write_values_csv(std::ostream& os, const ValueTable& table, std::span<const double> times);

}  // namespace fighter
