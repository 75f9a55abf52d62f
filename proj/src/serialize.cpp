#include "fighter/serialize.hpp"

#include <cmath>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace fighter {

namespace {

// JSON has no infinities; they travel as strings.
json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double number(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::invalid_argument("expected a number, got '" + s + "'");
}

}  // namespace

void to_json(json& j, const PiecewiseExpPoly& f) {
    j = json::array();
    for (std::size_t k = 0; k < f.size(); ++k) {
        const auto p = f.piece(k);
        j.push_back({{"t_lo", p.t_lo}, {"t_hi", p.t_hi}, {"alpha", p.f.alpha()}, {"coeffs", p.f.coeffs()}});
    }
}

void from_json(const json& j, PiecewiseExpPoly& f) {
    std::vector<double> b;
    std::vector<ExpPoly> pieces;
    for (const auto& p : j) {
        if (b.empty()) b.push_back(p.at("t_lo").get<double>());
        b.push_back(p.at("t_hi").get<double>());
        pieces.emplace_back(p.at("alpha").get<double>(), p.at("coeffs").get<std::vector<double>>());
    }
    f = PiecewiseExpPoly(std::move(b), std::move(pieces));
}

void to_json(json& j, const PiecewisePolicy& p) {
    j = json::array();
    for (const auto& iv : p.intervals()) j.push_back({{"t_lo", iv.t_lo}, {"t_hi", iv.t_hi}, {"k", iv.k}});
}

void from_json(const json& j, PiecewisePolicy& p) {
    std::vector<PolicyInterval> iv;
    for (const auto& e : j) iv.push_back({e.at("t_lo").get<double>(), e.at("t_hi").get<double>(), e.at("k").get<int>()});
    p = PiecewisePolicy(std::move(iv));
}

void to_json(json& j, const Witness& w) {
    j = {{"n", w.n},         {"n2", w.n2},         {"t", number(w.t)},          {"t2", number(w.t2)},
         {"k", w.k},         {"k2", w.k2},         {"value", number(w.value)},  {"bound", number(w.bound)},
         {"note", w.note}};
}

void from_json(const json& j, Witness& w) {
    w.n = j.at("n").get<int>();
    w.n2 = j.at("n2").get<int>();
    w.t = number(j.at("t"));
    w.t2 = number(j.at("t2"));
    w.k = j.at("k").get<int>();
    w.k2 = j.at("k2").get<int>();
    w.value = number(j.at("value"));
    w.bound = number(j.at("bound"));
    w.note = j.at("note").get<std::string>();
}

void to_json(json& j, const AuditParams& p) {
    j = {{"u", p.u}, {"a", p.a}, {"n_max", p.n_max}, {"t_max", p.t_max}, {"grid", p.grid}};
    j["q"] = p.q ? json(*p.q) : json(nullptr);
}

void from_json(const json& j, AuditParams& p) {
    p.u = j.at("u").get<double>();
    p.a = j.at("a").get<std::vector<double>>();
    p.q = j.at("q").is_null() ? std::nullopt : std::optional<double>(j.at("q").get<double>());
    p.n_max = j.at("n_max").get<int>();
    p.t_max = j.at("t_max").get<double>();
    p.grid = j.at("grid").get<std::string>();
}

void to_json(json& j, const AuditReport& r) {
    j = {{"property", to_string(r.property)},
         {"params", r.params},
         {"verdict", to_string(r.verdict)},
         {"basis", r.basis},
         {"checked", r.checked},
         {"witnesses", r.witnesses}};
}

void from_json(const json& j, AuditReport& r) {
    r.property = property_from_string(j.at("property").get<std::string>());
    r.params = j.at("params").get<AuditParams>();
    const auto v = j.at("verdict").get<std::string>();
    if (v != "holds" && v != "violated") throw std::invalid_argument("unknown verdict '" + v + "'");
    r.verdict = v == "holds" ? Verdict::Holds : Verdict::Violated;
    r.basis = j.at("basis").get<std::string>();
    r.checked = j.at("checked").get<std::string>();
    r.witnesses = j.at("witnesses").get<std::vector<Witness>>();
}

void to_json(json& j, const SimEstimate& e) {
    j = {{"mean_kills", e.mean_kills}, {"std_error", e.std_error}, {"reps", e.reps},
         {"seed", e.seed},             {"rng", e.rng},             {"label", e.label}};
}

void from_json(const json& j, SimEstimate& e) {
    e.mean_kills = j.at("mean_kills").get<double>();
    e.std_error = j.at("std_error").get<double>();
    e.reps = j.at("reps").get<std::int64_t>();
    e.seed = j.at("seed").get<std::uint64_t>();
    e.rng = j.at("rng").get<std::string>();
    e.label = j.at("label").get<std::string>();
}

TableExport export_table(const ValueTable& table) {
    TableExport t;
    t.a = table.sequence().values();
    t.u = table.sequence().u();
    t.n_max = table.n_max();
    t.t_max = table.t_max();
    t.root_tol = table.options().envelope.root_tol;
    t.scan_step = table.options().envelope.scan_step;
    for (int n = 1; n <= table.n_max(); ++n) {
        t.policy.push_back(table.policy(n));
        t.value.push_back(table.value(n));
    }
    for (int r = 0; r < table.n_max(); ++r) t.smoothed.push_back(table.smoothed(r));
    return t;
}

void to_json(json& j, const TableExport& t) {
    j["params"] = {{"a", t.a},         {"u", t.u},
                   {"n_max", t.n_max}, {"t_max", t.t_max},
                   {"root_tol", t.root_tol}, {"scan_step", t.scan_step}};
    json per_n = json::array();
    for (int n = 1; n <= t.n_max; ++n) {
        const auto i = static_cast<std::size_t>(n - 1);
        json entry = {{"n", n}, {"policy", t.policy[i]}, {"value_pieces", t.value[i]}};
        // N*(n,.) is stored for n < n_max only.
        if (static_cast<std::size_t>(n) < t.smoothed.size()) entry["smoothed_pieces"] = t.smoothed[static_cast<std::size_t>(n)];
        per_n.push_back(std::move(entry));
    }
    j["per_n"] = std::move(per_n);
}

void from_json(const json& j, TableExport& t) {
    const auto& p = j.at("params");
    t.a = p.at("a").get<std::vector<double>>();
    t.u = p.at("u").get<double>();
    t.n_max = p.at("n_max").get<int>();
    t.t_max = p.at("t_max").get<double>();
    t.root_tol = p.at("root_tol").get<double>();
    t.scan_step = p.at("scan_step").get<double>();
    t.policy.clear();
    t.value.clear();
    t.smoothed.assign(1, PiecewiseExpPoly::constant(0.0, t.t_max));
    for (const auto& e : j.at("per_n")) {
        t.policy.push_back(e.at("policy").get<PiecewisePolicy>());
        t.value.push_back(e.at("value_pieces").get<PiecewiseExpPoly>());
        if (e.contains("smoothed_pieces")) t.smoothed.push_back(e.at("smoothed_pieces").get<PiecewiseExpPoly>());
    }
    if (static_cast<int>(t.policy.size()) != t.n_max) throw std::invalid_argument("per_n length does not match n_max");
}

void write_policy_csv(std::ostream& os, const ValueTable& table) {
    const auto old = os.precision(17);
    os << "n,t_lo,t_hi,k\n";
    for (int n = 1; n <= table.n_max(); ++n) {
        for (const auto& iv : table.policy(n).intervals()) {
            os << n << ',' << iv.t_lo << ',' << iv.t_hi << ',' << iv.k << '\n';
        }
    }
    os.precision(old);
}

std::vector<PiecewisePolicy> read_policy_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("n,t_lo,t_hi,k", 0) != 0) {
        throw std::invalid_argument("policy CSV must start with header n,t_lo,t_hi,k");
    }
    std::map<int, std::vector<PolicyInterval>> rows;
    int line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::stringstream ss(line);
        PolicyInterval iv;
        int n = 0;
        char c1 = 0, c2 = 0, c3 = 0;
        if (!(ss >> n >> c1 >> iv.t_lo >> c2 >> iv.t_hi >> c3 >> iv.k) || c1 != ',' || c2 != ',' || c3 != ',') {
            throw std::invalid_argument("malformed policy CSV row at line " + std::to_string(line_no));
        }
        rows[n].push_back(iv);
    }
    std::vector<PiecewisePolicy> out;
    int expect = 1;
    for (auto& [n, iv] : rows) {
        if (n != expect++) throw std::invalid_argument("policy CSV must list n = 1, 2, ... without gaps");
        out.emplace_back(std::move(iv));
    }
    if (out.empty()) throw std::invalid_argument("policy CSV has no rows");
    return out;
}

void write_values_csv(std::ostream& os, const ValueTable& table, std::span<const double> times) {
    const auto old = os.precision(17);
    os << "t,n,N\n";
    for (double t : times) {
        for (int n = 1; n <= table.n_max(); ++n) os << t << ',' << n << ',' << table.value_at(n, t) << '\n';
    }
    os.precision(old);
}

}  // namespace fighter
