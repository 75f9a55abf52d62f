#include "fighter/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "fighter/audit.hpp"
#include "fighter/dp_solver.hpp"
#include "fighter/grid_oracle.hpp"
#include "fighter/serialize.hpp"
#include "fighter/simulator.hpp"

namespace fighter::cli {

namespace {

constexpr int kMaxN = 40;

class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Config {
    std::string command;
    std::optional<double> q;
    std::string a;
    double u = 0.0;
    int n_max = 5;
    double t_max = 6.0;
    double root_tol = 1e-10;
    std::string format = "text";
    std::string output;

    std::vector<double> times;
    double step = 0.1;

    std::string property = "C";
    std::vector<double> u_grid;
    std::vector<double> q_grid;
    int remark_n = 2;

    int n = 0;
    std::optional<double> t;
    double reps = 1e5;
    std::uint64_t seed = 20240601;
    std::vector<std::string> policies;
    bool engage_at_start = true;
    int workers = 1;

    double h = 1e-3;
    double tol = 1e-6;
};

std::string fmt(double x, int digits = 10) {
    std::ostringstream os;
    os << std::setprecision(digits) << x;
    return os.str();
}

json num_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

KillSequence make_sequence(const Config& c, double u) {
    if (c.q) return KillSequence::geometric(*c.q, c.n_max, u);
    return KillSequence::parse(c.a, u);
}

SolverOptions solver_options(const Config& c) {
    SolverOptions o;
    o.envelope.root_tol = c.root_tol;
    return o;
}

void check_u(double u, const char* what) {
    if (!(u >= 0.0 && u <= 1.0)) throw InputError(std::string(what) + " out of [0,1]");
}

void validate(Config& c) {
    if (c.q && !c.a.empty()) throw InputError("give exactly one of --q / --a");
    if (!c.q && c.a.empty()) {
        if (c.command != "counterexample") throw InputError("one of --q / --a is required");
        c.q = 0.5;
    }
    check_u(c.u, "u");
    for (double u : c.u_grid) check_u(u, "u-grid entry");
    if (c.n_max < 1 || c.n_max > kMaxN) throw InputError("n_max must be in [1, " + std::to_string(kMaxN) + "]");
    if (!(c.t_max > 0.0) || !std::isfinite(c.t_max)) throw InputError("t_max must be a positive number");
    if (!(c.root_tol > 0.0)) throw InputError("root-tol must be > 0");
    if (!(c.step > 0.0)) throw InputError("step must be > 0");
    if (!(c.reps >= 1.0) || c.reps != std::floor(c.reps) || c.reps > 1e12) {
        throw InputError("reps must be a positive integer");
    }
    if (c.workers < 1 || c.workers > 256) throw InputError("workers must be in [1, 256]");
    if (!(c.h > 0.0)) throw InputError("h must be > 0");
    if (!(c.tol > 0.0)) throw InputError("tol must be > 0");
    for (double q : c.q_grid) {
        if (!(q > 0.0 && q < 1.0)) throw InputError("q out of (0,1)");
    }
    const auto seq = make_sequence(c, c.u);
    if (seq.j_max() < c.n_max) {
        throw InputError("kill sequence has j_max = " + std::to_string(seq.j_max()) + " < n_max = " +
                         std::to_string(c.n_max));
    }
}

// Policy display in indicator notation, e.g. 3 I(t < 0.405) + 2 I(t >= 0.405).
std::string indicator(int n, const PiecewisePolicy& p) {
    std::ostringstream os;
    os << "K(" << n << ",t) = ";
    const auto& iv = p.intervals();
    if (iv.size() == 1) {
        os << iv.front().k;
        return os.str();
    }
    for (std::size_t i = 0; i < iv.size(); ++i) {
        if (i) os << " + ";
        os << iv[i].k << " I(";
        if (i == 0) {
            os << "t < " << fmt(iv[i].t_hi);
        } else if (i + 1 == iv.size()) {
            os << "t >= " << fmt(iv[i].t_lo);
        } else {
            os << fmt(iv[i].t_lo) << " <= t < " << fmt(iv[i].t_hi);
        }
        os << ")";
    }
    return os.str();
}

std::string describe(const Config& c, double u) {
    std::ostringstream os;
    if (c.q) {
        os << "q = " << fmt(*c.q);
    } else {
        os << "a = " << c.a;
    }
    os << ", u = " << fmt(u) << ", n_max = " << c.n_max << ", t in [0, " << fmt(c.t_max) << "]";
    return os.str();
}

int cmd_solve(const Config& c, std::ostream& os) {
    const auto table = solve(make_sequence(c, c.u), c.n_max, c.t_max, solver_options(c));
    if (c.format == "json") {
        os << json(export_table(table)).dump(2) << '\n';
    } else if (c.format == "csv") {
        write_policy_csv(os, table);
    } else {
        os << describe(c, c.u) << '\n';
        for (int n = 1; n <= c.n_max; ++n) os << indicator(n, table.policy(n)) << '\n';
        for (int n = 1; n <= c.n_max; ++n) {
            os << "N(" << n << ", " << fmt(c.t_max) << ") = " << fmt(table.value_at(n, c.t_max), 15) << '\n';
        }
    }
    return kOk;
}

int cmd_value(const Config& c, std::ostream& os) {
    const auto table = solve(make_sequence(c, c.u), c.n_max, c.t_max, solver_options(c));
    auto times = c.times.empty() ? uniform_grid(c.t_max, c.step) : c.times;
    for (double t : times) {
        if (!(t >= 0.0 && t <= c.t_max)) throw InputError("time " + fmt(t) + " outside [0, t_max]");
    }
    if (c.format == "csv") {
        write_values_csv(os, table, times);
    } else if (c.format == "json") {
        json j = json::array();
        for (double t : times) {
            for (int n = 1; n <= c.n_max; ++n) j.push_back({{"t", t}, {"n", n}, {"N", table.value_at(n, t)}});
        }
        os << j.dump(2) << '\n';
    } else {
        os << describe(c, c.u) << '\n' << std::setw(10) << "t";
        for (int n = 1; n <= c.n_max; ++n) os << std::setw(18) << ("N(" + std::to_string(n) + ",t)");
        os << '\n';
        for (double t : times) {
            os << std::setw(10) << fmt(t, 6);
            for (int n = 1; n <= c.n_max; ++n) os << std::setw(18) << fmt(table.value_at(n, t), 12);
            os << '\n';
        }
    }
    return kOk;
}

int cmd_thresholds(const Config& c, std::ostream& os) {
    const auto table = solve(make_sequence(c, c.u), c.n_max, c.t_max, solver_options(c));
    std::vector<std::vector<Threshold>> rows;
    for (int n = 1; n <= c.n_max; ++n) rows.push_back(thresholds(table, n));

    std::optional<AuditReport> interlace;
    std::string interlace_note;
    try {
        interlace = audit_range_and_interlace(table).interlace;
    } catch (const AuditError& e) {
        interlace_note = e.what();
    }

    if (c.format == "json") {
        json j;
        j["params"] = {{"a", table.sequence().values()}, {"u", c.u}, {"n_max", c.n_max}, {"t_max", c.t_max}};
        json per_n = json::array();
        for (int n = 1; n <= c.n_max; ++n) {
            json ts = json::array();
            for (const auto& th : rows[static_cast<std::size_t>(n - 1)]) {
                ts.push_back({{"j", th.j}, {"t", th.t ? json(*th.t) : json(nullptr)}});
            }
            per_n.push_back({{"n", n}, {"thresholds", ts}});
        }
        j["per_n"] = per_n;
        j["interlace"] = interlace ? json(*interlace) : json(interlace_note);
        os << j.dump(2) << '\n';
    } else if (c.format == "csv") {
        const auto old = os.precision(17);
        os << "n,j,t\n";
        for (int n = 1; n <= c.n_max; ++n) {
            for (const auto& th : rows[static_cast<std::size_t>(n - 1)]) {
                os << n << ',' << th.j << ',';
                if (th.t) os << *th.t;
                os << '\n';
            }
        }
        os.precision(old);
    } else {
        os << describe(c, c.u) << '\n';
        os << "t(n,j): K(n,.) drops from j+1 to j\n";
        for (int n = 1; n <= c.n_max; ++n) {
            os << "n = " << n << ':';
            for (const auto& th : rows[static_cast<std::size_t>(n - 1)]) {
                os << "  t(" << n << ',' << th.j << ") = " << (th.t ? fmt(*th.t) : std::string("> t_max"));
            }
            os << '\n';
        }
        if (interlace) {
            os << "interlacing t(n,j+1) < t(n+1,j+1) < t(n,j): " << to_string(interlace->verdict) << '\n';
        } else {
            os << "interlacing not checked: " << interlace_note << '\n';
        }
    }
    return kOk;
}

void render_report(std::ostream& os, const AuditReport& r) {
    os << "property " << to_string(r.property) << "  u = " << fmt(r.params.u);
    if (r.params.q) os << "  q = " << fmt(*r.params.q);
    os << "  n_max = " << r.params.n_max << "  t_max = " << fmt(r.params.t_max) << '\n';
    os << "  verdict: " << to_string(r.verdict) << "  (" << r.basis << ")\n";
    os << "  checked: " << r.checked << '\n';
    for (const auto& w : r.witnesses) {
        os << "  witness:";
        if (w.k || w.k2) {
            os << " K(" << w.n << ", " << fmt(w.t) << ") = " << w.k << " vs K(" << w.n2 << ", " << fmt(w.t2)
               << ") = " << w.k2;
        } else {
            os << " n = " << w.n << ", t = " << fmt(w.t) << ": value " << fmt(w.value) << " vs bound "
               << fmt(w.bound);
        }
        if (!w.note.empty()) os << "  " << w.note;
        os << '\n';
    }
}

Property parse_property(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::toupper(ch); });
    std::replace(s.begin(), s.end(), '-', '_');
    try {
        return property_from_string(s);
    } catch (const std::invalid_argument&) {
        throw InputError("unknown property '" + s + "' (A, B, C, RANGE, INTERLACE, CONCAVE_N, TP2, LIMITS, REMARK)");
    }
}

int cmd_audit(const Config& c, std::ostream& os) {
    const auto prop = parse_property(c.property);
    std::vector<AuditReport> reports;
    if (prop == Property::Remark) {
        if (!c.q || c.q_grid.empty()) throw InputError("REMARK needs --q (geometric sequence) and --q-grid");
        if (c.u != 0.0 || !c.u_grid.empty()) throw InputError("REMARK is defined for u = 0 only");
        if (c.remark_n < 2 || c.remark_n > c.n_max) throw InputError("--remark-n must be in [2, n_max]");
        std::vector<ValueTable> tables;
        for (double q : c.q_grid) {
            tables.push_back(solve(KillSequence::geometric(q, c.n_max, 0.0), c.n_max, c.t_max, solver_options(c)));
        }
        reports.push_back(audit_remark_regime(tables, c.remark_n));
    } else {
        const auto us = c.u_grid.empty() ? std::vector<double>{c.u} : c.u_grid;
        const auto probes = uniform_grid(c.t_max, c.step);
        for (double u : us) {
            const auto table = solve(make_sequence(c, u), c.n_max, c.t_max, solver_options(c));
            switch (prop) {
                case Property::A: reports.push_back(audit_A(table, probes)); break;
                case Property::B: reports.push_back(audit_B(table, probes)); break;
                case Property::C: reports.push_back(audit_C(table, probes)); break;
                case Property::Range: reports.push_back(audit_range_and_interlace(table).range); break;
                case Property::Interlace: reports.push_back(audit_range_and_interlace(table).interlace); break;
                case Property::ConcaveN: reports.push_back(audit_concave_n(table, probes)); break;
                case Property::TP2: reports.push_back(audit_tp2(table, probes)); break;
                case Property::Limits: reports.push_back(audit_limits(table)); break;
                case Property::Remark: break;
            }
        }
    }

    if (c.format == "json") {
        os << json(reports).dump(2) << '\n';
    } else if (c.format == "csv") {
        os << "property,u,q,n_max,t_max,verdict,witnesses\n";
        for (const auto& r : reports) {
            os << to_string(r.property) << ',' << r.params.u << ',' << (r.params.q ? fmt(*r.params.q, 17) : "")
               << ',' << r.params.n_max << ',' << r.params.t_max << ',' << to_string(r.verdict) << ','
               << r.witnesses.size() << '\n';
        }
    } else {
        for (const auto& r : reports) render_report(os, r);
    }
    return kOk;
}

struct Check {
    std::string name;
    double expected;
    double actual;
    double tol;
    bool pass;
};

Check check(std::string name, double expected, double actual, double tol) {
    const bool pass = std::isfinite(actual) && std::abs(actual - expected) <= tol;
    return {std::move(name), expected, actual, tol, pass};
}

// Switch times and allocation sequence of one policy display.
void check_policy(std::vector<Check>& out, const ValueTable& table, int n, const std::vector<int>& ks,
                  const std::vector<double>& switches, double last_tol) {
    const auto& iv = table.policy(n).intervals();
    const std::string label = "K(" + std::to_string(n) + ",.)";
    out.push_back(check(label + " pieces", static_cast<double>(ks.size()), static_cast<double>(iv.size()), 0.0));
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const double k = i < iv.size() ? iv[i].k : std::nan("");
        out.push_back(check(label + " piece " + std::to_string(i + 1) + " allocation", ks[i], k, 0.0));
    }
    for (std::size_t i = 0; i < switches.size(); ++i) {
        const double t = i + 1 < iv.size() ? iv[i + 1].t_lo : std::nan("");
        const double tol = i + 1 == switches.size() ? last_tol : 1e-6;
        out.push_back(check(label + " switch " + std::to_string(iv.size() > i + 1 ? iv[i].k : 0) + "->" +
                                std::to_string(iv.size() > i + 1 ? iv[i + 1].k : 0),
                            switches[i], t, tol));
    }
}

// First crossing of N_n(j_hi,.) and N_n(j_lo,.).
std::optional<double> crossing(const ValueTable& table, int n, int j_hi, int j_lo) {
    const auto d = difference(table.candidate(n, j_hi), table.candidate(n, j_lo));
    for (std::size_t k = 0; k < d.size(); ++k) {
        const auto p = d.piece(k);
        if (auto r = find_root(p.f, p.t_lo, p.t_hi, 1e-13)) return r;
    }
    return std::nullopt;
}

int cmd_counterexample(const Config& c, std::ostream& os) {
    constexpr double kWitnessT = 3.0;
    if (c.n_max < 5) throw InputError("counterexample needs n_max >= 5");
    if (c.t_max < kWitnessT) throw InputError("t_max below counterexample region (need t_max >= 3)");
    const bool fixture = c.q && *c.q == 0.5 && c.u == 0.0;

    const auto table = solve(make_sequence(c, c.u), c.n_max, c.t_max, solver_options(c));
    const auto root = crossing(table, 5, 3, 2);
    const int k4 = table.policy_at(4, kWitnessT);
    const int k5 = table.policy_at(5, kWitnessT);
    const auto b = audit_B(table, uniform_grid(c.t_max, 0.5));
    bool persists = false;
    for (const auto& w : b.witnesses) persists = persists || (w.n == 4 && w.n2 == 5);

    std::vector<Check> checks;
    if (fixture) {
        const double l32 = std::log(1.5), l76 = std::log(7.0 / 6.0), l1514 = std::log(15.0 / 14.0);
        check_policy(checks, table, 2, {2}, {}, 0.0);
        check_policy(checks, table, 3, {3, 2}, {l32}, 1e-6);
        check_policy(checks, table, 4, {4, 3}, {l76}, 1e-6);
        check_policy(checks, table, 5, {5, 4, 3, 2}, {l1514, l32, 2.694}, 1e-3);
        const auto& iv5 = table.policy(5).intervals();
        checks.push_back(check("crossing root vs K(5,.) last switch", iv5.back().t_lo,
                               root ? *root : std::nan(""), 1e-8));
        checks.push_back(check("K(4,3)", 3, k4, 0.0));
        checks.push_back(check("K(5,3)", 2, k5, 0.0));
    }
    const bool all_pass = std::all_of(checks.begin(), checks.end(), [](const Check& x) { return x.pass; });

    if (c.format == "json") {
        json j;
        j["mode"] = fixture ? "fixture" : "exploratory";
        j["params"] = {{"a", table.sequence().values()}, {"u", c.u}, {"n_max", c.n_max}, {"t_max", c.t_max}};
        if (c.q) j["params"]["q"] = *c.q;
        json pol = json::array();
        for (int n = 2; n <= 5; ++n) pol.push_back({{"n", n}, {"intervals", table.policy(n)}});
        j["policies"] = pol;
        j["crossing_5_3_2"] = root ? json(*root) : json(nullptr);
        j["witness"] = {{"t", kWitnessT}, {"K4", k4}, {"K5", k5}};
        j["b_violation_4_5"] = persists;
        j["audit_B"] = b;
        json cj = json::array();
        for (const auto& x : checks) {
            cj.push_back({{"name", x.name}, {"expected", x.expected}, {"actual", num_or_null(x.actual)},
                          {"tol", x.tol}, {"pass", x.pass}});
        }
        j["checks"] = cj;
        j["pass"] = all_pass;
        os << j.dump(2) << '\n';
    } else if (c.format == "csv") {
        const auto old = os.precision(17);
        os << "name,expected,actual,tol,pass\n";
        for (const auto& x : checks) {
            os << '"' << x.name << "\"," << x.expected << ',' << x.actual << ',' << x.tol << ','
               << (x.pass ? "true" : "false") << '\n';
        }
        os.precision(old);
    } else {
        os << (fixture ? "Frail fighter counterexample: " : "Counterexample region, exploratory: ")
           << describe(c, c.u) << '\n';
        for (int n = 2; n <= 5; ++n) os << indicator(n, table.policy(n)) << '\n';
        os << "N_5(3,t) = N_5(2,t) at t = " << (root ? fmt(*root, 12) : std::string("none in range")) << '\n';
        os << "at t = " << fmt(kWitnessT) << ": K(4,t) = " << k4 << ", K(5,t) = " << k5 << '\n';
        os << "K(4,t) > K(5,t) somewhere in range: " << (persists ? "yes" : "no") << '\n';
        if (fixture) {
            for (const auto& x : checks) {
                os << (x.pass ? "  PASS " : "  FAIL ") << x.name << ": expected " << fmt(x.expected, 12)
                   << ", got " << fmt(x.actual, 12) << ", tol " << x.tol << '\n';
            }
            os << (all_pass ? "all fixtures match\n" : "fixture mismatch\n");
        } else {
            os << "exploratory: no fixtures for these parameters\n";
        }
    }
    return all_pass ? kOk : kFixtureMismatch;
}

std::vector<PiecewisePolicy> load_policy_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open policy table '" + path + "'");
    in >> std::ws;
    const int first = in.peek();
    if (first == '{' || first == '[') {
        try {
            const auto j = json::parse(in);
            if (j.is_object()) return j.get<TableExport>().policy;
            return j.get<std::vector<PiecewisePolicy>>();
        } catch (const json::exception& e) {
            throw InputError("bad policy table '" + path + "': " + e.what());
        }
    }
    return read_policy_csv(in);
}

int cmd_simulate(const Config& c, std::ostream& os) {
    const int n = c.n ? c.n : c.n_max;
    if (n < 1 || n > c.n_max) throw InputError("--n must be in [1, n_max]");
    const double t = c.t.value_or(c.t_max);
    if (!(t >= 0.0 && t <= c.t_max)) throw InputError("--t must be in [0, t_max]");
    const auto seq = make_sequence(c, c.u);
    const auto specs = c.policies.empty() ? std::vector<std::string>{"optimal"} : c.policies;

    std::optional<ValueTable> table;
    const auto need_table = [&]() -> const ValueTable& {
        if (!table) table.emplace(solve(seq, c.n_max, c.t_max, solver_options(c)));
        return *table;
    };

    std::vector<NamedPolicy> policies;
    for (const auto& s : specs) {
        if (s == "optimal") {
            policies.push_back({s, optimal_policy(need_table())});
        } else if (s == "all-in") {
            policies.push_back({s, all_in_policy()});
        } else if (s.rfind("const:", 0) == 0) {
            int k = 0;
            std::size_t used = 0;
            try {
                k = std::stoi(s.substr(6), &used);
            } catch (const std::exception&) {
            }
            if (used == 0 || used != s.size() - 6 || k < 1) throw InputError("bad policy '" + s + "'");
            policies.push_back({s, constant_policy(k)});
        } else if (s.rfind("table:", 0) == 0) {
            policies.push_back({s, tabulated_policy(load_policy_table(s.substr(6)))});
        } else {
            throw InputError("unknown policy '" + s + "' (optimal, all-in, const:k, table:<file>)");
        }
    }

    SimOptions opts;
    opts.engage_at_start = c.engage_at_start;
    opts.workers = c.workers;
    const auto reps = static_cast<std::int64_t>(c.reps);
    const auto est = compare_policies(seq, n, t, policies, reps, c.seed, opts);

    std::optional<double> exact;
    if (table) {
        if (c.engage_at_start) {
            exact = table->value_at(n, t);
        } else if (n < c.n_max) {
            exact = table->smoothed(n)(t);
        }
    }

    if (c.format == "json") {
        json j = {{"n", n}, {"t", t}, {"engage_at_start", c.engage_at_start}, {"workers", c.workers},
                  {"estimates", est}};
        j["exact_optimal"] = exact ? json(*exact) : json(nullptr);
        os << j.dump(2) << '\n';
    } else if (c.format == "csv") {
        const auto old = os.precision(17);
        os << "label,mean_kills,std_error,reps,seed,rng\n";
        for (const auto& e : est) {
            os << e.label << ',' << e.mean_kills << ',' << e.std_error << ',' << e.reps << ',' << e.seed << ','
               << e.rng << '\n';
        }
        os.precision(old);
    } else {
        os << describe(c, c.u) << "; n = " << n << ", t = " << fmt(t) << ", "
           << (c.engage_at_start ? "enemy present at start" : "first enemy after an exponential wait") << '\n';
        os << "reps = " << reps << ", seed = " << c.seed << ", rng = " << SplitMix64::kAlgorithm << '\n';
        for (const auto& e : est) {
            os << "  " << std::left << std::setw(24) << e.label << std::right << " mean kills " << fmt(e.mean_kills)
               << " +/- " << fmt(e.std_error, 3) << '\n';
        }
        if (exact) os << "exact optimal value: " << fmt(*exact, 12) << '\n';
    }
    return kOk;
}

struct Disagreement {
    int n;
    double t_lo;
    double t_hi;
    int k_exact;
    int k_grid;
};

int cmd_oracle_diff(const Config& c, std::ostream& os) {
    const auto seq = make_sequence(c, c.u);
    const auto table = solve(seq, c.n_max, c.t_max, solver_options(c));
    const auto grid = solve_grid(seq, c.n_max, c.t_max, c.h);

    double worst = 0.0;
    std::vector<std::pair<double, double>> per_n;  // (max diff, where)
    std::vector<Disagreement> dis;
    for (int n = 1; n <= c.n_max; ++n) {
        double m = 0.0, at = 0.0;
        const auto& row = grid.N[static_cast<std::size_t>(n)];
        const auto& krow = grid.K[static_cast<std::size_t>(n)];
        for (std::size_t i = 0; i < grid.t.size(); ++i) {
            const double t = grid.t[i];
            const double d = std::abs(table.value_at(n, t) - row[i]);
            if (d > m) {
                m = d;
                at = t;
            }
            const int ke = table.policy_at(n, t);
            if (ke == krow[i]) continue;
            if (!dis.empty() && dis.back().n == n && dis.back().k_exact == ke && dis.back().k_grid == krow[i] &&
                i > 0 && dis.back().t_hi == grid.t[i - 1]) {
                dis.back().t_hi = t;
            } else {
                dis.push_back({n, t, t, ke, krow[i]});
            }
        }
        per_n.emplace_back(m, at);
        worst = std::max(worst, m);
    }
    const bool ok = worst <= c.tol;

    if (c.format == "json") {
        json j = {{"h", c.h}, {"tol", c.tol}, {"max_abs_diff", worst}, {"within_tol", ok}};
        j["params"] = {{"a", seq.values()}, {"u", c.u}, {"n_max", c.n_max}, {"t_max", c.t_max}};
        json pn = json::array();
        for (int n = 1; n <= c.n_max; ++n) {
            const auto& [m, at] = per_n[static_cast<std::size_t>(n - 1)];
            pn.push_back({{"n", n}, {"max_abs_diff", m}, {"at_t", at}});
        }
        j["per_n"] = pn;
        json dj = json::array();
        for (const auto& d : dis) {
            dj.push_back({{"n", d.n}, {"t_lo", d.t_lo}, {"t_hi", d.t_hi}, {"k_exact", d.k_exact}, {"k_grid", d.k_grid}});
        }
        j["policy_disagreements"] = dj;
        os << j.dump(2) << '\n';
    } else if (c.format == "csv") {
        const auto old = os.precision(17);
        os << "n,max_abs_diff,at_t\n";
        for (int n = 1; n <= c.n_max; ++n) {
            const auto& [m, at] = per_n[static_cast<std::size_t>(n - 1)];
            os << n << ',' << m << ',' << at << '\n';
        }
        os.precision(old);
    } else {
        os << describe(c, c.u) << ", grid h = " << fmt(c.h) << '\n';
        for (int n = 1; n <= c.n_max; ++n) {
            const auto& [m, at] = per_n[static_cast<std::size_t>(n - 1)];
            os << "  n = " << n << ": max |N_exact - N_grid| = " << fmt(m, 3) << " at t = " << fmt(at, 6) << '\n';
        }
        os << "max |dN| = " << fmt(worst, 3) << (ok ? " <= " : " > ") << fmt(c.tol, 3) << '\n';
        if (dis.empty()) {
            os << "policies agree at every grid node\n";
        } else {
            for (const auto& d : dis) {
                os << "  K(" << d.n << ",t) differs on nodes [" << fmt(d.t_lo) << ", " << fmt(d.t_hi)
                   << "]: exact " << d.k_exact << ", grid " << d.k_grid << '\n';
            }
        }
    }
    return ok ? kOk : kNumericalFailure;
}

void add_common(CLI::App* sub, Config& c) {
    auto* q = sub->add_option("--q", "geometric kill sequence a(j) = 1 - q^j, q in (0,1)");
    q->each([&c](const std::string& s) {
        try {
            c.q = std::stod(s);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--q", "not a number: " + s);
        }
    });
    auto* a = sub->add_option("--a", c.a, "explicit kill sequence, e.g. 0,0.5,0.75,0.875");
    q->excludes(a);
    sub->add_option("--u", c.u, "probability of surviving a failed engagement, in [0,1]");
    sub->add_option("--n-max", c.n_max, "largest missile count");
    sub->add_option("--t-max", c.t_max, "time horizon");
    sub->add_option("--root-tol", c.root_tol, "switch-time bracket width");
    sub->add_option("--format", c.format, "output format")->check(CLI::IsMember({"json", "csv", "text"}));
    sub->add_option("--output", c.output, "write the report to this file");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Config c;
    CLI::App app{"Optimal missile allocation for the Fighter problem", "fighter"};
    app.require_subcommand(1);

    auto* solve_cmd = app.add_subcommand("solve", "exact policy and value tables");
    add_common(solve_cmd, c);

    auto* value_cmd = app.add_subcommand("value", "N(n,t) on a time grid");
    add_common(value_cmd, c);
    value_cmd->add_option("--times", c.times, "explicit times")->delimiter(',');
    value_cmd->add_option("--step", c.step, "grid step when --times is not given");

    auto* thr_cmd = app.add_subcommand("thresholds", "switch times t(n,j) for u = 1");
    add_common(thr_cmd, c);

    auto* audit_cmd = app.add_subcommand("audit", "check a structural property");
    add_common(audit_cmd, c);
    audit_cmd->add_option("--property", c.property,
                          "A, B, C, RANGE, INTERLACE, CONCAVE_N, TP2, LIMITS or REMARK");
    audit_cmd->add_option("--u-grid", c.u_grid, "u values to audit")->delimiter(',');
    audit_cmd->add_option("--q-grid", c.q_grid, "q values (REMARK)")->delimiter(',');
    audit_cmd->add_option("--remark-n", c.remark_n, "missile count n (REMARK)");
    audit_cmd->add_option("--step", c.step, "probe spacing");

    auto* cx_cmd = app.add_subcommand("counterexample", "frail fighter counterexample self-test");
    add_common(cx_cmd, c);

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of expected kills");
    add_common(sim_cmd, c);
    sim_cmd->add_option("--n", c.n, "missiles at the start (default n_max)");
    sim_cmd->add_option("--t", "time remaining (default t_max)")->each([&c](const std::string& s) {
        try {
            c.t = std::stod(s);
        } catch (const std::exception&) {
            throw CLI::ValidationError("--t", "not a number: " + s);
        }
    });
    sim_cmd->add_option("--reps", c.reps, "replications");
    sim_cmd->add_option("--seed", c.seed, "random seed");
    sim_cmd->add_option("--policy", c.policies, "optimal, all-in, const:k or table:<file>; repeatable");
    sim_cmd->add_flag("--engage-at-start,!--wait-for-first", c.engage_at_start,
                      "an enemy is present at time 0 (default) or arrives after an exponential wait");
    sim_cmd->add_option("--workers", c.workers, "worker threads");

    auto* od_cmd = app.add_subcommand("oracle-diff", "exact engine vs fixed-step grid oracle");
    add_common(od_cmd, c);
    od_cmd->set_help_flag("--help", "Print this help message and exit");
    od_cmd->add_option("--h", c.h, "grid step");
    od_cmd->add_option("--tol", c.tol, "allowed max |dN|");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kInputError;
    }
    c.command = app.get_subcommands().front()->get_name();

    try {
        validate(c);
        std::ofstream file;
        if (!c.output.empty()) {
            file.open(c.output);
            if (!file) throw InputError("cannot open output file '" + c.output + "'");
        }
        std::ostream& os = c.output.empty() ? out : file;
        int code = kOk;
        if (c.command == "solve") code = cmd_solve(c, os);
        else if (c.command == "value") code = cmd_value(c, os);
        else if (c.command == "thresholds") code = cmd_thresholds(c, os);
        else if (c.command == "audit") code = cmd_audit(c, os);
        else if (c.command == "counterexample") code = cmd_counterexample(c, os);
        else if (c.command == "simulate") code = cmd_simulate(c, os);
        else code = cmd_oracle_diff(c, os);
        os.flush();
        if (!os) throw std::runtime_error("failed writing output");
        return code;
    } catch (const DegreeOverflow& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::logic_error& e) {
        // NotInvincible, out_of_range and friends: the request does not fit the model.
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const AuditError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const PolicyError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}

}  // namespace fighter::cli
