#pragma once

#include "nildyn/averages/jstar.hpp"
#include "nildyn/averages/nilfunction.hpp"
#include "nildyn/averages/potts.hpp"
#include "nildyn/cli/config.hpp"
#include "nildyn/proximality/cubes.hpp"
#include "nildyn/proximality/density.hpp"
#include "nildyn/proximality/hausdorff.hpp"
#include "nildyn/proximality/returns.hpp"
#include "nildyn/proximality/witness.hpp"
#include "nildyn/suspension/suspension.hpp"

#include <functional>
#include <map>
#include <variant>

namespace nildyn::cli {

using Artifact = std::variant<PointCloud, TimeSeries>;

/// Inputs of one dispatched operation and what it produced besides its result.
struct OpContext {
    const json& params;
    const Basis& basis;
    const std::optional<SystemHandle>& sys;
    const std::optional<SystemHandle>& sys_h;
    std::uint64_t seed = 0;

    std::uint64_t budget_consumed = 0;
    bool exhausted = false;
    std::vector<std::pair<std::string, Artifact>> artifacts;

    const SystemHandle& system() const { return *sys; }
    const SystemHandle& system_h() const { return *sys_h; }
    bool has(const char* key) const { return params.contains(key); }
    double num(const char* key) const { return params.at(key).get<double>(); }
    std::uint64_t count(const char* key) const { return params.at(key).get<std::uint64_t>(); }
    int integer(const char* key) const { return params.at(key).get<int>(); }
    Point point(const char* key) const { return parse_point(params.at(key), basis); }
    std::vector<double> alphas_or(int d) const {
        if (has("alphas")) return parse_alphas(params.at("alphas"));
        std::vector<double> a;
        for (int j = 1; j <= d; ++j) a.push_back(j);
        return a;
    }
};

inline json stats_json(const SearchStats& s) {
    return {{"evaluations", s.evaluations},
            {"g_tuples", s.g_tuples},
            {"refined_tuples", s.refined_tuples},
            {"max_shell", s.max_shell},
            {"best_gap", s.best_gap}};
}

inline json witness_json(const RPWitness& w, bool verified) {
    json g = json::array();
    for (double v : w.g) g.push_back(v);
    return {{"x_prime", point_json(w.x_prime)},
            {"y_prime", point_json(w.y_prime)},
            {"g", g},
            {"delta", w.delta},
            {"achieved", w.achieved},
            {"verified", verified}};
}

inline json outcome_json(const SystemHandle& sys, const Point& x, const Point& y, const SearchOutcome& o) {
    json j{{"status", std::string(to_string(o.status))}, {"method", o.method}};
    if (o.witness) j["witness"] = witness_json(*o.witness, rp_witness_verify(sys, x, y, *o.witness, o.witness->delta));
    if (o.status == SearchStatus::ProvenAbsent) j["certified_scale"] = o.certified_scale;
    j["stats"] = stats_json(o.stats);
    return j;
}

inline json element_json(const HeisenbergElement& g) { return json::array({g.x, g.y, g.z}); }

inline json elements_json(const std::vector<HeisenbergElement>& gs) {
    json a = json::array();
    for (const auto& g : gs) a.push_back(element_json(g));
    return a;
}

inline json susp_point_json(const SuspensionPoint& p) { return {{"base", point_json(p.base)}, {"height", p.height}}; }

inline json spectrum_json(const TrigSpectrum& s) {
    json a = json::array();
    for (const auto& [lambda, c] : s.terms) a.push_back({{"lambda", lambda}, {"coeff", complex_json(c)}});
    return a;
}

inline json estimate_json(const Estimate& e) {
    return {{"value", complex_json(e.value)}, {"stderr", e.stderr_}, {"method", e.method}, {"samples", e.samples}};
}

inline json coverage_json(const Coverage& c) {
    return {{"coverage", c.fraction}, {"cells_hit", c.cells_hit}, {"cells_total", c.cells_total}, {"samples", c.samples}};
}

inline json manifest_json(const PointCloud& c) {
    const auto& p = c.provenance();
    return {{"system", p.system},
            {"generator", p.generator},
            {"budget", p.budget},
            {"seed", p.seed},
            {"tuples", c.size()},
            {"arity", c.arity()},
            {"dim", c.dim()}};
}

namespace ops {

inline json minimal(OpContext& c) {
    const auto& sys = c.system();
    std::vector<SymbolicReal> vals;
    std::string mode;
    if (c.has("t")) {
        mode = "time-t";
        if (!sys.is_flow()) throw std::invalid_argument("time-t minimality needs a flow");
        vals = time_t_frequencies(sys, parse_exact(c.params["t"], c.basis), c.basis);
    } else {
        mode = sys.is_flow() ? "flow" : "map";
        vals = nildyn::detail::exact_frequencies(sys);
        if (!sys.is_flow()) vals.insert(vals.begin(), SymbolicReal(1));
    }
    auto r = rationally_independent(vals, c.basis);
    json values = json::array();
    for (const auto& v : vals) values.push_back(v.str());
    json out{{"minimal", r.independent}, {"mode", mode}, {"values", values}};
    if (!r.independent) {
        json rel = json::array();
        for (const auto& q : r.relation) rel.push_back(to_string(q));
        out["relation"] = rel;
    }
    c.budget_consumed = 1;
    return out;
}

inline json exceptional(OpContext& c) {
    json rows = json::array(), exceptional = json::array();
    for (const auto& t : c.params["times"]) {
        auto ts = parse_exact(t, c.basis);
        bool m = time_t_minimal(c.system(), ts, c.basis);
        rows.push_back({{"t", ts.str()}, {"minimal", m}});
        if (!m) exceptional.push_back(ts.str());
    }
    c.budget_consumed = rows.size();
    return {{"times", rows}, {"exceptional", exceptional}, {"exceptional_count", exceptional.size()}};
}

inline json rp_certify(OpContext& c) {
    auto x = c.point("x"), y = c.point("y");
    SearchOptions opt;
    opt.dt = c.num("dt");
    opt.refine = c.integer("refine");
    auto o = rp_witness_search(c.system(), x, y, c.integer("d"), c.num("delta"), c.count("budget"), opt);
    c.budget_consumed = o.stats.evaluations;
    c.exhausted = o.status == SearchStatus::Exhausted;
    return outcome_json(c.system(), x, y, o);
}

inline json rp_transfer(OpContext& c) {
    auto x = c.point("x"), y = c.point("y");
    int d = c.integer("d");
    double delta = c.num("delta");
    double delta_out = c.has("delta_out") ? c.num("delta_out") : 3 * delta;
    auto budget = c.count("budget");
    auto g = rp_witness_search(c.system(), x, y, d, delta, budget, {});
    json out{{"delta_out", delta_out}, {"g_search", outcome_json(c.system(), x, y, g)}};
    c.budget_consumed = g.stats.evaluations;
    if (g.status != SearchStatus::Found) {
        c.exhausted = g.status == SearchStatus::Exhausted;
        out["transferred"] = false;
        return out;
    }
    auto h = commuting_rp_transfer(c.system(), c.system_h(), x, y, *g.witness, delta_out, budget, {});
    c.budget_consumed += h.stats.evaluations;
    c.exhausted = h.status == SearchStatus::Exhausted;
    out["transfer"] = outcome_json(c.system_h(), x, y, h);
    out["transferred"] = h.status == SearchStatus::Found && rp_witness_verify(c.system_h(), x, y, *h.witness, delta_out);
    return out;
}

inline json cube(OpContext& c) {
    auto cloud = cube_orbit_sample(c.system(), c.point("x"), c.integer("d"), c.count("budget"), c.seed,
                                   {c.num("horizon")});
    json out{{"manifest", manifest_json(cloud)}};
    c.budget_consumed = cloud.size();
    c.artifacts.emplace_back("cube", std::move(cloud));
    return out;
}

inline json nd_compare(OpContext& c) {
    auto x = c.point("x");
    int d = c.integer("d");
    auto budget = c.count("budget");
    SamplingOptions so{c.num("horizon")};
    auto alphas = c.alphas_or(d);
    check_commuting(c.system(), c.system_h());
    auto qg = cube_orbit_sample(c.system(), x, d, budget, derive_seed(c.seed, 1), so);
    auto qh = cube_orbit_sample(c.system_h(), x, d, budget, derive_seed(c.seed, 2), so);
    auto ng = nd_sample(c.system(), x, d, budget, derive_seed(c.seed, 3), alphas, so);
    auto nh = nd_sample(c.system_h(), x, d, budget, derive_seed(c.seed, 4), alphas, so);
    double hq = hausdorff_distance(c.system(), qg, qh);
    double hn = hausdorff_distance(c.system(), ng, nh);
    c.budget_consumed = 4 * budget;
    json out{{"hausdorff_cube", hq}, {"hausdorff_nd", hn}, {"hausdorff", std::max(hq, hn)}};
    c.artifacts.emplace_back("cube_g", std::move(qg));
    c.artifacts.emplace_back("cube_h", std::move(qh));
    c.artifacts.emplace_back("nd_g", std::move(ng));
    c.artifacts.emplace_back("nd_h", std::move(nh));
    return out;
}

inline json poly_density(OpContext& c) {
    auto x = c.point("x");
    double res = c.num("resolution");
    if (c.has("polys")) {
        auto polys = parse_polys(c.params["polys"], c.basis);
        auto cov = poly_orbit_density(c.system(), polys, x, c.count("budget"), res, c.seed, {c.num("horizon")});
        c.budget_consumed = cov.samples;
        json out = coverage_json(cov);
        out["mode"] = "polynomial";
        return out;
    }
    const auto& ip = c.params["integer_part"];
    for (const char* k : {"beta", "power", "count"})
        if (!ip.contains(k)) throw SchemaError(std::string("params.integer_part.") + k, "missing");
    if (!ip["power"].is_number_integer() || ip["power"].get<int>() < 1)
        throw SchemaError("params.integer_part.power", "must be a positive integer");
    if (!ip["count"].is_number_integer() || ip["count"].get<long long>() < 1)
        throw SchemaError("params.integer_part.count", "must be a positive integer");
    double beta = parse_real(ip["beta"], c.basis);
    int power = ip["power"].get<int>();
    auto n_max = ip["count"].get<std::uint64_t>();
    std::vector<double> times;
    times.reserve(n_max);
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        long double t = static_cast<long double>(beta) * std::pow(static_cast<long double>(n), power);
        times.push_back(static_cast<double>(t));
    }
    auto cov = integer_part_orbit(c.system(), x, times, res);
    c.budget_consumed = cov.samples;
    json out = coverage_json(cov);
    out["mode"] = "integer-part";
    return out;
}

inline FactorProjection parse_projection(const std::string& s) {
    if (s == "identity") return FactorProjection::Identity;
    if (s == "heisenberg-base") return FactorProjection::HeisenbergToBase;
    return FactorProjection::TorusFirstCoordinate;
}

inline json fiber_coverage_op(OpContext& c) {
    int d = c.integer("d");
    auto proj = parse_projection(c.params["projection"].get<std::string>());
    auto cov = fiber_coverage(c.system(), proj, d, c.alphas_or(d), c.point("x"), c.count("budget"), c.num("resolution"),
                              c.seed, {c.num("horizon")});
    c.budget_consumed = cov.samples;
    json out = coverage_json(cov);
    out["projection"] = std::string(to_string(proj));
    return out;
}

inline json suspend(OpContext& c) {
    auto susp = SystemHandle::suspension(c.system());
    auto p = susp_canonical(susp, c.point("x"), c.num("s"));
    auto e = susp_evolve(susp, p, c.num("t"));
    json out{{"canonical", susp_point_json(p)}, {"evolved", susp_point_json(e)}};
    if (c.has("y")) {
        auto q = susp_canonical(susp, c.point("y"), c.num("s_y"));
        out["other"] = susp_point_json(q);
        out["equivalent"] = susp_equivalent(susp, p, q);
        out["metric"] = susp_metric(susp, p, q);
    }
    c.budget_consumed = 1;
    return out;
}

inline json susp_rp(OpContext& c) {
    auto x1 = c.point("x1"), x2 = c.point("x2");
    auto r = susp_rp_transfer_check(c.system(), x1, x2, c.num("s1"), c.num("s2"), c.integer("d"), c.num("delta"),
                                    c.count("budget"));
    json out{{"forward", r.forward},
             {"backward", r.backward},
             {"height_gap_integral", r.height_gap_integral},
             {"backward_attempted", r.backward_attempted},
             {"agree", r.agree()}};
    if (r.height_gap_integral) out["height_gap"] = r.height_gap;
    out["forward_search"] = {{"status", std::string(to_string(r.forward_outcome.status))},
                             {"method", r.forward_outcome.method},
                             {"stats", stats_json(r.forward_outcome.stats)}};
    c.budget_consumed = r.forward_outcome.stats.evaluations;
    if (r.backward_outcome) {
        out["backward_search"] = {{"status", std::string(to_string(r.backward_outcome->status))},
                                  {"method", r.backward_outcome->method},
                                  {"stats", stats_json(r.backward_outcome->stats)}};
        c.budget_consumed += r.backward_outcome->stats.evaluations;
    }
    return out;
}

inline json average(OpContext& c) {
    auto f = parse_observable(c.params["observable"]);
    auto samples = c.count("samples");
    if (!c.has("alphas")) {
        auto e = integrate_haar(c.system(), f, samples, c.seed);
        c.budget_consumed = e.samples;
        return {{"mode", "haar"}, {"integral", estimate_json(e)}};
    }
    auto alphas = parse_alphas(c.params["alphas"]);
    json rows = json::array();
    for (double t : parse_numbers(c.params["times"])) {
        auto e = multi_average_I(c.system(), f, alphas, t, {samples, c.seed});
        c.budget_consumed += e.samples;
        json row = estimate_json(e);
        row["t"] = t;
        rows.push_back(row);
    }
    json out{{"mode", "multiple"}, {"averages", rows}};
    if (f.is_trig() && c.system().is_torus()) out["spectrum"] = spectrum_json(multi_average_spectrum(c.system(), f, alphas));
    return out;
}

inline json ud(OpContext& c) {
    auto series = parse_series(c.params["series"]);
    auto r = ud_sup(series, parse_windows(c.params["windows"]));
    std::size_t arg = 0;
    for (std::size_t i = 0; i < r.averages.size(); ++i)
        if (r.averages[i] > r.averages[arg]) arg = i;
    std::vector<double> sigmas;
    std::vector<Complex> avgs;
    for (std::size_t i = 0; i < r.windows.size(); ++i) {
        sigmas.push_back(r.windows[i].sigma);
        avgs.emplace_back(r.averages[i]);
    }
    c.budget_consumed = series.size();
    json out{{"ud_sup", r.sup},
             {"windows", r.windows.size()},
             {"argmax", {{"sigma", r.windows[arg].sigma}, {"rho", r.windows[arg].rho}}}};
    c.artifacts.emplace_back("window_averages", TimeSeries(std::move(sigmas), std::move(avgs)));
    return out;
}

inline json density(OpContext& c) {
    std::vector<double> hits;
    double horizon = c.num("horizon");
    json out = json::object();
    if (c.has("hits")) {
        hits = parse_numbers(c.params["hits"]);
        out["source"] = "hits";
    } else {
        const auto& r = c.params["returns"];
        for (const char* k : {"x", "center", "radius", "grid_step"})
            if (!r.contains(k)) throw SchemaError(std::string("params.returns.") + k, "missing");
        if (!r["radius"].is_number() || !r["grid_step"].is_number())
            throw SchemaError("params.returns", "radius and grid_step must be numbers");
        auto grid = time_grid(horizon, r["grid_step"].get<double>());
        hits = return_set(c.system(), parse_point(r["x"], c.basis), parse_point(r["center"], c.basis),
                          r["radius"].get<double>(), grid);
        out["source"] = "returns";
        out["grid_points"] = grid.size();
    }
    auto e = banach_density(hits, horizon, c.num("rho"), c.num("step"), c.num("half_width"));
    c.budget_consumed = hits.size();
    out["hits"] = hits.size();
    out["lower"] = e.lower;
    out["upper"] = e.upper;
    out["windows"] = e.windows;
    return out;
}

inline json potts(OpContext& c) {
    auto polys = parse_polys(c.params["polys"], c.basis);
    std::vector<Observable> fs;
    for (const auto& o : c.params["observables"]) fs.push_back(parse_observable(o));
    PottsOptions opt;
    if (c.has("step")) opt.step = c.num("step");
    opt.x_samples = c.count("x_samples");
    opt.seed = c.seed;
    auto r = potts_average(c.system(), polys, fs, c.num("R"), opt);
    c.budget_consumed = r.time_points * r.x_samples;
    return {{"deviation", r.deviation},
            {"mean_deviation", complex_json(r.mean_deviation)},
            {"product_of_integrals", complex_json(r.product_of_integrals)},
            {"step", r.step},
            {"time_points", r.time_points},
            {"x_samples", r.x_samples}};
}

inline json nilres(OpContext& c) {
    auto f = parse_observable(c.params["observable"]);
    auto alphas = parse_alphas(c.params["alphas"]);
    double from = c.num("t_from"), to = c.num("t_to");
    if (!(to > from)) throw SchemaError("params.t_to", "must exceed t_from");
    auto grid = linspace(from, to, c.count("t_points"));
    NilResidualOptions opt;
    opt.monte_carlo = {c.count("samples"), c.seed};
    auto r = nilfunction_residual(c.system(), f, alphas, grid, opt);
    double rho = std::min(c.num("rho"), to - from);
    auto u = ud_sup(r.residual, sliding_windows(from, to, rho, c.num("window_step")));
    double max_abs = 0.0, worst_ratio = 0.0;
    for (std::size_t i = 0; i < r.residual.size(); ++i) {
        double a = std::abs(r.residual.values()[i]);
        max_abs = std::max(max_abs, a);
        if (!r.stderr_.empty()) worst_ratio = std::max(worst_ratio, r.stderr_[i] > 0 ? a / r.stderr_[i] : (a > 0 ? INFINITY : 0.0));
    }
    json out{{"method", r.method}, {"ud_sup", u.sup}, {"rho", rho}, {"windows", u.windows.size()}, {"max_abs_residual", max_abs}};
    if (!r.stderr_.empty()) {
        out["max_stderr_ratio"] = worst_ratio;
        out["within_3_stderr"] = worst_ratio <= 3.0;
        c.budget_consumed = opt.monte_carlo.samples * grid.size();
    } else {
        c.budget_consumed = grid.size();
    }
    out["prediction"] = spectrum_json(r.prediction);
    c.artifacts.emplace_back("sampled", std::move(r.sampled));
    c.artifacts.emplace_back("residual", std::move(r.residual));
    return out;
}

inline json embed(OpContext& c) {
    auto out = jstar_embed(parse_elements(c.params["g"], c.basis), parse_alphas(c.params["alphas"]));
    c.budget_consumed = 1;
    return {{"tuple", elements_json(out)}};
}

inline json membership(OpContext& c) {
    auto tuple = parse_elements(c.params["tuple"], c.basis);
    auto alphas = parse_alphas(c.params["alphas"]);
    double tol = c.num("tol");
    auto r = gtilde_star_membership(tuple, alphas, tol);
    json out{{"member", r.member}, {"residual", r.residual}};
    if (r.preimage) out["preimage"] = elements_json(*r.preimage);
    if (c.has("conjugate_by")) {
        if (r.member)
            out["conjugate_member"] = gtilde_star_conjugation_check(parse_element(c.params["conjugate_by"], c.basis), tuple, alphas, tol);
        else
            out["conjugate_member"] = nullptr;
    }
    c.budget_consumed = 1;
    return out;
}

} // namespace ops

using Handler = std::function<json(OpContext&)>;

inline const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> h{
        {"minimal", ops::minimal},
        {"exceptional", ops::exceptional},
        {"rp-certify", ops::rp_certify},
        {"rp-transfer", ops::rp_transfer},
        {"cube", ops::cube},
        {"nd-compare", ops::nd_compare},
        {"poly-density", ops::poly_density},
        {"fiber-coverage", ops::fiber_coverage_op},
        {"suspend", ops::suspend},
        {"susp-rp", ops::susp_rp},
        {"average", ops::average},
        {"ud", ops::ud},
        {"density", ops::density},
        {"potts", ops::potts},
        {"nilres", ops::nilres},
        {"embed", ops::embed},
        {"membership", ops::membership},
    };
    return h;
}

} // namespace nildyn::cli
