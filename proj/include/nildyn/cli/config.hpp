#pragma once

#include "nildyn/averages/observable.hpp"
#include "nildyn/cli/json_io.hpp"
#include "nildyn/polynomial.hpp"
#include "nildyn/systems/minimality.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace nildyn::cli {

enum class ExitCode : int {
    Ok = 0,
    ExpectationFailed = 1,
    Schema = 2,
    UnsupportedBasis = 3,
    BudgetExhausted = 4,
    InvariantBreach = 5,
};

/// One problem found in a config. `code` is SCHEMA, SEMANTIC or UNSUPPORTED-BASIS.
struct Diagnostic {
    std::string code;
    std::string field;
    std::string message;
    std::vector<std::string> missing; // products, for UNSUPPORTED-BASIS

    json to_json() const {
        json j{{"code", code}, {"field", field}, {"message", message}};
        if (!missing.empty()) j["missing"] = missing;
        return j;
    }
};

class SchemaError : public std::invalid_argument {
public:
    explicit SchemaError(std::vector<Diagnostic> diags)
        : std::invalid_argument(make_message(diags)), diags_(std::move(diags)) {}
    SchemaError(std::string field, std::string message)
        : SchemaError(std::vector<Diagnostic>{{"SCHEMA", std::move(field), std::move(message), {}}}) {}

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    static std::string make_message(const std::vector<Diagnostic>& d) {
        std::string m = "invalid config:";
        for (const auto& x : d) m += " [" + x.field + "] " + x.message + ";";
        return m;
    }
    std::vector<Diagnostic> diags_;
};

enum class FieldType {
    Number,
    Positive,
    PositiveInteger,
    Integer,
    String,
    Choice,
    Exact,
    ExactList,
    Point,
    Numbers,
    Alphas,
    Observable,
    Observables,
    Polys,
    Element,
    Elements,
    Windows,
    Series,
    Object,
};

struct Field {
    std::string name;
    FieldType type;
    bool required = false;
    json fallback = nullptr;
    std::vector<std::string> choices = {};
};

enum class SystemNeed { None, Optional, One, Two };

struct OperationSpec {
    std::string name;
    std::string summary;
    SystemNeed systems;
    std::vector<Field> fields;
};

inline const std::vector<OperationSpec>& operation_specs() {
    using F = FieldType;
    static const std::vector<OperationSpec> specs{
        {"minimal", "exact minimality of a flow, a map, or the time-t map of a flow", SystemNeed::One,
         {{"t", F::Exact}}},
        {"exceptional", "time-t minimality over a list of exact times", SystemNeed::One,
         {{"times", F::ExactList, true}}},
        {"rp-certify", "search and verify an RP^[d] witness for (x, y)", SystemNeed::One,
         {{"x", F::Point, true},
          {"y", F::Point, true},
          {"d", F::PositiveInteger, false, 1},
          {"delta", F::Positive, true},
          {"budget", F::PositiveInteger, false, 1000000},
          {"dt", F::Positive, false, 0.1},
          {"refine", F::PositiveInteger, false, 10}}},
        {"rp-transfer", "transfer an RP^[d] witness between commuting actions", SystemNeed::Two,
         {{"x", F::Point, true},
          {"y", F::Point, true},
          {"d", F::PositiveInteger, false, 1},
          {"delta", F::Positive, true},
          {"delta_out", F::Positive},
          {"budget", F::PositiveInteger, false, 1000000}}},
        {"cube", "sample the dynamical cube Q^[d]", SystemNeed::One,
         {{"x", F::Point, true},
          {"d", F::PositiveInteger, false, 2},
          {"budget", F::PositiveInteger, false, 10000},
          {"horizon", F::Positive, false, 1e4}}},
        {"nd-compare", "Hausdorff comparison of Q^[d] and N_d clouds of two actions", SystemNeed::Two,
         {{"x", F::Point, true},
          {"d", F::PositiveInteger, false, 2},
          {"budget", F::PositiveInteger, false, 100000},
          {"alphas", F::Alphas},
          {"horizon", F::Positive, false, 1e4}}},
        {"poly-density", "coverage of a polynomial or integer-part orbit", SystemNeed::One,
         {{"x", F::Point, true},
          {"polys", F::Polys},
          {"integer_part", F::Object},
          {"budget", F::PositiveInteger, false, 1000000},
          {"resolution", F::Positive, false, 0.05},
          {"horizon", F::Positive, false, 1e4}}},
        {"fiber-coverage", "coverage of the fiber over a factor by N_d samples", SystemNeed::One,
         {{"projection", F::Choice, true, nullptr, {"identity", "heisenberg-base", "torus-first"}},
          {"x", F::Point, true},
          {"d", F::PositiveInteger, false, 1},
          {"alphas", F::Alphas},
          {"budget", F::PositiveInteger, false, 1000000},
          {"resolution", F::Positive, false, 0.05},
          {"horizon", F::Positive, false, 1e4}}},
        {"suspend", "canonical form, evolution and metric on the suspension flow", SystemNeed::One,
         {{"x", F::Point, true},
          {"s", F::Number, false, 0.0},
          {"t", F::Number, false, 0.0},
          {"y", F::Point},
          {"s_y", F::Number, false, 0.0}}},
        {"susp-rp", "suspension transfer check for a pair of heights", SystemNeed::One,
         {{"x1", F::Point, true},
          {"x2", F::Point, true},
          {"s1", F::Number, true},
          {"s2", F::Number, true},
          {"d", F::PositiveInteger, false, 1},
          {"delta", F::Positive, true},
          {"budget", F::PositiveInteger, false, 1000000}}},
        {"average", "Haar integral or multiple average I_f(k,t)", SystemNeed::One,
         {{"observable", F::Observable, true},
          {"alphas", F::Alphas},
          {"times", F::Numbers, false, json::array({0.0})},
          {"samples", F::PositiveInteger, false, 100000}}},
        {"ud", "uniform-density window averages of a time series", SystemNeed::None,
         {{"series", F::Series, true}, {"windows", F::Windows, true}}},
        {"density", "Banach density estimates of hit or return times", SystemNeed::Optional,
         {{"hits", F::Numbers},
          {"returns", F::Object},
          {"horizon", F::Positive, true},
          {"rho", F::Positive, true},
          {"step", F::Positive, false, 1.0},
          {"half_width", F::Positive, false, 0.05}}},
        {"potts", "deviation of a polynomial multiple average from the product of integrals", SystemNeed::One,
         {{"polys", F::Polys, true},
          {"observables", F::Observables, true},
          {"R", F::Positive, true},
          {"step", F::Positive},
          {"x_samples", F::PositiveInteger, false, 8}}},
        {"nilres", "residual of I_f(k,t) against its predicted nilfunction part", SystemNeed::One,
         {{"observable", F::Observable, true},
          {"alphas", F::Alphas, true},
          {"t_from", F::Number, false, 0.0},
          {"t_to", F::Positive, true},
          {"t_points", F::PositiveInteger, false, 40001},
          {"rho", F::Positive, false, 1000.0},
          {"window_step", F::Positive, false, 50.0},
          {"samples", F::PositiveInteger, false, 100000}}},
        {"embed", "j* embedding of (g_1, g_2)", SystemNeed::None,
         {{"g", F::Elements, true}, {"alphas", F::Alphas, true}}},
        {"membership", "membership in the range of j*, optionally after conjugation", SystemNeed::None,
         {{"tuple", F::Elements, true},
          {"alphas", F::Alphas, true},
          {"tol", F::Positive, false, 1e-9},
          {"conjugate_by", F::Element}}},
    };
    return specs;
}

inline const OperationSpec* find_operation(std::string_view name) {
    for (const auto& s : operation_specs())
        if (s.name == name) return &s;
    return nullptr;
}

// ---------------------------------------------------------------- parsing

inline bool is_exact_token(const json& v) { return v.is_string() || v.is_number_integer() || v.is_number_unsigned(); }

inline SymbolicReal parse_exact(const json& v, const Basis& basis) {
    SymbolicReal s = v.is_string() ? SymbolicReal::parse(v.get<std::string>())
                                   : SymbolicReal(Rational(v.get<long long>()));
    basis.check_declared(s);
    return s;
}

inline double parse_real(const json& v, const Basis& basis) {
    if (v.is_number()) return v.get<double>();
    return basis.to_double(parse_exact(v, basis));
}

/// Squarefree n when `symbol` names √n (also accepted: sqrtN).
inline std::optional<unsigned long> sqrt_symbol(const std::string& symbol) {
    std::string digits;
    if (symbol.rfind("√", 0) == 0)
        digits = symbol.substr(std::string("√").size());
    else if (symbol.rfind("sqrt", 0) == 0)
        digits = symbol.substr(4);
    else
        return std::nullopt;
    if (digits.empty() || digits.size() > 9 || !std::all_of(digits.begin(), digits.end(), ::isdigit)) return std::nullopt;
    return std::stoul(digits);
}

/// Declares every basis symbol; √n symbols are checked against their decimal.
inline Basis parse_basis(const json& config, std::vector<Diagnostic>& diags) {
    Basis basis;
    if (!config.contains("basis")) return basis;
    std::vector<std::pair<std::string, json>> decls;
    const auto& b = config["basis"];
    if (b.is_object()) {
        for (const auto& [symbol, value] : b.items()) decls.emplace_back(symbol, value);
    } else if (b.is_array()) {
        for (std::size_t i = 0; i < b.size(); ++i) {
            const auto& e = b[i];
            if (!e.is_object() || !e.contains("symbol") || !e["symbol"].is_string() || !e.contains("decimal")) {
                diags.push_back({"SCHEMA", "basis[" + std::to_string(i) + "]", "entry needs 'symbol' and 'decimal'", {}});
                continue;
            }
            decls.emplace_back(e["symbol"].get<std::string>(), e["decimal"]);
        }
    } else {
        diags.push_back({"SCHEMA", "basis", "must map symbols to decimal strings", {}});
        return basis;
    }
    for (const auto& [symbol, value] : decls) {
        std::string field = "basis." + symbol;
        if (!value.is_string()) {
            diags.push_back({"SCHEMA", field, "decimal value must be a string", {}});
            continue;
        }
        try {
            std::string dec = value.get<std::string>();
            HighPrecision given(dec);
            if (auto n = sqrt_symbol(symbol)) {
                basis.declare_sqrt(symbol, *n);
                auto dot = dec.find('.');
                int places = dot == std::string::npos ? 0 : static_cast<int>(dec.size() - dot - 1);
                HighPrecision tol = boost::multiprecision::pow(HighPrecision(10), -std::min(places, 45));
                if (boost::multiprecision::abs(given - basis.entries().at(symbol).value) > tol)
                    diags.push_back({"SEMANTIC", field, "decimal does not match √" + std::to_string(*n), {}});
            } else {
                basis.declare(symbol, dec);
            }
        } catch (const std::exception& e) {
            diags.push_back({"SCHEMA", field, e.what(), {}});
        }
    }
    if (config.contains("products")) {
        const auto& p = config["products"];
        if (!p.is_array()) diags.push_back({"SCHEMA", "products", "must be a list of [a, b, result]", {}});
        else
            for (std::size_t i = 0; i < p.size(); ++i) {
                std::string field = "products[" + std::to_string(i) + "]";
                try {
                    if (!p[i].is_array() || p[i].size() != 3 || !p[i][0].is_string() || !p[i][1].is_string() ||
                        !is_exact_token(p[i][2]))
                        throw std::invalid_argument("must be [a, b, result]");
                    basis.declare_product(p[i][0].get<std::string>(), p[i][1].get<std::string>(),
                                          parse_exact(p[i][2], basis));
                } catch (const std::exception& e) {
                    diags.push_back({"SCHEMA", field, e.what(), {}});
                }
            }
    }
    return basis;
}

inline std::string system_type(const json& spec) {
    if (!spec.is_object() || !spec.contains("type") || !spec["type"].is_string())
        throw std::invalid_argument("system needs a string 'type'");
    return spec["type"].get<std::string>();
}

/// Builds a system from its JSON spec. Exact frequencies are kept when every
/// entry is a string or integer. An optional exact "time" replaces a map by
/// its time-t iterate of the underlying flow.
inline SystemHandle parse_system(const json& spec, const Basis& basis) {
    std::string type = system_type(spec);
    std::optional<SymbolicReal> time;
    if (spec.contains("time")) {
        if (!is_exact_token(spec["time"])) throw std::invalid_argument("system 'time' must be exact (string or integer)");
        time = parse_exact(spec["time"], basis);
    }
    if (type == "torus-flow" || type == "torus-map") {
        if (!spec.contains("freqs") || !spec["freqs"].is_array() || spec["freqs"].empty())
            throw std::invalid_argument("torus system needs a nonempty 'freqs' list");
        const auto& fr = spec["freqs"];
        bool exact = std::all_of(fr.begin(), fr.end(), is_exact_token);
        TorusFlowSpec ts;
        if (exact) {
            std::vector<SymbolicReal> freqs;
            for (const auto& v : fr) freqs.push_back(parse_exact(v, basis));
            if (time)
                for (auto& f : freqs) f = basis.multiply(f, *time);
            ts = TorusFlowSpec::from_exact(std::move(freqs), basis);
        } else {
            std::vector<double> rates;
            for (const auto& v : fr) {
                if (!v.is_number()) throw std::invalid_argument("torus frequencies must be all exact or all numbers");
                rates.push_back(v.get<double>() * (time ? basis.to_double(*time) : 1.0));
            }
            ts = TorusFlowSpec::from_rates(std::move(rates));
        }
        return type == "torus-flow" ? SystemHandle::torus_flow(std::move(ts)) : SystemHandle::torus_map(std::move(ts));
    }
    if (type == "heisenberg-nilflow" || type == "heisenberg-nilsystem") {
        if (!spec.contains("generator") || !spec["generator"].is_array() || spec["generator"].size() != 3)
            throw std::invalid_argument("Heisenberg system needs a 3-entry 'generator'");
        const auto& g = spec["generator"];
        double z = parse_real(g[2], basis);
        NilflowSpec ns;
        if (is_exact_token(g[0]) && is_exact_token(g[1])) {
            auto a = parse_exact(g[0], basis), b = parse_exact(g[1], basis);
            ns = NilflowSpec::from_exact(a, b, z, basis);
            if (time) {
                ns.generator = heis_power(ns.generator, basis.to_double(*time));
                ns.alpha = basis.multiply(a, *time);
                ns.beta = basis.multiply(b, *time);
            }
        } else {
            ns = NilflowSpec::from_generator({parse_real(g[0], basis), parse_real(g[1], basis), z});
            if (time) ns.generator = heis_power(ns.generator, basis.to_double(*time));
        }
        return type == "heisenberg-nilflow" ? SystemHandle::nilflow(std::move(ns))
                                             : SystemHandle::nilsystem(std::move(ns));
    }
    if (type == "suspension") {
        if (!spec.contains("base")) throw std::invalid_argument("suspension needs a 'base' system");
        return SystemHandle::suspension(parse_system(spec["base"], basis));
    }
    throw std::invalid_argument("unknown system type '" + type + "'");
}

inline Point parse_point(const json& v, const Basis& basis) {
    if (!v.is_array() || v.empty()) throw std::invalid_argument("point must be a nonempty list");
    Point p;
    for (const auto& c : v) {
        if (!c.is_number() && !c.is_string()) throw std::invalid_argument("point coordinates must be numbers");
        p.push_back(parse_real(c, basis));
    }
    return p;
}

inline std::vector<double> parse_numbers(const json& v) {
    if (!v.is_array()) throw std::invalid_argument("must be a list of numbers");
    std::vector<double> out;
    for (const auto& c : v) {
        if (!c.is_number()) throw std::invalid_argument("must be a list of numbers");
        out.push_back(c.get<double>());
    }
    return out;
}

inline std::vector<double> parse_alphas(const json& v) {
    auto a = parse_numbers(v);
    if (a.empty()) throw std::invalid_argument("alphas must be nonempty");
    std::set<double> seen;
    for (double x : a) {
        if (x == 0.0) throw std::invalid_argument("alphas must be nonzero");
        if (!seen.insert(x).second) throw std::invalid_argument("alphas must be distinct");
    }
    return a;
}

inline Frequency parse_frequency(const json& v) {
    if (!v.is_array() || v.empty()) throw std::invalid_argument("frequency must be a nonempty integer list");
    Frequency m;
    for (const auto& c : v) {
        if (!c.is_number_integer()) throw std::invalid_argument("frequency entries must be integers");
        m.push_back(c.get<std::int64_t>());
    }
    return m;
}

inline Complex parse_complex(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument("coefficient must be a number or [re, im]");
}

/// {"kind": "trig", "terms": [{"freq": [..], "coeff": c}]}, {"kind": "exp", "freq": [..]},
/// {"kind": "cos", "freq": [..]} or {"kind": "constant", "dim": n, "value": c}.
inline Observable parse_observable(const json& v) {
    if (!v.is_object() || !v.contains("kind") || !v["kind"].is_string())
        throw std::invalid_argument("observable needs a string 'kind'");
    std::string kind = v["kind"].get<std::string>();
    auto need = [&](const char* key) -> const json& {
        if (!v.contains(key)) throw std::invalid_argument(std::string("observable needs '") + key + "'");
        return v[key];
    };
    if (kind == "trig") {
        const auto& terms = need("terms");
        if (!terms.is_array() || terms.empty()) throw std::invalid_argument("'terms' must be a nonempty list");
        std::vector<std::pair<Frequency, Complex>> t;
        for (const auto& term : terms) {
            if (!term.is_object() || !term.contains("freq") || !term.contains("coeff"))
                throw std::invalid_argument("each term needs 'freq' and 'coeff'");
            t.emplace_back(parse_frequency(term["freq"]), parse_complex(term["coeff"]));
        }
        return Observable::trig_polynomial(t);
    }
    if (kind == "exp")
        return Observable::trig_monomial(parse_frequency(need("freq")), v.contains("coeff") ? parse_complex(v["coeff"]) : 1.0);
    if (kind == "cos") return Observable::cosine(parse_frequency(need("freq")));
    if (kind == "constant") {
        const auto& d = need("dim");
        if (!d.is_number_integer() || d.get<long long>() < 1) throw std::invalid_argument("'dim' must be a positive integer");
        return Observable::constant(d.get<std::size_t>(), parse_complex(need("value")));
    }
    throw std::invalid_argument("unknown observable kind '" + kind + "'");
}

/// Ascending coefficient lists; exact when every entry is a string or integer.
inline std::vector<RealPolynomial> parse_polys(const json& v, const Basis& basis) {
    if (!v.is_array() || v.empty()) throw std::invalid_argument("polys must be a nonempty list of coefficient lists");
    std::vector<RealPolynomial> out;
    for (const auto& p : v) {
        if (!p.is_array() || p.empty()) throw std::invalid_argument("each polynomial is a nonempty coefficient list");
        if (std::all_of(p.begin(), p.end(), is_exact_token)) {
            std::vector<SymbolicReal> c;
            for (const auto& x : p) c.push_back(parse_exact(x, basis));
            out.push_back(RealPolynomial::from_exact(std::move(c), basis));
        } else {
            std::vector<double> c;
            for (const auto& x : p) c.push_back(parse_real(x, basis));
            out.push_back(RealPolynomial::from_values(std::move(c)));
        }
    }
    return out;
}

inline HeisenbergElement parse_element(const json& v, const Basis& basis) {
    auto p = parse_point(v, basis);
    if (p.size() != 3) throw std::invalid_argument("Heisenberg element needs 3 coordinates");
    return {p[0], p[1], p[2]};
}

inline std::vector<HeisenbergElement> parse_elements(const json& v, const Basis& basis) {
    if (!v.is_array() || v.empty()) throw std::invalid_argument("must be a nonempty list of elements");
    std::vector<HeisenbergElement> out;
    for (const auto& e : v) out.push_back(parse_element(e, basis));
    return out;
}

inline std::vector<Window> parse_windows(const json& v) {
    if (v.is_array()) {
        std::vector<Window> out;
        for (const auto& w : v) {
            if (!w.is_array() || w.size() != 2 || !w[0].is_number() || !w[1].is_number())
                throw std::invalid_argument("explicit windows are [sigma, rho] pairs");
            out.push_back({w[0].get<double>(), w[1].get<double>()});
        }
        if (out.empty()) throw std::invalid_argument("windows must be nonempty");
        return out;
    }
    if (!v.is_object() || !v.contains("rho") || !v.contains("step") || !v.contains("from") || !v.contains("to"))
        throw std::invalid_argument("windows need {from, to, rho, step} or a list of [sigma, rho]");
    for (const char* k : {"from", "to", "rho", "step"})
        if (!v[k].is_number()) throw std::invalid_argument(std::string("windows.") + k + " must be a number");
    return sliding_windows(v["from"].get<double>(), v["to"].get<double>(), v["rho"].get<double>(),
                           v["step"].get<double>());
}

inline TimeSeries parse_series(const json& v) {
    if (v.is_object() && v.contains("csv")) {
        if (!v["csv"].is_string()) throw std::invalid_argument("series.csv must be a path");
        std::ifstream f(v["csv"].get<std::string>());
        if (!f) throw std::invalid_argument("cannot read series file '" + v["csv"].get<std::string>() + "'");
        return read_series_csv(f);
    }
    if (!v.is_object() || !v.contains("grid") || !v.contains("values"))
        throw std::invalid_argument("series needs {grid, values} or {csv}");
    auto grid = parse_numbers(v["grid"]);
    std::vector<Complex> values;
    bool cplx = false;
    if (!v["values"].is_array()) throw std::invalid_argument("series.values must be a list");
    for (const auto& x : v["values"]) {
        cplx = cplx || x.is_array();
        values.push_back(parse_complex(x));
    }
    return TimeSeries(std::move(grid), std::move(values), cplx);
}

// ------------------------------------------------------------- validation

/// Checks a single value against its declared type; returns the message of
/// the first problem, if any.
inline std::optional<std::string> check_value(const Field& f, const json& v, const Basis& basis) {
    using F = FieldType;
    try {
        switch (f.type) {
        case F::Number:
            if (!v.is_number()) return "must be a number";
            break;
        case F::Positive:
            if (!v.is_number() || !(v.get<double>() > 0) || !std::isfinite(v.get<double>()))
                return "must be a positive number";
            break;
        case F::PositiveInteger:
            if (!(v.is_number_integer() && v.get<long long>() >= 1)) return "must be a positive integer";
            break;
        case F::Integer:
            if (!v.is_number_integer()) return "must be an integer";
            break;
        case F::String:
            if (!v.is_string()) return "must be a string";
            break;
        case F::Choice:
            if (!v.is_string() || std::find(f.choices.begin(), f.choices.end(), v.get<std::string>()) == f.choices.end()) {
                std::string all;
                for (const auto& c : f.choices) all += (all.empty() ? "" : ", ") + c;
                return "must be one of: " + all;
            }
            break;
        case F::Exact:
            if (!is_exact_token(v)) return "must be an exact value (string or integer)";
            parse_exact(v, basis);
            break;
        case F::ExactList:
            if (!v.is_array() || v.empty()) return "must be a nonempty list of exact values";
            for (const auto& x : v) {
                if (!is_exact_token(x)) return "entries must be exact values (strings or integers)";
                parse_exact(x, basis);
            }
            break;
        case F::Point: parse_point(v, basis); break;
        case F::Numbers: parse_numbers(v); break;
        case F::Alphas: parse_alphas(v); break;
        case F::Observable: parse_observable(v); break;
        case F::Observables:
            if (!v.is_array() || v.empty()) return "must be a nonempty list of observables";
            for (const auto& o : v) parse_observable(o);
            break;
        case F::Polys: parse_polys(v, basis); break;
        case F::Element: parse_element(v, basis); break;
        case F::Elements: parse_elements(v, basis); break;
        case F::Windows: parse_windows(v); break;
        case F::Series:
            if (!v.is_object()) return "must be an object";
            if (!v.contains("csv")) parse_series(v);
            break;
        case F::Object:
            if (!v.is_object()) return "must be an object";
            break;
        }
    } catch (const UnsupportedBasis& e) {
        return std::string(e.what());
    } catch (const std::exception& e) {
        return std::string(e.what());
    }
    return std::nullopt;
}

/// Params with declared defaults filled in.
inline json resolve_params(const OperationSpec& op, const json& params) {
    json out = json::object();
    for (const auto& f : op.fields) {
        if (params.contains(f.name))
            out[f.name] = params[f.name];
        else if (!f.fallback.is_null())
            out[f.name] = f.fallback;
    }
    return out;
}

namespace detail {

inline void check_point_dim(const json& params, const char* key, std::size_t dim, const Basis& basis,
                            std::vector<Diagnostic>& diags) {
    if (!params.contains(key)) return;
    try {
        if (parse_point(params[key], basis).size() != dim)
            diags.push_back({"SEMANTIC", std::string("params.") + key,
                             "point has the wrong dimension for the system (expected " + std::to_string(dim) + ")", {}});
    } catch (const std::exception&) {
    }
}

inline void check_time_closure(const SystemHandle& sys, const json& t, const Basis& basis, const std::string& field,
                               std::vector<Diagnostic>& diags) {
    try {
        time_t_frequencies(sys, parse_exact(t, basis), basis);
    } catch (const UnsupportedBasis& e) {
        diags.push_back({"UNSUPPORTED-BASIS", field, e.what(), e.missing()});
    } catch (const std::exception& e) {
        diags.push_back({"SEMANTIC", field, e.what(), {}});
    }
}

/// Problems that need more than one field to see.
inline void semantic_checks(const OperationSpec& op, const json& params, const std::optional<SystemHandle>& sys,
                            const Basis& basis, std::vector<Diagnostic>& diags) {
    if (sys) {
        std::size_t dim = sys->point_dim();
        if (op.name == "suspend" || op.name == "susp-rp") {
            if (sys->is_flow())
                diags.push_back({"SEMANTIC", "system", "suspension base must be a discrete system", {}});
        }
        for (const char* key : {"x", "y", "x1", "x2"}) check_point_dim(params, key, dim, basis, diags);
        if (op.name == "minimal" && params.contains("t")) {
            if (!sys->is_flow()) diags.push_back({"SEMANTIC", "params.t", "time-t minimality needs a flow", {}});
            else check_time_closure(*sys, params["t"], basis, "params.t", diags);
        }
        if (op.name == "exceptional" && params.contains("times") && params["times"].is_array()) {
            if (!sys->is_flow()) diags.push_back({"SEMANTIC", "system", "time-t minimality needs a flow", {}});
            else
                for (std::size_t i = 0; i < params["times"].size(); ++i)
                    check_time_closure(*sys, params["times"][i], basis, "params.times[" + std::to_string(i) + "]",
                                       diags);
        }
        if ((op.name == "poly-density") && !params.contains("polys") && !params.contains("integer_part"))
            diags.push_back({"SEMANTIC", "params", "poly-density needs 'polys' (flows) or 'integer_part' (maps)", {}});
        if (op.name == "poly-density" && params.contains("polys") && !sys->is_flow())
            diags.push_back({"SEMANTIC", "params.polys", "polynomial orbits need a flow", {}});
        if (op.name == "poly-density" && params.contains("integer_part") && sys->is_flow())
            diags.push_back({"SEMANTIC", "params.integer_part", "integer-part orbits need a discrete system", {}});
        if (op.name == "potts" && !sys->is_flow())
            diags.push_back({"SEMANTIC", "system", "potts needs a flow", {}});
        if (op.name == "nilres" && !(sys->is_torus() || sys->kind() == SystemKind::HeisenbergNilflow))
            diags.push_back({"SEMANTIC", "system", "nilres needs a torus or a Heisenberg nilflow", {}});
    }
    if (op.name == "density" && !params.contains("hits") && !params.contains("returns"))
        diags.push_back({"SEMANTIC", "params", "density needs 'hits' or 'returns'", {}});
    if (op.name == "density" && params.contains("returns") && !sys)
        diags.push_back({"SEMANTIC", "system", "'returns' needs a system", {}});
    if ((op.name == "embed" || op.name == "membership") && params.contains("alphas") && params["alphas"].is_array()) {
        const char* key = op.name == "embed" ? "g" : "tuple";
        if (params.contains(key) && params[key].is_array() && params[key].size() != params["alphas"].size())
            diags.push_back({"SEMANTIC", std::string("params.") + key, "needs one element per alpha", {}});
    }
}

} // namespace detail

/// All schema and semantic problems of a config, without executing it.
/// `operation` overrides the config's own operation name when nonempty.
inline std::vector<Diagnostic> validate_config(const json& config, const std::string& operation = "") {
    std::vector<Diagnostic> diags;
    if (!config.is_object()) return {{"SCHEMA", "", "config must be a JSON object", {}}};
    static const std::set<std::string> known{"operation", "seed",   "basis",  "products", "system",
                                             "system_h",  "params", "expect", "sweep",    "description"};
    for (const auto& [k, v] : config.items())
        if (!known.count(k)) diags.push_back({"SCHEMA", k, "unknown top-level key", {}});

    std::string op_name = operation;
    if (config.contains("operation")) {
        if (!config["operation"].is_string())
            diags.push_back({"SCHEMA", "operation", "must be a string", {}});
        else if (op_name.empty())
            op_name = config["operation"].get<std::string>();
        else if (config["operation"].get<std::string>() != op_name)
            diags.push_back({"SCHEMA", "operation",
                             "config operation '" + config["operation"].get<std::string>() +
                                 "' does not match subcommand '" + op_name + "'",
                             {}});
    }
    if (config.contains("seed") && !(config["seed"].is_number_unsigned() ||
                                     (config["seed"].is_number_integer() && config["seed"].get<long long>() >= 0)))
        diags.push_back({"SCHEMA", "seed", "must be a nonnegative integer", {}});

    Basis basis = parse_basis(config, diags);
    const OperationSpec* op = find_operation(op_name);
    if (!op) {
        diags.push_back({"SCHEMA", "operation", op_name.empty() ? "missing" : "unknown operation '" + op_name + "'", {}});
        return diags;
    }

    std::optional<SystemHandle> sys;
    auto check_system = [&](const char* key, bool required) -> std::optional<SystemHandle> {
        if (!config.contains(key)) {
            if (required) diags.push_back({"SCHEMA", key, "missing system", {}});
            return std::nullopt;
        }
        try {
            return parse_system(config[key], basis);
        } catch (const UnsupportedBasis& e) {
            diags.push_back({"UNSUPPORTED-BASIS", key, e.what(), e.missing()});
        } catch (const std::exception& e) {
            diags.push_back({"SCHEMA", key, e.what(), {}});
        }
        return std::nullopt;
    };
    if (op->systems != SystemNeed::None) sys = check_system("system", op->systems == SystemNeed::One || op->systems == SystemNeed::Two);
    else if (config.contains("system")) diags.push_back({"SCHEMA", "system", op->name + " takes no system", {}});
    if (op->systems == SystemNeed::Two) {
        auto h = check_system("system_h", true);
        if (sys && h && sys->point_dim() != h->point_dim())
            diags.push_back({"SEMANTIC", "system_h", "systems must act on the same space", {}});
    } else if (config.contains("system_h")) {
        diags.push_back({"SCHEMA", "system_h", op->name + " takes one system", {}});
    }

    json params = config.contains("params") ? config["params"] : json::object();
    if (!params.is_object()) {
        diags.push_back({"SCHEMA", "params", "must be an object", {}});
        return diags;
    }
    std::vector<json> variants{params};
    std::string sweep_param;
    if (config.contains("sweep")) {
        const auto& s = config["sweep"];
        if (!s.is_object() || !s.contains("param") || !s["param"].is_string() || !s.contains("values") ||
            !s["values"].is_array() || s["values"].empty()) {
            diags.push_back({"SCHEMA", "sweep", "needs {param: name, values: [nonempty list]}", {}});
        } else {
            sweep_param = s["param"].get<std::string>();
            auto it = std::find_if(op->fields.begin(), op->fields.end(), [&](const Field& f) { return f.name == sweep_param; });
            if (it == op->fields.end()) {
                diags.push_back({"SCHEMA", "sweep.param", "'" + sweep_param + "' is not a parameter of " + op->name, {}});
            } else {
                variants.clear();
                for (const auto& v : s["values"]) {
                    json p = params;
                    p[sweep_param] = v;
                    variants.push_back(p);
                }
            }
        }
    }
    if (config.contains("expect") && !config["expect"].is_object())
        diags.push_back({"SCHEMA", "expect", "must be an object", {}});

    for (const auto& [k, v] : params.items())
        if (std::none_of(op->fields.begin(), op->fields.end(), [&](const Field& f) { return f.name == k; }))
            diags.push_back({"SCHEMA", "params." + k, "unknown parameter for " + op->name, {}});

    std::set<std::string> seen;
    for (const auto& p : variants) {
        std::vector<Diagnostic> local;
        for (const auto& f : op->fields) {
            std::string field = "params." + f.name;
            if (!p.contains(f.name)) {
                if (f.required) local.push_back({"SCHEMA", field, "missing required parameter", {}});
                continue;
            }
            if (auto msg = check_value(f, p[f.name], basis)) {
                bool basis_problem = msg->rfind("UNSUPPORTED-BASIS", 0) == 0;
                local.push_back({basis_problem ? "UNSUPPORTED-BASIS" : "SCHEMA", field, *msg, {}});
            }
        }
        detail::semantic_checks(*op, p, sys, basis, local);
        for (auto& d : local) {
            std::string key = d.code + "|" + d.field + "|" + d.message;
            if (seen.insert(key).second) diags.push_back(std::move(d));
        }
    }
    return diags;
}

} // namespace nildyn::cli
