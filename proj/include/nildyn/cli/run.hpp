#pragma once

#include "nildyn/cli/operations.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

namespace nildyn::cli {

struct RunOptions {
    std::string operation;               // subcommand; empty takes the config's own
    std::optional<std::uint64_t> seed;   // overrides the config seed
    std::string out;                     // report path; empty writes to stdout
    std::string format = "json";         // json or csv
};

struct RunOutcome {
    ExitCode code = ExitCode::Ok;
    json report;                          // set when the operation ran
    json error;                           // set on exit codes 2, 3 and 5
    std::vector<std::pair<std::string, Artifact>> artifacts;
};

inline json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw SchemaError("", "cannot read config file '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("config is not valid JSON: ") + e.what());
    }
}

/// Value at a dotted path; numeric segments index arrays.
inline const json* lookup(const json& j, const std::string& path) {
    const json* cur = &j;
    std::size_t start = 0;
    while (start <= path.size()) {
        auto dot = path.find('.', start);
        std::string seg = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (cur->is_object()) {
            if (!cur->contains(seg)) return nullptr;
            cur = &(*cur)[seg];
        } else if (cur->is_array() && !seg.empty() && std::all_of(seg.begin(), seg.end(), ::isdigit)) {
            auto i = std::stoul(seg);
            if (i >= cur->size()) return nullptr;
            cur = &(*cur)[i];
        } else {
            return nullptr;
        }
        if (dot == std::string::npos) break;
        start = dot + 1;
    }
    return cur;
}

/// A literal is compared for equality; {"min": a, "max": b} bounds a number.
inline bool expectation_holds(const json& expected, const json* actual) {
    if (!actual) return false;
    if (expected.is_object() && (expected.contains("min") || expected.contains("max"))) {
        if (!actual->is_number()) return false;
        double v = actual->get<double>();
        if (expected.contains("min") && !(v >= expected["min"].get<double>())) return false;
        if (expected.contains("max") && !(v <= expected["max"].get<double>())) return false;
        return true;
    }
    if (expected.is_number() && actual->is_number()) return expected.get<double>() == actual->get<double>();
    return expected == *actual;
}

namespace detail {

inline std::string artifact_file(const std::string& out, const std::string& name) {
    if (out.empty()) return {};
    return std::filesystem::path(out).stem().string() + "." + name + ".csv";
}

inline RunOutcome failure(ExitCode code, const std::string& kind, const std::string& message,
                          const std::vector<Diagnostic>& diags = {}) {
    RunOutcome o;
    o.code = code;
    json d = json::array();
    for (const auto& x : diags) d.push_back(x.to_json());
    o.error = {{"exit_code", static_cast<int>(code)}, {"kind", kind}, {"message", message}, {"diagnostics", d}};
    return o;
}

inline json resolved_config(const json& config, const OperationSpec& op, std::uint64_t seed) {
    json r = json::object();
    r["operation"] = op.name;
    r["seed"] = seed;
    for (const char* k : {"basis", "products", "system", "system_h"})
        if (config.contains(k)) r[k] = config[k];
    r["params"] = resolve_params(op, config.contains("params") ? config["params"] : json::object());
    for (const char* k : {"sweep", "expect"})
        if (config.contains(k)) r[k] = config[k];
    return r;
}

inline RunOutcome execute(const json& config, const RunOptions& opt) {
    auto diags = validate_config(config, opt.operation);
    if (!diags.empty()) {
        bool basis_only = std::all_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.code == "UNSUPPORTED-BASIS"; });
        if (basis_only) {
            std::vector<std::string> missing;
            for (const auto& d : diags) missing.insert(missing.end(), d.missing.begin(), d.missing.end());
            throw UnsupportedBasis(missing);
        }
        throw SchemaError(diags);
    }
    std::string name = opt.operation.empty() ? config["operation"].get<std::string>() : opt.operation;
    const OperationSpec& op = *find_operation(name);
    std::uint64_t seed = opt.seed ? *opt.seed : (config.contains("seed") ? config["seed"].get<std::uint64_t>() : 0);

    std::vector<Diagnostic> ignored;
    Basis basis = parse_basis(config, ignored);
    std::optional<SystemHandle> sys, sys_h;
    if (config.contains("system") && op.systems != SystemNeed::None) sys = parse_system(config["system"], basis);
    if (op.systems == SystemNeed::Two) sys_h = parse_system(config["system_h"], basis);

    json resolved = resolved_config(config, op, seed);
    const json& base_params = resolved["params"];
    std::vector<json> variants{base_params};
    std::string sweep_param;
    if (config.contains("sweep")) {
        sweep_param = config["sweep"]["param"].get<std::string>();
        variants.clear();
        for (const auto& v : config["sweep"]["values"]) {
            json p = base_params;
            p[sweep_param] = v;
            variants.push_back(p);
        }
    }

    RunOutcome outcome;
    json rows = json::array();
    std::uint64_t consumed = 0;
    bool exhausted = false;
    const auto& handler = handlers().at(op.name);
    for (std::size_t i = 0; i < variants.size(); ++i) {
        OpContext ctx{variants[i], basis, sys, sys_h, seed, 0, false, {}};
        json result = handler(ctx);
        consumed += ctx.budget_consumed;
        exhausted = exhausted || ctx.exhausted;
        for (auto& [n, a] : ctx.artifacts)
            outcome.artifacts.emplace_back(sweep_param.empty() ? n : "row" + std::to_string(i) + "." + n, std::move(a));
        if (sweep_param.empty()) {
            rows.push_back(std::move(result));
        } else {
            json row = json::object();
            row[sweep_param] = variants[i][sweep_param];
            row["result"] = std::move(result);
            row["budget_consumed"] = ctx.budget_consumed;
            rows.push_back(std::move(row));
        }
    }

    json report = json::object();
    report["operation"] = op.name;
    report["seed"] = seed;
    report["config"] = resolved;
    if (sweep_param.empty())
        report["result"] = rows[0];
    else
        report["rows"] = rows;
    report["budget_consumed"] = consumed;
    report["budget_exhausted"] = exhausted;

    bool pass = true;
    if (config.contains("expect")) {
        json checks = json::array();
        for (const auto& [path, expected] : config["expect"].items()) {
            for (std::size_t i = 0; i < rows.size(); ++i) {
                const json& result = sweep_param.empty() ? rows[i] : rows[i]["result"];
                const json* actual = lookup(result, path);
                bool ok = expectation_holds(expected, actual);
                pass = pass && ok;
                json check{{"key", path}, {"expected", expected}, {"actual", actual ? *actual : json(nullptr)}, {"pass", ok}};
                if (!sweep_param.empty()) check["row"] = i;
                checks.push_back(std::move(check));
            }
        }
        report["expectations"] = checks;
        report["pass"] = pass;
    }
    json artifacts = json::object();
    for (const auto& [n, a] : outcome.artifacts) {
        auto file = artifact_file(opt.out, n);
        artifacts[n] = file.empty() ? json(nullptr) : json(file);
    }
    report["artifacts"] = artifacts;

    outcome.code = exhausted ? ExitCode::BudgetExhausted : pass ? ExitCode::Ok : ExitCode::ExpectationFailed;
    outcome.report = std::move(report);
    return outcome;
}

} // namespace detail

/// Maps an exception escaping validation or an operation to its exit code.
inline RunOutcome classify(std::exception_ptr ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const SchemaError& e) {
        return detail::failure(ExitCode::Schema, "schema", e.what(), e.diagnostics());
    } catch (const UnsupportedBasis& e) {
        Diagnostic d{"UNSUPPORTED-BASIS", "", e.what(), e.missing()};
        return detail::failure(ExitCode::UnsupportedBasis, "unsupported-basis", e.what(), {d});
    } catch (const InvariantBreach& e) {
        return detail::failure(ExitCode::InvariantBreach, "invariant-breach", e.what());
    } catch (const CommutationViolation& e) {
        return detail::failure(ExitCode::Schema, "invalid-input", e.what());
    } catch (const std::invalid_argument& e) {
        return detail::failure(ExitCode::Schema, "invalid-input", e.what());
    } catch (const std::exception& e) {
        return detail::failure(ExitCode::InvariantBreach, "internal", e.what());
    } catch (...) {
        return detail::failure(ExitCode::InvariantBreach, "internal", "unknown exception");
    }
}

/// Validates and runs one config. Never throws: every failure maps to one
/// exit code with an error object.
inline RunOutcome run(const json& config, const RunOptions& opt = {}) {
    auto start = std::chrono::steady_clock::now();
    RunOutcome o;
    try {
        o = detail::execute(config, opt);
    } catch (...) {
        return classify(std::current_exception());
    }
    std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
    o.report["wall_time_s"] = wall.count();
    return o;
}

/// Report without wall time: the part that is a pure function of config and seed.
inline json payload(const json& report) {
    json p = report;
    p.erase("wall_time_s");
    return p;
}

inline json validate_report(const json& config, const std::string& operation = "") {
    json d = json::array();
    for (const auto& x : validate_config(config, operation)) d.push_back(x.to_json());
    return {{"valid", d.empty()}, {"diagnostics", d}};
}

/// Rows of the report as a flat table, one per sweep value.
inline std::vector<json> report_rows(const json& report) {
    std::vector<json> rows;
    auto add = [&](json row, const json& result) {
        json flat = json::object();
        flatten(result, "", flat);
        for (const auto& [k, v] : flat.items()) row[k] = v;
        rows.push_back(std::move(row));
    };
    if (report.contains("rows")) {
        for (const auto& r : report["rows"]) {
            json row = json::object();
            for (const auto& [k, v] : r.items())
                if (k != "result") row[k] = v;
            add(std::move(row), r["result"]);
        }
    } else {
        add(json::object(), report["result"]);
    }
    if (report.contains("pass"))
        for (auto& r : rows) r["pass"] = report["pass"];
    return rows;
}

/// Writes the report (or error) and any artifacts; returns the exit code.
inline int emit(const RunOutcome& o, const RunOptions& opt, std::ostream& stdout_, std::ostream& stderr_) {
    if (o.report.is_null()) {
        stderr_ << dump17(o.error) << '\n';
        return static_cast<int>(o.code);
    }
    auto write = [&](std::ostream& os) {
        if (opt.format == "csv")
            write_rows_csv(os, report_rows(o.report));
        else
            os << dump17(o.report) << '\n';
    };
    if (opt.out.empty()) {
        write(stdout_);
    } else {
        auto f = open_output(opt.out);
        write(f);
        auto dir = std::filesystem::path(opt.out).parent_path();
        for (const auto& [name, a] : o.artifacts) {
            auto af = open_output((dir / detail::artifact_file(opt.out, name)).string());
            if (const auto* cloud = std::get_if<PointCloud>(&a))
                write_cloud_csv(af, *cloud);
            else
                write_series_csv(af, std::get<TimeSeries>(a));
        }
    }
    return static_cast<int>(o.code);
}

} // namespace nildyn::cli
