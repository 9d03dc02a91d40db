#include "nildyn/cli/run.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace nildyn;
using namespace nildyn::cli;

namespace {

const std::string kConfigDir = NILDYN_CONFIG_DIR;
const std::string kCli = NILDYN_CLI_PATH;

const char* kSqrt2 = "1.41421356237309504880168872420969807856967187537694";
const char* kSqrt3 = "1.73205080756887729352744634150587236694280525381038";
const char* kSqrt6 = "2.44948974278317809819728407470589139196594748065667";

json config(const std::string& name) { return load_config(kConfigDir + "/" + name); }

json torus_minimal(const json& t) {
    return {{"operation", "minimal"},
            {"basis", {{"√2", kSqrt2}, {"√3", kSqrt3}}},
            {"system", {{"type", "torus-flow"}, {"freqs", {"1", "√2"}}}},
            {"params", {{"t", t}}}};
}

json heis_pair(double delta, std::uint64_t budget, double y_x) {
    return {{"operation", "rp-certify"},
            {"system", {{"type", "heisenberg-nilsystem"}, {"generator", {0.41421356237309503, 0.7320508075688772, 0.0}}}},
            {"params", {{"x", {0.2, 0.3, 0.1}}, {"y", {y_x, 0.3, 0.6}}, {"delta", delta}, {"budget", budget}}}};
}

int shell_exit(const std::string& cmd) {
    int status = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Format17, RoundTripsDoubles) {
    EXPECT_EQ(format17(0.1), "0.10000000000000001");
    EXPECT_EQ(format17(1.0), "1");
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
        EXPECT_EQ(std::stod(format17(v)), v);
    }
}

TEST(Format17, JsonWriterUsesSeventeenDigits) {
    json j{{"a", 0.1}, {"b", json::array({1, 2.5})}, {"c", "x"}, {"d", std::nan("")}};
    auto text = dump17(j, -1);
    EXPECT_EQ(text, R"({"a":0.10000000000000001,"b":[1,2.5],"c":"x","d":null})");
    EXPECT_EQ(json::parse(dump17(j))["a"].get<double>(), 0.1);
}

TEST(Validate, WellFormedConfigHasNoDiagnostics) {
    EXPECT_TRUE(validate_config(torus_minimal("1")).empty());
    EXPECT_TRUE(validate_config(config("nd_compare.json")).empty());
}

TEST(Validate, EveryShippedConfigIsClean) {
    for (const auto& entry : std::filesystem::directory_iterator(kConfigDir)) {
        if (entry.path().filename() == "unsupported_basis.json") continue;
        auto diags = validate_config(load_config(entry.path().string()));
        EXPECT_TRUE(diags.empty()) << entry.path() << ": " << dump17(diags.empty() ? json() : diags[0].to_json());
    }
}

TEST(Validate, RepeatedAlphasGiveOneDiagnosticNamingTheField) {
    json c = config("embed.json");
    c["params"]["alphas"] = {1.5, 1.5};
    auto diags = validate_config(c);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].field, "params.alphas");
    EXPECT_NE(diags[0].message.find("distinct"), std::string::npos);
}

TEST(Validate, MissingProductIsReportedByName) {
    auto diags = validate_config(torus_minimal("√3"));
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].code, "UNSUPPORTED-BASIS");
    ASSERT_EQ(diags[0].missing.size(), 1u);
    EXPECT_EQ(diags[0].missing[0], "√2·√3");
}

TEST(Validate, DeclaringTheProductClosesTheBasis) {
    json c = torus_minimal("√3");
    c["basis"]["√6"] = kSqrt6;
    EXPECT_TRUE(validate_config(c).empty());
}

TEST(Validate, CollectsEveryProblem) {
    json c{{"operation", "rp-certify"},
           {"system", {{"type", "torus-map"}, {"freqs", {0.3}}}},
           {"params", {{"x", {0.1, 0.2}}, {"delta", -1}, {"bogus", 1}}},
           {"extra", true}};
    auto diags = validate_config(c);
    std::set<std::string> fields;
    for (const auto& d : diags) fields.insert(d.field);
    EXPECT_TRUE(fields.count("extra"));
    EXPECT_TRUE(fields.count("params.bogus"));
    EXPECT_TRUE(fields.count("params.delta"));
    EXPECT_TRUE(fields.count("params.y"));
    EXPECT_TRUE(fields.count("params.x"));
}

TEST(Validate, WrongSqrtDecimalIsFlagged) {
    json c = torus_minimal("1");
    c["basis"]["√2"] = "1.73";
    auto diags = validate_config(c);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].field, "basis.√2");
}

TEST(Validate, ListFormBasisIsAccepted) {
    json c = torus_minimal("1");
    c["basis"] = json::array({{{"symbol", "√2"}, {"decimal", kSqrt2}}});
    EXPECT_TRUE(validate_config(c).empty());
}

TEST(Validate, SubcommandMustMatchOperation) {
    auto diags = validate_config(torus_minimal("1"), "cube");
    ASSERT_FALSE(diags.empty());
    EXPECT_EQ(diags[0].field, "operation");
}

TEST(Validate, SweepChecksEveryValue) {
    json c = torus_minimal("1");
    c["params"].erase("t");
    c["sweep"] = {{"param", "t"}, {"values", {"1", "√3"}}};
    auto diags = validate_config(c);
    ASSERT_EQ(diags.size(), 1u);
    EXPECT_EQ(diags[0].code, "UNSUPPORTED-BASIS");
}

TEST(Run, MinimalTimeOneIsNotMinimal) {
    auto o = run(config("minimal_time1.json"));
    EXPECT_EQ(o.code, ExitCode::Ok);
    EXPECT_FALSE(o.report["result"]["minimal"].get<bool>());
    EXPECT_TRUE(o.report["pass"].get<bool>());
}

TEST(Run, DiagonalPairCertifies) {
    auto o = run(config("rp_diagonal.json"));
    EXPECT_EQ(o.code, ExitCode::Ok);
    EXPECT_EQ(o.report["result"]["status"], "FOUND");
    EXPECT_TRUE(o.report["result"]["witness"]["verified"].get<bool>());
    for (const char* k : {"x_prime", "y_prime", "g", "delta", "verified"})
        EXPECT_TRUE(o.report["result"]["witness"].contains(k)) << k;
}

TEST(Run, NdCompareCommutingRotationsPasses) {
    auto o = run(config("nd_compare.json"));
    EXPECT_EQ(o.code, ExitCode::Ok);
    EXPECT_LE(o.report["result"]["hausdorff"].get<double>(), 0.02);
    EXPECT_TRUE(o.report["pass"].get<bool>());
    EXPECT_EQ(o.artifacts.size(), 4u);
}

TEST(Run, ReportEchoesResolvedConfigAndSeed) {
    auto o = run(config("rp_diagonal.json"), {"", 42, "", "json"});
    EXPECT_EQ(o.report["seed"], 42);
    EXPECT_EQ(o.report["config"]["seed"], 42);
    EXPECT_EQ(o.report["config"]["params"]["budget"], 1000000);
    EXPECT_EQ(o.report["config"]["params"]["d"], 1);
    EXPECT_TRUE(o.report.contains("wall_time_s"));
    EXPECT_TRUE(o.report.contains("budget_consumed"));
}

TEST(Run, PassFieldOnlyWithExpectations) {
    json c = config("ud.json");
    auto o = run(c);
    EXPECT_FALSE(o.report.contains("pass"));
    EXPECT_FALSE(o.report.contains("expectations"));
    c["expect"] = {{"ud_sup", {{"min", 0.35}, {"max", 0.36}}}};
    o = run(c);
    EXPECT_TRUE(o.report["pass"].get<bool>());
}

TEST(Run, FailedExpectationExitsOne) {
    json c = config("minimal_time1.json");
    c["expect"]["minimal"] = true;
    auto o = run(c);
    EXPECT_EQ(o.code, ExitCode::ExpectationFailed);
    EXPECT_FALSE(o.report["pass"].get<bool>());
}

TEST(Run, SchemaViolationExitsTwo) {
    json c = torus_minimal("1");
    c["params"]["bogus"] = 1;
    auto o = run(c);
    EXPECT_EQ(o.code, ExitCode::Schema);
    EXPECT_TRUE(o.report.is_null());
    EXPECT_EQ(o.error["diagnostics"][0]["field"], "params.bogus");
}

TEST(Run, UnsupportedBasisExitsThree) {
    auto o = run(torus_minimal("√3"));
    EXPECT_EQ(o.code, ExitCode::UnsupportedBasis);
    EXPECT_EQ(o.error["diagnostics"][0]["missing"][0], "√2·√3");
}

TEST(Run, ExhaustedSearchExitsFour) {
    auto o = run(heis_pair(0.01, 50, 0.7));
    EXPECT_EQ(o.code, ExitCode::BudgetExhausted);
    EXPECT_EQ(o.report["result"]["status"], "EXHAUSTED");
}

TEST(Run, ProvenAbsentIsNotAFailure) {
    auto o = run(config("rp_isometry_sweep.json"));
    EXPECT_EQ(o.code, ExitCode::Ok);
}

TEST(Run, ExitCodeMappingIsTotal) {
    auto code = [](auto ex) { return classify(std::make_exception_ptr(ex)).code; };
    EXPECT_EQ(code(SchemaError("f", "m")), ExitCode::Schema);
    EXPECT_EQ(code(UnsupportedBasis({"√2·√3"})), ExitCode::UnsupportedBasis);
    EXPECT_EQ(code(InvariantBreach("x")), ExitCode::InvariantBreach);
    EXPECT_EQ(code(IndependenceViolation("x")), ExitCode::Schema);
    EXPECT_EQ(code(DimensionMismatch("x")), ExitCode::Schema);
    EXPECT_EQ(code(CommutationViolation("x")), ExitCode::Schema);
    EXPECT_EQ(code(std::runtime_error("x")), ExitCode::InvariantBreach);
    EXPECT_EQ(classify(std::make_exception_ptr(17)).code, ExitCode::InvariantBreach);
}

TEST(Run, NonCommutingActionsAreRejected) {
    json c = config("nd_compare.json");
    c["system"] = {{"type", "heisenberg-nilsystem"}, {"generator", {0.3, 0.0, 0.0}}};
    c["system_h"] = {{"type", "heisenberg-nilsystem"}, {"generator", {0.0, 0.5, 0.0}}};
    c["params"]["x"] = {0.1, 0.2, 0.3};
    c["params"]["budget"] = 100;
    EXPECT_EQ(run(c).code, ExitCode::Schema);
}

TEST(Run, SweepBecomesATable) {
    auto o = run(config("minimal_sweep.json"));
    ASSERT_EQ(o.code, ExitCode::Ok);
    const auto& rows = o.report["rows"];
    ASSERT_EQ(rows.size(), 5u);
    std::vector<bool> minimal;
    for (const auto& r : rows) minimal.push_back(r["result"]["minimal"].get<bool>());
    EXPECT_EQ(minimal, (std::vector<bool>{false, false, true, false, true}));
    auto table = report_rows(o.report);
    ASSERT_EQ(table.size(), 5u);
    EXPECT_EQ(table[2]["t"], "√3");
    EXPECT_EQ(table[2]["minimal"], true);
}

TEST(Run, SweepExpectationsApplyToEveryRow) {
    auto o = run(config("rp_isometry_sweep.json"));
    EXPECT_EQ(o.report["expectations"].size(), 3u);
    EXPECT_TRUE(o.report["pass"].get<bool>());
}

TEST(Determinism, EqualSeedsGiveEqualPayloads) {
    for (const char* name : {"average_haar.json", "minimal_sweep.json", "rp_heisenberg_fiber.json", "cube_small"}) {
        json c = std::string(name) == "cube_small"
                     ? json{{"operation", "cube"},
                            {"system", {{"type", "torus-map"}, {"freqs", {0.3}}}},
                            {"params", {{"x", {0.1}}, {"budget", 500}}}}
                     : config(name);
        auto a = run(c, {"", 9, "", "json"});
        auto b = run(c, {"", 9, "", "json"});
        EXPECT_EQ(dump17(payload(a.report)), dump17(payload(b.report))) << name;
    }
}

TEST(Determinism, SeedChangesMonteCarloPayload) {
    auto a = run(config("average_haar.json"), {"", 1, "", "json"});
    auto b = run(config("average_haar.json"), {"", 2, "", "json"});
    EXPECT_NE(dump17(a.report["result"]), dump17(b.report["result"]));
}

TEST(Lookup, DottedPathsAndIndices) {
    json j{{"a", {{"b", json::array({10, 20})}}}};
    ASSERT_NE(lookup(j, "a.b.1"), nullptr);
    EXPECT_EQ(*lookup(j, "a.b.1"), 20);
    EXPECT_EQ(lookup(j, "a.c"), nullptr);
    EXPECT_EQ(lookup(j, "a.b.5"), nullptr);
    EXPECT_FALSE(expectation_holds(json(1), nullptr));
    EXPECT_TRUE(expectation_holds(json{{"max", 0.5}}, lookup(json{{"v", 0.25}}, "v")));
}

TEST(Csv, SeriesRoundTrip) {
    TimeSeries s({0.0, 0.5, 1.0}, {Complex(1, 2), Complex(0.1, 0), Complex(-3, 0.25)}, true);
    std::stringstream ss;
    write_series_csv(ss, s);
    auto back = read_series_csv(ss);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_TRUE(back.is_complex());
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(back.grid()[i], s.grid()[i]);
        EXPECT_EQ(back.values()[i], s.values()[i]);
    }
}

TEST(Csv, CloudHeaderAndRows) {
    PointCloud c(2, 2);
    std::vector<Point> tuple{{0.1, 0.2}, {0.3, 0.4}};
    c.add(tuple);
    std::stringstream ss;
    write_cloud_csv(ss, c);
    EXPECT_EQ(ss.str(), "p0_0,p0_1,p1_0,p1_1\n0.10000000000000001,0.20000000000000001,0.29999999999999999,0.40000000000000002\n");
}

TEST(Cli, SubcommandsAndExitCodes) {
    EXPECT_EQ(shell_exit(kCli + " minimal --config " + kConfigDir + "/minimal_time1.json"), 0);
    EXPECT_EQ(shell_exit(kCli + " run --config " + kConfigDir + "/unsupported_basis.json"), 3);
    EXPECT_EQ(shell_exit(kCli + " validate --config " + kConfigDir + "/unsupported_basis.json"), 0);
    EXPECT_EQ(shell_exit(kCli + " cube --config " + kConfigDir + "/minimal_time1.json"), 2);
    EXPECT_EQ(shell_exit(kCli + " minimal --config /nonexistent.json"), 2);
    EXPECT_EQ(shell_exit(kCli + " minimal"), 2);
}

TEST(Cli, WritesReportAndSiblingArtifacts) {
    auto dir = std::filesystem::temp_directory_path() / "nildyn_cli_test";
    std::filesystem::create_directories(dir);
    auto out = (dir / "nd.json").string();
    ASSERT_EQ(shell_exit(kCli + " ud --config " + kConfigDir + "/ud.json --out " + out), 0);
    auto report = load_config(out);
    EXPECT_EQ(report["artifacts"]["window_averages"], "nd.window_averages.csv");
    EXPECT_TRUE(std::filesystem::exists(dir / "nd.window_averages.csv"));
    auto csv_out = (dir / "nd.csv").string();
    ASSERT_EQ(shell_exit(kCli + " ud --format csv --config " + kConfigDir + "/ud.json --out " + csv_out), 0);
    std::ifstream f(csv_out);
    std::string header;
    std::getline(f, header);
    EXPECT_EQ(header, "ud_sup,windows,argmax.sigma,argmax.rho");
    std::filesystem::remove_all(dir);
}
