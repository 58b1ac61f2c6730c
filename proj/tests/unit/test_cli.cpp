#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "dtc/num/errors.hpp"
#include "output.hpp"

using namespace dtc;
using namespace dtc::cli;
namespace fs = std::filesystem;

namespace {

const Table& table_of(const Artifact& a) { return std::get<Table>(a.body); }
const json& json_of(const Artifact& a) { return std::get<json>(a.body); }

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("dtclab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_binary(const std::string& args) {
    const std::string cmd = std::string(DTCLAB_BINARY) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Output, NumberFormatting) {
    EXPECT_EQ(format_number(4.18272678856123), "4.18272678856");
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1e-16), "1e-16");
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-HUGE_VAL), "-inf");
}

TEST(Output, CsvQuoting) {
    EXPECT_EQ(csv_field("plain"), "plain");
    EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
    EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    EXPECT_EQ(csv_field("two\nlines"), "\"two\nlines\"");
}

TEST(Output, ConfigHashIsKeyOrderIndependent) {
    const json a = json::parse(R"({"b":1,"a":[1,2]})");
    const json b = json::parse(R"({"a":[1,2],"b":1})");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_NE(config_hash(a), config_hash(json::parse(R"({"a":[1,2],"b":2})")));
    EXPECT_EQ(hash_hex(0xabcull), "0000000000000abc");
}

TEST(Output, CsvHeaderAndPayload) {
    Table t{{"n", "label"}, {{std::int64_t{1}, std::string("x,y")}, {std::int64_t{2}, nullptr}}};
    const RunHeader h{"roots", json{{"n_max", 2}}, 1.5};
    const auto text = render_csv(t, h);
    EXPECT_NE(text.find("# config: {\"n_max\":2}\n"), std::string::npos);
    EXPECT_NE(text.find("# config_hash: "), std::string::npos);
    EXPECT_EQ(payload_section(text), "n,label\n1,\"x,y\"\n2,\n");
    const RunHeader slower{"roots", json{{"n_max", 2}}, 99.0};
    EXPECT_EQ(payload_section(render_csv(t, slower)), payload_section(text));
}

TEST(Output, JsonRendering) {
    Table t{{"a"}, {{std::nan("")}}};
    const RunHeader h{"rho-curve", json::object(), 0.0};
    const auto doc = json::parse(render_json({"", t}, h));
    EXPECT_TRUE(doc["payload"]["rows"][0][0].is_null());
    EXPECT_EQ(doc["command"], "rho-curve");
}

TEST(Output, PathsAndStems) {
    const auto dir = scratch_dir("stems");
    EXPECT_EQ(output_stem((dir / "run.csv").string(), "roots"), dir / "run");
    EXPECT_EQ(output_stem(dir.string(), "roots"), dir / "roots");
    const Artifact table{"_series", Table{}};
    const Artifact verdict{"_verdict", json::object()};
    EXPECT_EQ(artifact_path(dir / "x", table, Format::csv), dir / "x_series.csv");
    EXPECT_EQ(artifact_path(dir / "x", table, Format::json), dir / "x_series.json");
    EXPECT_EQ(artifact_path(dir / "x", verdict, Format::csv), dir / "x_verdict.json");
    setenv("DTCLAB_OUT_DIR", dir.c_str(), 1);
    EXPECT_EQ(output_stem("", "winding"), dir / "winding");
    unsetenv("DTCLAB_OUT_DIR");
    EXPECT_THROW(parse_format("xml"), ValidationError);
}

TEST(Config, MergeRejectsUnknownKeysAndWrongTypes) {
    const auto base = default_config("roots");
    EXPECT_EQ(merge_config(base, {{"n_max", 3}})["n_max"], 3);
    EXPECT_THROW(merge_config(base, {{"nmax", 3}}), ValidationError);
    EXPECT_THROW(merge_config(base, {{"n_max", 2.5}}), ValidationError);
    EXPECT_THROW(merge_config(base, {{"method", 1}}), ValidationError);
    EXPECT_THROW(default_config("plot"), ValidationError);
    const auto mb = default_config("manybody");
    EXPECT_NO_THROW(merge_config(mb, {{"alpha", 81.6}}));
}

TEST(Config, LoadsRunDescriptionsAndOutputs) {
    const auto dir = scratch_dir("config");
    {
        std::ofstream(dir / "desc.json") << R"({"command":"roots","n_max":2})";
        std::ofstream(dir / "out.json") << R"({"command":"strobo","config":{"alpha":3.0}})";
        std::ofstream(dir / "out.csv") << "# tool: dtclab 0.1.0\n# command: winding\n# config: {\"grid\":10}\nalpha\n";
        std::ofstream(dir / "bad.json") << "{nope";
    }
    auto a = load_config_file(dir / "desc.json");
    EXPECT_EQ(a.command, "roots");
    EXPECT_EQ(a.config, json({{"n_max", 2}}));
    EXPECT_EQ(load_config_file(dir / "out.json").config["alpha"], 3.0);
    auto c = load_config_file(dir / "out.csv");
    EXPECT_EQ(c.command, "winding");
    EXPECT_EQ(c.config["grid"], 10);
    EXPECT_THROW(load_config_file(dir / "bad.json"), ValidationError);
    EXPECT_THROW(load_config_file(dir / "missing.json"), ValidationError);
}

TEST(Commands, RootsTableShapes) {
    const auto none = run_command("roots", {{"n_max", 0}}, 1);
    ASSERT_EQ(none.size(), 1u);
    EXPECT_TRUE(table_of(none[0]).rows.empty());
    const auto one = run_command("roots", {{"n_max", 1}}, 1);
    const auto& t = table_of(one[0]);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.columns, (std::vector<std::string>{"n", "alpha_n", "theta_n", "residual_modulus"}));
    EXPECT_NEAR(std::get<double>(t.rows[0][1]), 4.21, 0.03);
    EXPECT_THROW(run_command("roots", {{"n_max", 51}}, 1), ValidationError);
}

TEST(Commands, RhoCurve) {
    const auto single = run_command("rho-curve", {{"steps", 1}, {"alpha_min", 4.1827267886}}, 1);
    const auto& t = table_of(single[0]);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_LT(std::get<double>(t.rows[0][1]), 1e-6);
    const auto many = run_command("rho-curve", {{"steps", 11}, {"alpha_min", 40.0}, {"alpha_max", 50.0}}, 3);
    EXPECT_EQ(table_of(many[0]).rows.size(), 11u);
    EXPECT_THROW(run_command("rho-curve", {{"steps", 0}}, 1), ValidationError);
    EXPECT_THROW(run_command("rho-curve", {{"alpha_min", 5.0}, {"alpha_max", 1.0}}, 1), ValidationError);
}

TEST(Commands, WorkerCountDoesNotChangeResults) {
    const json cfg = {{"steps", 9}, {"alpha_min", 1.0}, {"alpha_max", 30.0}};
    const RunHeader h{"rho-curve", cfg, 0.0};
    EXPECT_EQ(render_csv(table_of(run_command("rho-curve", cfg, 1)[0]), h),
              render_csv(table_of(run_command("rho-curve", cfg, 4)[0]), h));
}

TEST(Commands, StroboVerdicts) {
    const auto out = run_command("strobo", {{"alpha", 17.0675317368}, {"n_periods", 300}}, 1);
    ASSERT_EQ(out.size(), 2u);
    EXPECT_EQ(out[1].suffix, "_verdict");
    EXPECT_EQ(json_of(out[1])["kind"], "period-2");
    const auto erg = run_command("strobo", {{"alpha", 8.0}}, 1);
    EXPECT_EQ(json_of(erg[1])["kind"], "ergodic-like");
    const auto part = run_command("strobo", {{"alpha", 8.0}, {"psi0", {0.6, 0.8}}}, 1);
    EXPECT_LT(json_of(part[1])["coverage_fraction"].get<double>(), 1.0);
    const auto shortrun = run_command("strobo", {{"n_periods", 10}}, 1);
    EXPECT_TRUE(json_of(shortrun[1])["kind"].is_null());
    EXPECT_THROW(run_command("strobo", {{"psi0", {1.0, 1.0}}}, 1), ValidationError);
    EXPECT_THROW(run_command("strobo", {{"psi0", "sometimes"}}, 1), ValidationError);
}

TEST(Commands, StroboRandomStateFollowsSeed) {
    const auto a = run_command("strobo", {{"psi0", "random"}, {"seed", 4}, {"n_periods", 60}}, 1);
    const auto b = run_command("strobo", {{"psi0", "random"}, {"seed", 4}, {"n_periods", 60}}, 1);
    const auto c = run_command("strobo", {{"psi0", "random"}, {"seed", 5}, {"n_periods", 60}}, 1);
    EXPECT_EQ(json_of(a[1])["psi0"], json_of(b[1])["psi0"]);
    EXPECT_NE(json_of(a[1])["psi0"], json_of(c[1])["psi0"]);
}

TEST(Commands, ManybodyZeroPeriodsIsHeaderOnly) {
    const auto out = run_command("manybody", {{"alpha", 81.6}, {"n_periods", 0}, {"sites", 4}}, 1);
    ASSERT_EQ(out.size(), 4u);
    for (int i = 0; i < 3; ++i) EXPECT_TRUE(table_of(out[static_cast<std::size_t>(i)]).rows.empty());
    EXPECT_TRUE(json_of(out[3])["tau"].is_null());
}

TEST(Commands, ManybodySingleSiteMatchesOracle) {
    const json cfg = {{"alpha", 4.1827267886}, {"sites", 1}, {"coupling", 0.0}, {"n_periods", 8},
                      {"oracle", true}, {"tol", 1e-11}};
    const auto out = run_command("manybody", cfg, 1);
    ASSERT_EQ(out.size(), 5u);
    const auto& series = table_of(out[0]);
    const auto& oracle = table_of(out[4]);
    ASSERT_EQ(series.rows.size(), oracle.rows.size());
    for (std::size_t k = 0; k < series.rows.size(); ++k) {
        EXPECT_NEAR(std::get<double>(series.rows[k][1]), std::get<double>(oracle.rows[k][1]), 1e-6);
    }
    EXPECT_THROW(run_command("manybody", {{"alpha", 1.0}, {"oracle", true}}, 1), ValidationError);
    EXPECT_THROW(run_command("manybody", json::object(), 1), ValidationError);
}

TEST(Commands, ManybodyResolvesRootAlpha) {
    const auto out = run_command("manybody", {{"alpha_root", 1}, {"sites", 2}, {"n_periods", 2}}, 1);
    EXPECT_NEAR(json_of(out[3])["alpha"].get<double>(), 4.1827267886, 1e-8);
}

TEST(Commands, ScalingNeedsThreeSizes) {
    try {
        run_command("scaling", {{"sites", {4}}, {"alpha", 81.6}}, 1);
        FAIL() << "expected a validation error";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("insufficient points for fit"), std::string::npos);
    }
}

TEST(Commands, ScalingSmallGrid) {
    const json cfg = {{"sites", {2, 3, 4}}, {"alpha", 81.6}, {"horizon", 5000}};
    const auto out = run_command("scaling", cfg, 2);
    ASSERT_EQ(out.size(), 2u);
    const auto& t = table_of(out[0]);
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(std::get<std::int64_t>(t.rows[0][0]), 2);
    const auto& fit = json_of(out[1]);
    EXPECT_EQ(fit["sensitivity"].size(), 5u);
    EXPECT_TRUE(fit.contains("b"));
    const auto again = run_command("scaling", cfg, 1);
    EXPECT_EQ(json_of(again[1]).dump(), fit.dump());
}

TEST(Commands, Winding) {
    const auto out = run_command("winding", json::object(), 1);
    const auto& t = table_of(out[0]);
    ASSERT_EQ(t.rows.size(), 3u);
    for (const auto& r : t.rows) EXPECT_NEAR(std::get<double>(r[1]), 0.5, 1e-6);
    EXPECT_THROW(run_command("winding", {{"alpha", {0.0}}}, 1), NumericalError);
}

TEST(Binary, ExitCodes) {
    const auto dir = scratch_dir("binary");
    EXPECT_EQ(run_binary("roots --n-max 0 --out " + dir.string() + "/"), 0);
    EXPECT_TRUE(fs::exists(dir / "roots.csv"));
    EXPECT_EQ(run_binary("roots --n-max 99 --out " + dir.string() + "/"), 2);
    EXPECT_EQ(run_binary("roots --unknown-flag"), 2);
    EXPECT_EQ(run_binary("winding --alpha 0 --out " + dir.string() + "/"), 3);
    EXPECT_EQ(run_binary("scaling --sites 4 --alpha 81.6 --out " + dir.string() + "/"), 2);
    EXPECT_EQ(run_binary("--help"), 0);
}

TEST(Binary, DeterministicPayloadAndConfigRoundTrip) {
    const auto dir = scratch_dir("roundtrip");
    const std::string out = " --out " + (dir / "a").string();
    ASSERT_EQ(run_binary("rho-curve --steps 5 --alpha-max 20" + out), 0);
    ASSERT_EQ(run_binary("rho-curve --steps 5 --alpha-max 20 --out " + (dir / "b").string()), 0);
    const auto a = slurp(dir / "a.csv");
    EXPECT_EQ(payload_section(a), payload_section(slurp(dir / "b.csv")));
    ASSERT_EQ(run_binary("rho-curve --config " + (dir / "a.csv").string() + " --out " + (dir / "c").string()), 0);
    EXPECT_EQ(payload_section(a), payload_section(slurp(dir / "c.csv")));
    EXPECT_EQ(run_binary("strobo --config " + (dir / "a.csv").string()), 2);
    ASSERT_EQ(run_binary("rho-curve --steps 5 --format json --out " + (dir / "d").string()), 0);
    EXPECT_NO_THROW(json::parse(slurp(dir / "d.json")));
}

TEST(Binary, ConfigOverridesFlags) {
    const auto dir = scratch_dir("override");
    std::ofstream(dir / "run.json") << R"({"command":"roots","config":{"n_max":2}})";
    ASSERT_EQ(run_binary("roots --n-max 5 --config " + (dir / "run.json").string() + " --out " +
                         (dir / "r").string()),
              0);
    const auto text = slurp(dir / "r.csv");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 5 + 1 + 2);
}
