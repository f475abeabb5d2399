#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cvsense/cli/commands.hpp"
#include "cvsense/cli/config.hpp"
#include "cvsense/cli/output.hpp"

namespace fs = std::filesystem;
using namespace cvsense::cli;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cvsense_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ConfigFile parse(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "test.cfg");
}

}  // namespace

TEST(Config, ParsesEntriesAndComments) {
    const ConfigFile c = parse("# header\nM = 4\n\n  eta = 1, 0.8   # trailing\nscheme=entangled\n");
    ASSERT_EQ(c.entries.size(), 3u);
    EXPECT_EQ(c.entries.at("M").value, "4");
    EXPECT_EQ(c.entries.at("M").line, 2);
    EXPECT_EQ(c.entries.at("eta").value, "1, 0.8");
    EXPECT_EQ(c.entries.at("eta").line, 4);
}

TEST(Config, ErrorsCarryLineNumbers) {
    try {
        parse("M = 4\nM = 5\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("test.cfg:2"), std::string::npos) << e.what();
    }
    try {
        parse("M = 4\nno equals sign\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("test.cfg:2"), std::string::npos) << e.what();
    }
}

TEST(Config, ConvertValue) {
    EXPECT_EQ(convert_value("1e6", ParamKind::integer, "x"), 1000000);
    EXPECT_THROW(convert_value("1.5", ParamKind::integer, "x"), ConfigError);
    EXPECT_DOUBLE_EQ(convert_value("0.25", ParamKind::real, "x").get<double>(), 0.25);
    EXPECT_THROW(convert_value("abc", ParamKind::real, "x"), ConfigError);
    EXPECT_EQ(convert_value("1, 2,3", ParamKind::integer_list, "x"), nlohmann::json({1, 2, 3}));
    EXPECT_EQ(convert_value("a, b", ParamKind::text_list, "x"), nlohmann::json({"a", "b"}));
}

TEST(Config, ResolvePrecedence) {
    const std::vector<ParamSpec> schema = {{"M", ParamKind::integer, 10, "nodes"},
                                           {"eta", ParamKind::real_list, {1.0}, "transmissivity"},
                                           {"seed", ParamKind::integer, 1, "seed"}};
    const ConfigFile c = parse("M = 4\neta = 0.5, 0.9\n");
    const auto p = resolve_params(schema, &c, {{"M", "7"}});
    EXPECT_EQ(p.at("M"), 7);
    EXPECT_EQ(p.at("eta"), nlohmann::json({0.5, 0.9}));
    EXPECT_EQ(p.at("seed"), 1);
}

TEST(Config, UnknownKeyReportsLine) {
    const std::vector<ParamSpec> schema = {{"M", ParamKind::integer, 10, "nodes"}};
    const ConfigFile c = parse("M = 4\nbogus = 1\n");
    try {
        resolve_params(schema, &c, {});
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("test.cfg:2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
    }
}

TEST(Config, FlagNames) {
    EXPECT_EQ(flag_name({"points_per_decade", ParamKind::integer, 20, ""}), "points-per-decade");
    EXPECT_EQ(flag_name({"N_S", ParamKind::real, 1.0, "", "total-photons"}), "total-photons");
    EXPECT_EQ(flag_name({"M_max", ParamKind::integer, 1, ""}), "m-max");
}

TEST(LogSpacing, Endpoints) {
    const auto v = log_spaced_nodes(10, 10000, 20);
    EXPECT_EQ(v.front(), 10);
    EXPECT_EQ(v.back(), 10000);
    for (std::size_t i = 1; i < v.size(); ++i) EXPECT_GT(v[i], v[i - 1]);
    EXPECT_EQ(log_spaced_nodes(1, 1, 20), std::vector<int>{1});
    // Rounded duplicates at the bottom collapse.
    const auto small = log_spaced_nodes(1, 10, 20);
    EXPECT_LE(small.size(), 10u);
}

TEST(Csv, FormatAndShape) {
    const fs::path dir = scratch_dir("csv");
    {
        CsvWriter w(dir / "t.csv", {"a", "b", "c"});
        w << 1 << 0.1 << std::vector<double>{1.5, 2.0};
        w.end_row();
        w << "x" << 1e-20 << std::vector<double>{};
        w.end_row();
    }
    EXPECT_EQ(slurp(dir / "t.csv"), "a,b,c\n1,0.1,1.5;2\nx,1e-20,\n");
    EXPECT_EQ(format_real(1.0 / 3.0), "0.333333333333333");
}

TEST(Csv, RejectsRowLengthMismatch) {
    const fs::path dir = scratch_dir("csv_bad");
    CsvWriter w(dir / "t.csv", {"a", "b"});
    w << 1;
    EXPECT_ANY_THROW(w.end_row());
}

TEST(Manifest, Sha256OfKnownBytes) {
    const fs::path dir = scratch_dir("sha");
    std::ofstream(dir / "abc.txt", std::ios::binary) << "abc";
    EXPECT_EQ(sha256_file(dir / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    EXPECT_EQ(manifest_path_for("out/curve.csv"), fs::path("out/curve.manifest.json"));
}

TEST(Manifest, FieldsAndReplay) {
    const fs::path dir = scratch_dir("manifest");
    const Command& cmd = find_command("rms-curve");
    const auto params = resolve_params(cmd.schema, nullptr, {{"M_max", "100"}, {"eta", "1, 0.9"}});
    const RunRecord rec = execute(cmd, params, dir / "curve.csv");
    EXPECT_EQ(rec.exit_code, kExitSuccess);

    std::ifstream in(dir / "curve.manifest.json");
    const auto m = nlohmann::json::parse(in);
    EXPECT_EQ(m.at("schema_version"), kManifestSchemaVersion);
    EXPECT_EQ(m.at("command"), "rms-curve");
    EXPECT_EQ(m.at("parameters"), params);
    EXPECT_EQ(m.at("exit_code"), 0);
    EXPECT_TRUE(m.contains("timestamp"));
    EXPECT_TRUE(m.contains("tool_version"));
    EXPECT_TRUE(m.contains("threads"));
    ASSERT_EQ(m.at("outputs").size(), 1u);
    EXPECT_EQ(m.at("outputs")[0].at("sha256"), sha256_file(dir / "curve.csv"));

    const ReplayResult r = replay(dir / "curve.manifest.json", dir / "replay");
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(slurp(dir / "curve.csv"), slurp(r.outputs.front()));
}

TEST(Manifest, ReplayDetectsTampering) {
    const fs::path dir = scratch_dir("tamper");
    const Command& cmd = find_command("ratio-curve");
    execute(cmd, resolve_params(cmd.schema, nullptr, {{"mode", "vs-M"}, {"M_max", "50"}}), dir / "r.csv");
    std::ofstream(dir / "r.csv", std::ios::app) << "junk\n";
    std::ifstream in(dir / "r.manifest.json");
    auto m = nlohmann::json::parse(in);
    m["outputs"][0]["sha256"] = sha256_file(dir / "r.csv");
    std::ofstream(dir / "r.manifest.json") << m.dump(2);
    EXPECT_FALSE(replay(dir / "r.manifest.json", dir / "replay").ok());
}

TEST(Commands, AllRegistered) {
    for (const char* name : {"rms-curve", "ratio-curve", "monte-carlo", "weighted", "fisher", "phase"}) {
        EXPECT_NO_THROW(find_command(name)) << name;
    }
    EXPECT_ANY_THROW(find_command("nope"));
}

TEST(Commands, MonteCarloRowsAndDeterminism) {
    const fs::path dir = scratch_dir("mc");
    const Command& cmd = find_command("monte-carlo");
    const auto params = resolve_params(cmd.schema, nullptr,
                                       {{"M", "4"},
                                        {"N_S", "4"},
                                        {"eta", "1, 0.8"},
                                        {"scheme", "entangled, product"},
                                        {"trials", "20000"},
                                        {"seed", "5"}});
    const RunRecord a = execute(cmd, params, dir / "a.csv");
    const RunRecord b = execute(cmd, params, dir / "b.csv");
    EXPECT_EQ(a.exit_code, kExitSuccess);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    std::istringstream lines(slurp(dir / "a.csv"));
    std::string line;
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    EXPECT_EQ(rows, 1 + 4);  // header + {entangled, product} x {1, 0.8}
}

TEST(Commands, PhaseGuardIsConfigError) {
    const fs::path dir = scratch_dir("phase");
    const Command& cmd = find_command("phase");
    EXPECT_THROW(execute(cmd, resolve_params(cmd.schema, nullptr, {{"phases", "0.5"}}), dir / "p.csv"), ConfigError);
}
