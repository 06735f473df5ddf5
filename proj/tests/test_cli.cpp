#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "bmlab/cli.hpp"

using namespace bmlab;
using namespace bmlab::cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_in_process(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

// Runs the built executable through the shell and captures stdout.
Result run_exe(const std::string& args) {
    const std::string cmd = std::string(BM_LAB_EXE) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    std::size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, got);
    const int status = pclose(p);
    return {WEXITSTATUS(status), out, ""};
}

nlohmann::ordered_json parse(const std::string& s) { return nlohmann::ordered_json::parse(s); }

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("bmlab_cli_" + name); }

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

} // namespace

TEST(ParseGenerator, Examples) {
    EXPECT_EQ(std::get<GeneratorSource>(parse_generator("lattice:1")), (GeneratorSource{BuiltinGenerator::Lattice, 1.0}));
    EXPECT_EQ(std::get<GeneratorSource>(parse_generator("lattice:0.5")).step, 0.5);
    EXPECT_EQ(std::get<GeneratorSource>(parse_generator("squares")).kind, BuiltinGenerator::Squares);
    EXPECT_EQ(std::get<GeneratorSource>(parse_generator("logperturbed")).kind, BuiltinGenerator::LogPerturbed);
    EXPECT_EQ(std::get<GeneratorSource>(parse_generator("qcos-zeros")).kind, BuiltinGenerator::QcosZeros);
    EXPECT_EQ(std::get<FileSource>(parse_generator("file:/tmp/x.txt")).path, "/tmp/x.txt");
    for (const char* bad : {"lattice:0", "lattice:-1", "lattice:abc", "lattice:", "lattice:1x", "cubes", "file:"}) {
        try {
            parse_generator(bad);
            ADD_FAILURE() << bad;
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::UnknownGenerator) << bad;
        }
    }
}

TEST(GenerateSource, WindowIsSymmetric) {
    const auto s = generate_source({BuiltinGenerator::Squares, 1.0}, 100);
    EXPECT_EQ(s.window().lo, -100.0);
    EXPECT_EQ(s.window().hi, 100.0);
    EXPECT_EQ(s.size(), 21u);
    const auto q = generate_source({BuiltinGenerator::QcosZeros, 1.0}, 10);
    EXPECT_EQ(q.size(), 6u);
}

TEST(RunConfig, RoundTripsThroughArguments) {
    RunConfig a;
    a.subcommand = Subcommand::Density;
    a.seq = "lattice:0.5";
    a.radii = {10, 1e4};
    a.tol = 0.05;
    RunConfig b;
    b.subcommand = Subcommand::Cauchy;
    b.gap = 3.14159;
    b.a = {-0.7853981633974483, 0.1};
    b.sizes = {256};
    b.out = "/tmp/o.json";
    b.csv_out = "/tmp/o.csv";
    b.json = false;
    b.smoothness = "3";
    b.y = {1, 2, 4, 8};
    RunConfig c;
    c.subcommand = Subcommand::Ftype;
    c.function = "cos";
    c.a = {2};
    c.y_max = 25;
    RunConfig d;
    d.subcommand = Subcommand::GapMeasure;
    d.gap = 1;
    d.grid_step = 1e-3;
    d.interval_lo = 0.25;
    d.interval_hi = 0.75;
    d.input = "in.csv";
    for (const auto* cfg : {&a, &b, &c, &d}) EXPECT_EQ(parse_args(to_args(*cfg)), *cfg);
}

TEST(RunConfig, RepeatableFlagsKeepOrder) {
    const auto c = parse_args({"gap-probe", "--seq", "lattice:1", "--gap", "3", "--n", "21", "--n", "51"});
    EXPECT_EQ(c.sizes, (std::vector<std::size_t>{21, 51}));
    const auto d = parse_args({"density", "--radius", "5", "--seq", "squares", "--radius", "7"});
    EXPECT_EQ(d.radii, (std::vector<double>{5, 7}));
}

TEST(ExitCodes, UsageErrors) {
    for (const std::vector<std::string>& args :
         std::vector<std::vector<std::string>>{{},
                                               {"density"},
                                               {"frobnicate"},
                                               {"density", "--seq", "lattice:1", "--bogus", "1"},
                                               {"density", "--seq", "lattice:1", "--tol", "-1"},
                                               {"density", "--seq", "lattice:1", "--tol", "abc"},
                                               {"density", "--seq", "cubes"},
                                               {"gap-measure", "--gap", "7"},
                                               {"gap-probe", "--seq", "lattice:1", "--gap", "3", "--n", "600"},
                                               {"bm", "--seq", "lattice:1"},
                                               {"ftype", "--function", "sin"}}) {
        const auto r = run_in_process(args);
        EXPECT_EQ(r.code, exit_code::usage) << (args.empty() ? "" : args[0]);
        EXPECT_FALSE(r.err.empty());
    }
}

TEST(ExitCodes, DataErrors) {
    EXPECT_EQ(run_in_process({"density", "--input", "/nonexistent/seq.txt"}).code, exit_code::data);
    const auto dup = temp_file("dup.txt");
    {
        std::ofstream f(dup);
        f << "0\n1\n1\n2\n";
    }
    EXPECT_EQ(run_in_process({"density", "--input", dup.string()}).code, exit_code::data);
    EXPECT_EQ(run_in_process({"density", "--seq", "file:" + dup.string()}).code, exit_code::data);
    fs::remove(dup);
}

TEST(ExitCodes, InconclusiveAndDefinite) {
    const auto inc = run_in_process({"density", "--seq", "lattice:1", "--radius", "10", "--tol", "0.01"});
    EXPECT_EQ(inc.code, exit_code::inconclusive);
    EXPECT_EQ(parse(inc.out)["verdict"], "Inconclusive");
    const auto ok = run_in_process({"density", "--seq", "lattice:1", "--radius", "1e4", "--tol", "0.05"});
    EXPECT_EQ(ok.code, exit_code::definite);
    const auto j = parse(ok.out);
    EXPECT_EQ(j["verdict"], "Polya");
    EXPECT_GE(j["density"]["a_lower"].get<double>(), 0.95);
    EXPECT_LE(j["density"]["a_upper"].get<double>(), 1.05);
}

TEST(JsonFormat, FixedKeyOrderAndFullPrecision) {
    const auto r = run_in_process({"density", "--seq", "lattice:1", "--radius", "100", "--tol", "0.05"});
    const auto j = parse(r.out);
    std::vector<std::string> keys;
    for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
    ASSERT_GE(keys.size(), 3u);
    EXPECT_EQ(keys.front(), "command");
    EXPECT_EQ(keys[1], "parameters");
    EXPECT_EQ(keys.back(), "exit_code");
    EXPECT_NE(r.out.find("0.050000000000000003"), std::string::npos);
    // Every float printed round-trips exactly.
    EXPECT_EQ(j["parameters"]["tol"].get<double>(), 0.05);
    EXPECT_EQ(r.out.back(), '\n');
}

TEST(Determinism, ByteIdenticalAcrossProcesses) {
    const std::string args = "classify --seq squares --radius 1e6";
    const auto first = run_exe(args);
    const auto second = run_exe(args);
    EXPECT_EQ(first.code, exit_code::definite);
    EXPECT_EQ(first.out, second.out);
    ASSERT_FALSE(first.out.empty());
    const auto j = parse(first.out);
    EXPECT_EQ(j["verdict"], "NotPolya");
    EXPECT_TRUE(j["classifiers_agree"].get<bool>());
}

TEST(Determinism, InProcessMatchesExecutable) {
    const auto a = run_in_process({"gap-measure", "--gap", "2", "--n", "64"});
    const auto b = run_exe("gap-measure --gap 2 --n 64");
    EXPECT_EQ(a.code, b.code);
    // argv is echoed in parameters; it is the same here.
    EXPECT_EQ(a.out, b.out);
}

TEST(Subcommands, GapMeasureWritesMeasureUsedByCauchy) {
    const auto csv = temp_file("mu.csv");
    const auto json = temp_file("mu.json");
    const auto r = run_in_process(
        {"gap-measure", "--gap", "3.14159", "--n", "256", "--out", json.string(), "--csv-out", csv.string()});
    EXPECT_EQ(r.code, exit_code::definite);
    EXPECT_TRUE(r.out.empty());
    const auto j = parse(slurp(json));
    EXPECT_EQ(j["verdict"], "GapVerified");
    const auto mu = read_measure_csv_file(csv.string());
    EXPECT_EQ(mu.size(), 513u);
    EXPECT_LE(verify_gap(mu, {0.4, 2.7}, 1e-3).max_abs, 1e-6);

    const auto c = run_in_process({"cauchy", "--input", csv.string(), "--a", "-1", "--a", "8"});
    EXPECT_EQ(c.code, exit_code::definite);
    EXPECT_EQ(parse(c.out)["reports"].size(), 2u);
    fs::remove(csv);
    fs::remove(json);
}

TEST(Subcommands, BmFamilyFeedsShort) {
    const auto csv = temp_file("fam.csv");
    const auto r = run_in_process({"bm", "--seq", "squares", "--radius", "1e4", "--a", "0.5", "--csv-out", csv.string()});
    EXPECT_EQ(r.code, exit_code::definite);
    EXPECT_GT(parse(r.out)["components"].get<std::size_t>(), 0u);
    const auto s = run_in_process({"short", "--input", csv.string()});
    EXPECT_NE(s.code, exit_code::usage);
    const auto j = parse(s.out);
    EXPECT_TRUE(j.contains("shortness"));
    fs::remove(csv);
}

TEST(Subcommands, GapProbeAndFtype) {
    const auto g = run_in_process({"gap-probe", "--seq", "lattice:1", "--gap", "7", "--n", "21", "--n", "51"});
    EXPECT_EQ(g.code, exit_code::definite);
    EXPECT_EQ(parse(g.out)["verdict"], "BoundedBelow");
    const auto f = run_in_process({"ftype", "--function", "cos", "--a", "2"});
    EXPECT_EQ(f.code, exit_code::definite);
    EXPECT_NEAR(parse(f.out)["estimate"]["fitted_type"].get<double>(), 2.0, 0.02);
}

TEST(Help, PrintsUsage) {
    const auto r = run_in_process({"--help"});
    EXPECT_EQ(r.code, exit_code::definite);
    for (const auto name : subcommand_names) EXPECT_NE(r.out.find(std::string(name)), std::string::npos);
}
