#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lbtail/cli.hpp"
#include "lbtail/csv.hpp"
#include "lbtail/errors.hpp"

using namespace lbtail;
using Catch::Approx;

namespace {

struct CliRun {
    int status;
    std::string out;
    std::string err;
};

CliRun run(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"lbtail"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status =
        run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return CliRun{status, out.str(), err.str()};
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary);
    REQUIRE(file.good());
    file << content;
}

std::string read_text(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    REQUIRE(file.good());
    std::ostringstream content;
    content << file.rdbuf();
    return content.str();
}

double parsed_value(const std::string& report, const std::string& key) {
    const auto pos = report.find(key + " = ");
    REQUIRE(pos != std::string::npos);
    const auto start = pos + key.size() + 3;
    const auto end = report.find('\n', start);
    return parse_double(report.substr(start, end - start));
}

}  // namespace

TEST_CASE("estimate reduces to hill on untruncated data") {
    write_text("cli_geometric.csv", "x,y\n1,1e12\n2,1e12\n4,1e12\n8,1e12\n");
    const CliRun result =
        run({"estimate", "--input", "cli_geometric.csv", "--k", "3"});
    CAPTURE(result.err);
    REQUIRE(result.status == 0);
    CHECK(parsed_value(result.out, "gamma") ==
          Approx(2.0 * std::log(2.0)).margin(1e-12));
    CHECK(result.out.find("estimator = lynden_bell_hill") !=
          std::string::npos);
    CHECK(parsed_value(result.out, "threshold") == 1.0);
    std::remove("cli_geometric.csv");
}

TEST_CASE("estimate on the hand-enumerable two-point sample") {
    write_text("cli_two_point.csv", "x,y\n1,3\n2,2\n");
    const CliRun result =
        run({"estimate", "--input", "cli_two_point.csv", "--k", "1"});
    REQUIRE(result.status == 0);
    // weight at x=2 is F_n(2)/C_n(2) = 1/1 and the tail mass is 1/2,
    // so gamma = log(2/1) * (1/2) / (1/2) = log 2
    CHECK(parsed_value(result.out, "gamma") ==
          Approx(std::log(2.0)).margin(1e-15));
    std::remove("cli_two_point.csv");
}

TEST_CASE("estimate with a quantile order") {
    write_text("cli_quant.csv", "x,y\n1,1e12\n2,1e12\n4,1e12\n8,1e12\n");
    const CliRun result = run({"estimate", "--input", "cli_quant.csv", "--k",
                               "3", "--pn", "0.05"});
    REQUIRE(result.status == 0);
    const double gamma = parsed_value(result.out, "gamma");
    const double expected = 1.0 * std::pow(0.75 / 0.05, gamma);
    CHECK(parsed_value(result.out, "quantile") ==
          Approx(expected).epsilon(1e-12));
    std::remove("cli_quant.csv");
}

TEST_CASE("estimate rejects a bad csv row with its line number") {
    write_text("cli_bad.csv", "x,y\n1,3\n5,2\n");
    const CliRun result =
        run({"estimate", "--input", "cli_bad.csv", "--k", "1"});
    CHECK(result.status != 0);
    CHECK(result.err.find("error[csv]") == 0);
    CHECK(result.err.find("line 3") != std::string::npos);
    std::remove("cli_bad.csv");
}

TEST_CASE("degenerate estimate surfaces the typed code") {
    write_text("cli_degenerate.csv", "x,y\n1,1.5\n2,2.5\n5,20\n");
    const CliRun result =
        run({"estimate", "--input", "cli_degenerate.csv", "--k", "1"});
    CHECK(result.status != 0);
    CHECK(result.err.find("error[degenerate-threshold]") == 0);
    std::remove("cli_degenerate.csv");
}

TEST_CASE("constants prints the theory report") {
    const CliRun result = run({"constants", "--model-x", "burr(10,4,1)",
                               "--model-y", "burr(10,2,1)", "--rho1", "-1"});
    REQUIRE(result.status == 0);
    CHECK(parsed_value(result.out, "alpha") ==
          Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(parsed_value(result.out, "gamma1") == 0.25);
    CHECK(parsed_value(result.out, "gamma2") == 0.5);
    CHECK(parsed_value(result.out, "m") == Approx(0.05).epsilon(1e-12));
    CHECK(parsed_value(result.out, "c0") == Approx(2.0).epsilon(1e-14));
    CHECK(parsed_value(result.out, "c1") == Approx(1.0).epsilon(1e-14));
    CHECK(parsed_value(result.out, "c2") == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("invalid model literal fails with the typed code") {
    const CliRun result = run({"constants", "--model-x", "cauchy(1)",
                               "--model-y", "burr(10,2,1)"});
    CHECK(result.status != 0);
    CHECK(result.err.find("error[model-literal]") == 0);
}

TEST_CASE("config validation names the offending key") {
    const CliRun missing = run({"curves", "--model-x", "burr(10,4,1)",
                                "--model-y", "burr(10,2,1)", "--n", "100",
                                "--replicates", "10", "--seed", "1"});
    CHECK(missing.status != 0);
    CHECK(missing.err.find("error[config]") == 0);
    CHECK(missing.err.find("'output'") != std::string::npos);

    const CliRun extra =
        run({"estimate", "--input", "whatever.csv", "--k", "3", "--model-x",
             "burr(10,4,1)"});
    CHECK(extra.status != 0);
    CHECK(extra.err.find("error[config]") == 0);
    CHECK(extra.err.find("'model-x'") != std::string::npos);

    const CliRun unknown = run({"frobnicate"});
    CHECK(unknown.status != 0);
    CHECK(unknown.err.find("error[config]") == 0);
}

TEST_CASE("k grid parsing") {
    CHECK(parse_k_grid("10,20,50") ==
          std::vector<std::size_t>{10, 20, 50});
    CHECK(parse_k_grid("10:40:10") ==
          std::vector<std::size_t>{10, 20, 30, 40});
    CHECK(parse_k_grid("3:5") == std::vector<std::size_t>{3, 4, 5});
    CHECK_THROWS_AS(parse_k_grid("10:5"), Error);
    CHECK_THROWS_AS(parse_k_grid("a,b"), Error);
    CHECK_THROWS_AS(parse_k_grid(""), Error);
}

TEST_CASE("curves writes deterministic csv and a plot script") {
    const std::vector<std::string> base{
        "curves",       "--model-x",  "burr(10,4,1)", "--model-y",
        "burr(10,2,1)", "--n",        "80",           "--replicates",
        "40",           "--seed",     "7",            "--k-grid",
        "10,20,40",     "--output",   "cli_curves.csv"};

    auto with_plot = base;
    with_plot.push_back("--emit-plot-script");
    const CliRun first = run(with_plot);
    CAPTURE(first.err);
    REQUIRE(first.status == 0);
    const std::string csv_first = read_text("cli_curves.csv");

    auto threaded = base;
    threaded.push_back("--threads");
    threaded.push_back("4");
    REQUIRE(run(threaded).status == 0);
    CHECK(read_text("cli_curves.csv") == csv_first);

    std::istringstream parse_check(csv_first);
    CHECK(parse_curve_csv(parse_check).rows.size() == 6);

    const std::string script = read_text("cli_curves_plot.py");
    CHECK(script.find("matplotlib") != std::string::npos);
    CHECK(script.find("rmse") != std::string::npos);
    std::remove("cli_curves.csv");
    std::remove("cli_curves_plot.py");
}

TEST_CASE("flags override config file values") {
    // values containing commas are quoted, as usual for INI files
    write_text("cli_config.ini",
               "model-x = \"burr(10,4,1)\"\n"
               "model-y = \"burr(10,2,1)\"\n"
               "n = 60\n"
               "replicates = 20\n"
               "seed = 5\n"
               "k-grid = \"10,20\"\n"
               "output = cli_from_config.csv\n");
    const CliRun from_config = run({"curves", "--config", "cli_config.ini"});
    CAPTURE(from_config.err);
    REQUIRE(from_config.status == 0);
    const std::string baseline = read_text("cli_from_config.csv");

    // same run with the seed overridden on the command line
    const CliRun overridden =
        run({"curves", "--config", "cli_config.ini", "--seed", "6"});
    REQUIRE(overridden.status == 0);
    CHECK(read_text("cli_from_config.csv") != baseline);

    const CliRun repeat = run({"curves", "--config", "cli_config.ini"});
    REQUIRE(repeat.status == 0);
    CHECK(read_text("cli_from_config.csv") == baseline);

    std::remove("cli_config.ini");
    std::remove("cli_from_config.csv");
}

TEST_CASE("clt command writes its report") {
    const CliRun result =
        run({"clt", "--model-x", "pareto(0.25,1)", "--model-y",
             "pareto(0.5,1)", "--n", "500", "--k", "25", "--replicates", "50",
             "--seed", "3", "--output", "cli_clt.csv"});
    CAPTURE(result.err);
    REQUIRE(result.status == 0);
    const std::string csv = read_text("cli_clt.csv");
    CHECK(csv.find("variance_ratio") != std::string::npos);
    CHECK(csv.find("\n500,25,50,") != std::string::npos);
    std::remove("cli_clt.csv");
}

TEST_CASE("tail ordering violations warn but run") {
    const CliRun result = run({"curves", "--model-x", "burr(10,2,1)",
                               "--model-y", "burr(10,4,1)", "--n", "60",
                               "--replicates", "10", "--seed", "1",
                               "--output", "cli_warned.csv"});
    CHECK(result.status == 0);
    CHECK(result.err.find("warning[tail-ordering]") == 0);
    std::remove("cli_warned.csv");
}
