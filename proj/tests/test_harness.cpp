#include "doctest.h"

#include "randpivot/errors.hpp"
#include "randpivot/harness.hpp"
#include "randpivot/window.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace randpivot;

namespace {

ProcessSpec ar1_spec() {
    ProcessSpec spec;
    spec.kind = ProcessKind::AR1;
    spec.phi = 0.8;
    spec.innovation = InnovationKind::StdLognormal;
    return spec;
}

ProcessSpec white_spec(InnovationKind innov) {
    ProcessSpec spec;
    spec.kind = ProcessKind::White;
    spec.innovation = innov;
    return spec;
}

ProcessSpec fid_spec() {
    ProcessSpec spec;
    spec.kind = ProcessKind::FID;
    spec.d = 0.4;
    spec.innovation = InnovationKind::StdLognormal;
    return spec;
}

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.spec = white_spec(InnovationKind::StdNormal);
    cfg.scheme = WeightScheme::bernoulli(0.25);
    cfg.n = 50;
    cfg.replications = 100;
    return cfg;
}

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
    std::ostringstream out;
    std::ostringstream err;
    const int rc = run_cli(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return rc;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        rows.push_back(std::move(fields));
    }
    return rows;
}

const MethodRow& row_for(const CoverageReport& report, const std::string& method) {
    for (const auto& r : report.rows)
        if (r.method == method) return r;
    REQUIRE(false);
    return report.rows.front();
}

struct EnvGuard {
    std::string name;
    std::string old_value;
    bool had = false;

    explicit EnvGuard(const char* var) : name(var) {
        if (const char* v = std::getenv(var)) {
            had = true;
            old_value = v;
        }
    }
    ~EnvGuard() {
        if (had) setenv(name.c_str(), old_value.c_str(), 1);
        else unsetenv(name.c_str());
    }
};

} // namespace

TEST_CASE("experiment config validation") {
    ExperimentConfig cfg = small_config();
    CHECK_NOTHROW(cfg.validate());
    cfg.n = 3;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.replications = 99;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.methods.clear();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.methods = {"nosuch"};
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.scheme.reset();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.methods = {"classical"};
    CHECK_NOTHROW(cfg.validate());
    cfg = small_config();
    cfg.theta_mode = ThetaMode::Fixed;
    cfg.theta_fixed = std::nan("");
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = small_config();
    cfg.bootstrap_B = 99;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("error curve config validation") {
    EdgeworthConfig cfg;
    cfg.spec = ar1_spec();
    cfg.scheme = WeightScheme::bernoulli(0.25);
    cfg.grid = {100, 400};
    CHECK_THROWS_AS(edgeworth_error_experiment(cfg), ConfigError);
    cfg.grid = {100, 400, 400};
    CHECK_THROWS_AS(edgeworth_error_experiment(cfg), ConfigError);
    cfg.grid = {100, 400, 1600};
    cfg.replications = 99999;
    CHECK_THROWS_AS(edgeworth_error_experiment(cfg), ConfigError);
    cfg.replications = 100000;
    cfg.spec = fid_spec();
    CHECK_THROWS_AS(edgeworth_error_experiment(cfg), ConfigError);
}

TEST_CASE("report header names the columns") {
    CHECK(CoverageReport::csv_header() == "method,n,coverage,mean_length,median_length,discarded,seed");
    CHECK(kDefaultSeed == 20260819ULL);
}

TEST_CASE("model window constants for known designs") {
    const double white_root = resolve_model_theta(white_spec(InnovationKind::StdLognormal),
                                                  WeightScheme::bernoulli(0.25), 200);
    CHECK(white_root == doctest::Approx(1.0 / (1.0 + std::cbrt(3.0))).epsilon(1e-6));
    const double ar1_root = resolve_model_theta(ar1_spec(), WeightScheme::bernoulli(0.25), 200);
    CHECK(ar1_root == doctest::Approx(0.274810).epsilon(2e-3));
}

TEST_CASE("near-zero alpha makes every interval cover") {
    ExperimentConfig cfg = small_config();
    cfg.spec = white_spec(InnovationKind::StdLognormal);
    cfg.alpha = 1e-9;
    cfg.seed = 2100;
    const CoverageReport report = coverage_experiment(cfg);
    CHECK(row_for(report, "randomized").coverage == 1.0);
    CHECK(row_for(report, "classical").coverage == 1.0);
    CHECK(row_for(report, "classical").discarded == 0);
}

TEST_CASE("duplicate method tags collapse to one row") {
    ExperimentConfig cfg = small_config();
    cfg.methods = {"classical", "classical"};
    cfg.scheme.reset();
    cfg.seed = 2105;
    const CoverageReport report = coverage_experiment(cfg);
    CHECK(report.rows.size() == 1);
    CHECK(report.rows[0].method == "classical");
    CHECK(report.rows[0].n == 50);
    CHECK(report.rows[0].seed == 2105);
}

TEST_CASE("alias for the augmented sieve method") {
    ExperimentConfig cfg;
    cfg.spec = fid_spec();
    cfg.n = 100;
    cfg.replications = 100;
    cfg.methods = {"filtered_sieve"};
    cfg.bootstrap_B = 100;
    cfg.q_rule = BandwidthRegime::LongMemoryRule;
    cfg.seed = 2106;
    const CoverageReport report = coverage_experiment(cfg);
    CHECK(report.rows.size() == 1);
    CHECK(report.rows[0].method == "augsieve");
}

TEST_CASE("per-replication failures are discarded, never fatal") {
    ExperimentConfig cfg;
    cfg.spec = ar1_spec();
    cfg.scheme = WeightScheme::multinomial();
    cfg.n = 100;
    cfg.replications = 100;
    cfg.theta_mode = ThetaMode::PlugIn;
    cfg.seed = 2107;
    CoverageReport report;
    CHECK_NOTHROW(report = coverage_experiment(cfg));
    const MethodRow& rand_row = row_for(report, "randomized");
    const MethodRow& cls_row = row_for(report, "classical");
    CHECK(rand_row.discarded <= cfg.replications);
    CHECK(cls_row.discarded == 0);
    CHECK(rand_row.coverage <= 1.0 - static_cast<double>(rand_row.discarded) / 100.0);
}

TEST_CASE("identical report for any thread count") {
    ExperimentConfig cfg;
    cfg.spec = ar1_spec();
    cfg.scheme = WeightScheme::bernoulli(0.25);
    cfg.n = 100;
    cfg.replications = 200;
    cfg.seed = 2108;
    EnvGuard guard("RANDPIVOT_THREADS");
    setenv("RANDPIVOT_THREADS", "1", 1);
    const std::string single = coverage_experiment(cfg).to_csv();
    setenv("RANDPIVOT_THREADS", "4", 1);
    const std::string pooled = coverage_experiment(cfg).to_csv();
    setenv("RANDPIVOT_THREADS", "3", 1);
    const std::string pooled3 = coverage_experiment(cfg).to_csv();
    CHECK(single == pooled);
    CHECK(single == pooled3);
}

TEST_CASE("rerun with a fresh seed lands inside the standard error bracket") {
    ExperimentConfig cfg;
    cfg.spec = ar1_spec();
    cfg.scheme.reset();
    cfg.methods = {"classical"};
    cfg.n = 100;
    cfg.replications = 400;
    cfg.seed = 2101;
    const double p1 = coverage_experiment(cfg).rows[0].coverage;
    cfg.seed = 2102;
    const double p2 = coverage_experiment(cfg).rows[0].coverage;
    const double bracket = 3.0 * std::sqrt(p1 * (1.0 - p1) / 400.0);
    CHECK(std::fabs(p2 - p1) <= bracket);
}

TEST_CASE("short memory coverage row at the larger table size") {
    ExperimentConfig cfg;
    cfg.spec = ar1_spec();
    cfg.scheme = WeightScheme::bernoulli(0.25);
    cfg.n = 400;
    cfg.replications = 2000;
    cfg.theta_mode = ThetaMode::Fixed;
    cfg.theta_fixed = 0.35;
    const CoverageReport report = coverage_experiment(cfg);
    CHECK(report.q_used == 8);
    CHECK(std::isfinite(report.theta_used));
    const double rand_cov = row_for(report, "randomized").coverage;
    const double cls_cov = row_for(report, "classical").coverage;
    CAPTURE(rand_cov);
    CAPTURE(cls_cov);
    CHECK(std::fabs(rand_cov - 0.9365) <= 0.03);
    CHECK(std::fabs(cls_cov - 0.8865) <= 0.03);
}

TEST_CASE("symmetric multinomial coverage row at the larger table size") {
    ExperimentConfig cfg;
    cfg.spec = ar1_spec();
    cfg.scheme = WeightScheme::multinomial();
    cfg.n = 400;
    cfg.replications = 2000;
    cfg.theta_mode = ThetaMode::Fixed;
    cfg.theta_fixed = 1.23;
    const CoverageReport report = coverage_experiment(cfg);
    const double rand_cov = row_for(report, "randomized").coverage;
    CAPTURE(rand_cov);
    CHECK(std::fabs(rand_cov - 0.942) <= 0.03);
}

TEST_CASE("cli rejects bad configuration") {
    std::string err;
    CHECK(cli({"coverage", "--methods", "nosuch", "--replications", "100"}, nullptr, &err) == 2);
    CHECK(!err.empty());
    CHECK(cli({"table", "9"}, nullptr, &err) == 2);
    CHECK(cli({"coverage", "--replications", "50"}, nullptr, &err) == 2);
    CHECK(cli({"nosuchcommand"}, nullptr, &err) == 2);
}

TEST_CASE("cli stops when the runtime budget is exhausted") {
    std::string err;
    const int rc = cli({"coverage", "--n", "200", "--replications", "100", "--max-seconds", "1e-9"},
                       nullptr, &err);
    CHECK(rc == 3);
    CHECK(err.find("budget") != std::string::npos);
}

TEST_CASE("cli coverage runs are byte-identical") {
    const std::vector<std::string> args{"coverage", "--n",    "100", "--replications",
                                        "100",      "--seed", "7"};
    std::string first;
    std::string second;
    CHECK(cli(args, &first) == 0);
    CHECK(cli(args, &second) == 0);
    CHECK(first == second);
    CHECK(first.rfind(CoverageReport::csv_header(), 0) == 0);
}

TEST_CASE("cli reads options from a config file") {
    const std::string path = "harness_config_test.ini";
    {
        std::ofstream f(path);
        f << "[coverage]\n"
          << "n=100\n"
          << "replications=100\n"
          << "seed=7\n";
    }
    std::string from_file;
    std::string from_flags;
    CHECK(cli({"--config", path, "coverage"}, &from_file) == 0);
    CHECK(cli({"coverage", "--n", "100", "--replications", "100", "--seed", "7"}, &from_flags) == 0);
    CHECK(from_file == from_flags);
    std::remove(path.c_str());
}

TEST_CASE("first preset emits one row per size and method") {
    std::string text;
    CHECK(cli({"table", "1", "--replications", "200"}, &text) == 0);
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0] == std::vector<std::string>{"method", "n", "coverage", "mean_length",
                                              "median_length", "discarded", "seed"});
    CHECK(rows[1][0] == "randomized");
    CHECK(rows[1][1] == "200");
    CHECK(rows[2][0] == "classical");
    CHECK(rows[3][0] == "randomized");
    CHECK(rows[3][1] == "400");
    CHECK(rows[4][0] == "classical");
    for (std::size_t i = 1; i < rows.size(); ++i) REQUIRE(rows[i].size() == 7);
    const double rand200 = std::stod(rows[1][2]);
    const double cls200 = std::stod(rows[2][2]);
    const double rand400 = std::stod(rows[3][2]);
    const double cls400 = std::stod(rows[4][2]);
    CHECK(rand200 > cls200);
    CHECK(rand400 > cls400);
}

TEST_CASE("second preset keeps the advantage of the randomized method") {
    std::string text;
    CHECK(cli({"table", "2", "--replications", "200"}, &text) == 0);
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == 5);
    CHECK(std::stod(rows[1][2]) > std::stod(rows[2][2]));
    CHECK(std::stod(rows[3][2]) > std::stod(rows[4][2]));
}

TEST_CASE("third preset runs all five methods") {
    std::string text;
    CHECK(cli({"table", "3", "--replications", "100", "--bootstrap-B", "100"}, &text) == 0);
    const auto rows = parse_csv(text);
    REQUIRE(rows.size() == 11);
    const std::vector<std::string> expected{"randomized", "classical", "block", "augsieve",
                                            "sieve"};
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(rows[1 + i][0] == expected[i]);
        CHECK(rows[1 + i][1] == "100");
        CHECK(rows[6 + i][0] == expected[i]);
        CHECK(rows[6 + i][1] == "200");
    }
    CHECK(std::stod(rows[1][2]) > std::stod(rows[2][2]));
    CHECK(std::stod(rows[6][2]) > std::stod(rows[7][2]));
}
