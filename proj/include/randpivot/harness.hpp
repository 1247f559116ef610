#pragma once

#include "randpivot/linproc.hpp"
#include "randpivot/studentize.hpp"
#include "randpivot/weights.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace randpivot {

inline constexpr std::uint64_t kDefaultSeed = 20260819ULL;

enum class ThetaMode { Model, PlugIn, Fixed };

struct ExperimentConfig {
    ProcessSpec spec;
    std::optional<WeightScheme> scheme;
    std::size_t n = 200;
    std::size_t replications = 2000;
    double alpha = 0.05;
    std::vector<std::string> methods{"randomized", "classical"};
    std::uint64_t seed = kDefaultSeed;
    BandwidthRegime q_rule = BandwidthRegime::ShortMemoryRule;
    std::size_t q_override = 0;
    ThetaMode theta_mode = ThetaMode::Model;
    double theta_fixed = 0.0;
    bool complete_studentizer = false;
    std::size_t bootstrap_B = 1000;
    std::size_t bootstrap_pmax = 0;
    std::size_t bootstrap_blocklen = 0;
    double max_seconds = 0.0;

    void validate() const;
};

struct MethodRow {
    std::string method;
    std::size_t n = 0;
    double coverage = 0.0;
    double mean_length = 0.0;
    double median_length = 0.0;
    std::size_t discarded = 0;
    std::uint64_t seed = 0;
};

struct CoverageReport {
    std::vector<MethodRow> rows;
    std::string config_echo;
    double wall_seconds = 0.0;
    double theta_used = 0.0;
    std::size_t q_used = 0;

    static std::string csv_header();
    std::string to_csv() const;
};

CoverageReport coverage_experiment(const ExperimentConfig& cfg);

struct EdgeworthConfig {
    ProcessSpec spec;
    WeightScheme scheme;
    std::vector<std::size_t> grid{100, 400, 1600};
    std::size_t replications = 100000;
    std::uint64_t seed = kDefaultSeed;
};

struct ErrorCurve {
    std::vector<std::size_t> grid;
    std::vector<double> classical_error;
    std::vector<double> randomized_error;
    std::vector<double> theta_by_n;
    double classical_slope = 0.0;
    double randomized_slope = 0.0;

    std::string to_csv() const;
};

ErrorCurve edgeworth_error_experiment(const EdgeworthConfig& cfg);

double resolve_model_theta(const ProcessSpec& spec, const WeightScheme& scheme, std::size_t n);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace randpivot
