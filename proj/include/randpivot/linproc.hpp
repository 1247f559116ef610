#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace randpivot {

class Rng;

enum class ProcessKind { White, AR1, FID, MAfinite };
enum class InnovationKind { StdNormal, StdLognormal, Custom };

struct ProcessSpec {
    ProcessKind kind = ProcessKind::White;
    double phi = 0.0;
    double d = 0.0;
    std::vector<double> ma;
    InnovationKind innovation = InnovationKind::StdNormal;
    double custom_mu2 = 1.0;
    double custom_mu3 = 0.0;
    double custom_mu4 = 3.0;
    double mu = 0.0;

    void validate() const;
    double memory() const;
    double innovation_mu3() const;
    std::string to_config() const;
};

struct Series {
    std::vector<double> values;
    std::uint64_t seed = 0;

    std::size_t size() const { return values.size(); }
};

enum class MomentSource { Model, PlugIn };

struct MomentStructure {
    std::vector<double> gamma;
    double m3_single = 0.0;
    std::vector<std::pair<double, double>> m3_pair;
    std::vector<double> m3_triple_by_sum;
    MomentSource source = MomentSource::Model;
    std::size_t lag_cap = 0;
    bool has_third_order = false;
    bool truncation_warning = false;

    double pair_sum(std::size_t h) const {
        return m3_pair[h - 1].first + m3_pair[h - 1].second;
    }
    double triple_sum(std::size_t m) const { return m3_triple_by_sum[m - 2]; }
};

Series simulate(const ProcessSpec& spec, std::size_t n, Rng& rng);
Series simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed);

std::vector<double> ma_coefficients(const ProcessSpec& spec, std::size_t K);

MomentStructure theoretical_moments(const ProcessSpec& spec, std::size_t H, std::size_t Lpair,
                                    std::size_t K);

std::vector<double> sample_autocov(const Series& series, std::size_t smax);

MomentStructure plugin_moments(const Series& series, std::size_t H, std::size_t L);

double innovation_draw(const ProcessSpec& spec, Rng& rng);

void write_series_csv(const Series& series, std::ostream& out);
Series read_series_csv(std::istream& in);

} // namespace randpivot
