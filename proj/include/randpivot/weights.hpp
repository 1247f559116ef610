#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace randpivot {

class Rng;

enum class WeightKind { IidBernoulli, IidCustom, SymMultinomial };

struct WeightScheme {
    WeightKind kind = WeightKind::IidBernoulli;
    double p = 0.25;
    double ew1 = 0.0;
    double ew2 = 0.0;
    double ew3 = 0.0;
    std::function<double(Rng&)> sampler;

    void validate() const;
    double mean_w() const;
    double var_w(std::size_t n) const;
    std::array<double, 3> raw_moments(std::size_t n) const;
    std::string to_config() const;

    static WeightScheme bernoulli(double p);
    static WeightScheme multinomial();
    static WeightScheme point_mass(double c);
};

struct PatternMoments {
    double theta = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double m2cross = 0.0;
    double m3 = 0.0;
    double m21 = 0.0;
    double m111 = 0.0;
    double K = 0.0;
    double Kprime = 0.0;
};

struct PatternPolys {
    std::array<double, 4> m3{};
    std::array<double, 4> m21{};
    std::array<double, 4> m111{};
};

std::vector<double> gen_weights(const WeightScheme& scheme, std::size_t n, Rng& rng);

PatternMoments pattern_moments(const WeightScheme& scheme, double theta, std::size_t n);

PatternPolys pattern_polynomials(const WeightScheme& scheme, std::size_t n);

} // namespace randpivot
