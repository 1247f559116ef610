#pragma once

#include "randpivot/linproc.hpp"
#include "randpivot/weights.hpp"

#include <vector>

namespace randpivot {

enum class HacKind { PartialRandomized, CompleteRandomized, Classical };
enum class BandwidthRegime { ShortMemoryRule, LongMemoryRule };
enum class MemoryMethod { LocalWhittle, GPH };

struct HacEstimate {
    double value = 0.0;
    std::size_t q = 0;
    double d_used = 0.0;
    HacKind kind = HacKind::Classical;
};

struct MemoryEstimate {
    double d_hat = 0.0;
    std::size_t m = 0;
    MemoryMethod method = MemoryMethod::LocalWhittle;
    bool clamped = false;
};

std::size_t bandwidth(std::size_t n, double d, BandwidthRegime regime);

HacEstimate hac_partial(const std::vector<double>& gammabar, const WeightScheme& scheme,
                        double theta, std::size_t q, double d, std::size_t n);

HacEstimate hac_complete(const std::vector<double>& gammabar, const std::vector<double>& weights,
                         double theta, std::size_t q, double d);

HacEstimate hac_classical(const std::vector<double>& gammabar, std::size_t q, double d);

double studentized_randomized(const Series& series, const std::vector<double>& weights,
                              double theta, double mu, double d, std::size_t q, bool complete,
                              const WeightScheme& scheme);

double studentized_classical(const Series& series, double mu, double d, std::size_t q);

MemoryEstimate estimate_memory(const Series& series);

} // namespace randpivot
