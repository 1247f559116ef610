#pragma once

#include "randpivot/linproc.hpp"
#include "randpivot/weights.hpp"

#include <vector>

namespace randpivot {

enum class PivotKind { Classical, Randomized };

struct PivotValue {
    double value = 0.0;
    double numerator = 0.0;
    double normalizer = 0.0;
    PivotKind kind = PivotKind::Classical;
    double theta = 0.0;
};

double randomized_variance(const WeightScheme& scheme, double theta,
                           const std::vector<double>& gamma, std::size_t n);

PivotValue pivot_classical(const Series& series, double mu, double var_sum);

PivotValue pivot_randomized(const Series& series, const std::vector<double>& weights, double theta,
                            double mu, const WeightScheme& scheme,
                            const std::vector<double>& gamma);

double conditional_variance(const std::vector<double>& weights, double theta,
                            const std::vector<double>& gamma);

} // namespace randpivot
