#pragma once

#include "randpivot/linproc.hpp"
#include "randpivot/weights.hpp"

#include <string>
#include <vector>

namespace randpivot {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double alpha = 0.0;
    double length = 0.0;
    std::string method;
    double theta = 0.0;
    std::size_t q = 0;
    double d_used = 0.0;
    double weight_sum = 0.0;

    bool covers(double mu) const { return lo <= mu && mu <= hi; }
    std::string to_csv_row(double mu, bool have_mu) const;
};

Interval randomized_ci(const Series& series, const std::vector<double>& weights, double theta,
                       double alpha, double d, std::size_t q, bool complete,
                       const WeightScheme& scheme);

Interval classical_ci(const Series& series, double alpha, double d, std::size_t q);

} // namespace randpivot
