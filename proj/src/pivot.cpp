#include "randpivot/pivot.hpp"

#include "randpivot/errors.hpp"

#include <algorithm>
#include <cmath>

namespace randpivot {

double randomized_variance(const WeightScheme& scheme, double theta,
                           const std::vector<double>& gamma, std::size_t n) {
    if (gamma.empty())
        throw ParameterError("randomized_variance requires autocovariances");
    const PatternMoments pm = pattern_moments(scheme, theta, n);
    const double dn = static_cast<double>(n);
    double d = pm.m2 * gamma[0];
    const std::size_t hmax = std::min(gamma.size() - 1, n);
    for (std::size_t h = 1; h <= hmax; ++h)
        d += 2.0 * pm.m2cross * (1.0 - static_cast<double>(h) / dn) * gamma[h];
    const double normalizer = dn * d;
    if (!(normalizer > 0.0))
        throw DegenerateVarianceError("nonpositive randomized variance");
    return normalizer;
}

PivotValue pivot_classical(const Series& series, double mu, double var_sum) {
    if (!(var_sum > 0.0))
        throw DegenerateVarianceError("nonpositive variance of the sum");
    PivotValue pv;
    pv.kind = PivotKind::Classical;
    pv.normalizer = var_sum;
    for (double x : series.values)
        pv.numerator += x - mu;
    pv.value = pv.numerator / std::sqrt(var_sum);
    return pv;
}

PivotValue pivot_randomized(const Series& series, const std::vector<double>& weights, double theta,
                            double mu, const WeightScheme& scheme,
                            const std::vector<double>& gamma) {
    const std::size_t n = series.size();
    if (weights.size() != n)
        throw ParameterError("weights length must match the series length");
    PivotValue pv;
    pv.kind = PivotKind::Randomized;
    pv.theta = theta;
    pv.normalizer = randomized_variance(scheme, theta, gamma, n);
    for (std::size_t i = 0; i < n; ++i)
        pv.numerator += (weights[i] - theta) * (series.values[i] - mu);
    pv.value = pv.numerator / std::sqrt(pv.normalizer);
    return pv;
}

double conditional_variance(const std::vector<double>& weights, double theta,
                            const std::vector<double>& gamma) {
    if (gamma.empty())
        throw ParameterError("conditional_variance requires autocovariances");
    const std::size_t n = weights.size();
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i)
        c[i] = weights[i] - theta;
    double sq = 0.0;
    for (double v : c)
        sq += v * v;
    double out = gamma[0] * sq;
    const std::size_t hmax = std::min(gamma.size() - 1, n - 1);
    for (std::size_t h = 1; h <= hmax; ++h) {
        double cross = 0.0;
        for (std::size_t j = 0; j + h < n; ++j)
            cross += c[j] * c[j + h];
        out += 2.0 * gamma[h] * cross;
    }
    return out;
}

} // namespace randpivot
