#include "randpivot/ci.hpp"

#include "randpivot/errors.hpp"
#include "randpivot/stats.hpp"
#include "randpivot/studentize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace randpivot {

Interval randomized_ci(const Series& series, const std::vector<double>& weights, double theta,
                       double alpha, double d, std::size_t q, bool complete,
                       const WeightScheme& scheme) {
    const std::size_t n = series.size();
    if (weights.size() != n)
        throw ParameterError("weights length must match the series length");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("alpha must lie in (0, 1)");
    const std::vector<double> gammabar = sample_autocov(series, q);
    const HacEstimate est = complete ? hac_complete(gammabar, weights, theta, q, d)
                                     : hac_partial(gammabar, scheme, theta, q, d, n);
    double weight_sum = 0.0;
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        weight_sum += weights[i] - theta;
        num += (weights[i] - theta) * series.values[i];
    }
    if (std::abs(weight_sum) < 1e-12)
        throw DenominatorError("centered weight sum vanishes");
    const double z = z_alpha_half(alpha);
    const double half = z * std::pow(static_cast<double>(n), 0.5 + d) * std::sqrt(est.value);
    const double a = (num - half) / weight_sum;
    const double b = (num + half) / weight_sum;
    Interval iv;
    iv.lo = std::min(a, b);
    iv.hi = std::max(a, b);
    iv.alpha = alpha;
    iv.length = 2.0 * z * std::pow(static_cast<double>(n), 0.5 + d) * std::sqrt(est.value) /
                std::abs(weight_sum);
    iv.method = complete ? "randomized_complete" : "randomized";
    iv.theta = theta;
    iv.q = q;
    iv.d_used = d;
    iv.weight_sum = weight_sum;
    return iv;
}

Interval classical_ci(const Series& series, double alpha, double d, std::size_t q) {
    const std::size_t n = series.size();
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("alpha must lie in (0, 1)");
    const std::vector<double> gammabar = sample_autocov(series, q);
    const HacEstimate est = hac_classical(gammabar, q, d);
    double mean = 0.0;
    for (double x : series.values)
        mean += x;
    mean /= static_cast<double>(n);
    const double z = z_alpha_half(alpha);
    const double half = z * std::pow(static_cast<double>(n), -0.5 + d) * std::sqrt(est.value);
    Interval iv;
    iv.lo = mean - half;
    iv.hi = mean + half;
    iv.alpha = alpha;
    iv.length = 2.0 * half;
    iv.method = "classical";
    iv.q = q;
    iv.d_used = d;
    return iv;
}

std::string Interval::to_csv_row(double mu, bool have_mu) const {
    std::ostringstream os;
    os.precision(10);
    os << method << ',' << lo << ',' << hi << ',' << length << ',';
    if (have_mu)
        os << (covers(mu) ? 1 : 0);
    else
        os << "NA";
    return os.str();
}

} // namespace randpivot
