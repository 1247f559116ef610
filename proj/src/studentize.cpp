#include "randpivot/studentize.hpp"

#include "randpivot/errors.hpp"

#include <algorithm>
#include <cmath>

namespace randpivot {

namespace {

double bartlett_sum(const std::vector<double>& gammabar, std::size_t q) {
    if (gammabar.size() < q + 1)
        throw ParameterError("studentizer requires sample autocovariances up to lag q");
    double s = gammabar[0];
    for (std::size_t h = 1; h <= q; ++h)
        s += 2.0 * (1.0 - static_cast<double>(h) / static_cast<double>(q)) * gammabar[h];
    return s;
}

} // namespace

std::size_t bandwidth(std::size_t n, double d, BandwidthRegime regime) {
    if (n < 4)
        throw ParameterError("bandwidth requires n >= 4");
    const double dn = static_cast<double>(n);
    const double exponent = regime == BandwidthRegime::ShortMemoryRule ? 1.0 / 3.0 : 0.5 - d;
    const auto round_up = [](double v) {
        return static_cast<std::size_t>(std::ceil(v - 1e-9));
    };
    std::size_t q = round_up(std::pow(dn, exponent));
    q = std::min(q, round_up(std::sqrt(dn)));
    return std::max<std::size_t>(q, 1);
}

HacEstimate hac_partial(const std::vector<double>& gammabar, const WeightScheme& scheme,
                        double theta, std::size_t q, double d, std::size_t n) {
    if (q < 1)
        throw ParameterError("bandwidth must be at least 1");
    const PatternMoments pm = pattern_moments(scheme, theta, n);
    if (gammabar.size() < q + 1)
        throw ParameterError("studentizer requires sample autocovariances up to lag q");
    double s = pm.m2 * gammabar[0];
    for (std::size_t h = 1; h <= q; ++h)
        s += 2.0 * pm.m2cross * (1.0 - static_cast<double>(h) / static_cast<double>(q)) *
             gammabar[h];
    HacEstimate est;
    est.value = std::pow(static_cast<double>(q), -2.0 * d) * s;
    est.q = q;
    est.d_used = d;
    est.kind = HacKind::PartialRandomized;
    if (!(est.value > 0.0))
        throw DegenerateStudentizerError("nonpositive partial studentizer");
    return est;
}

HacEstimate hac_complete(const std::vector<double>& gammabar, const std::vector<double>& weights,
                         double theta, std::size_t q, double d) {
    if (q < 1)
        throw ParameterError("bandwidth must be at least 1");
    const std::size_t n = weights.size();
    if (n < q)
        throw ParameterError("complete studentizer requires at least q weights");
    if (gammabar.size() < q + 1)
        throw ParameterError("studentizer requires sample autocovariances up to lag q");
    double sq = 0.0;
    for (double w : weights) {
        const double c = w - theta;
        sq += c * c;
    }
    double s = sq / static_cast<double>(n) * gammabar[0];
    double cross_total = 0.0;
    for (std::size_t h = 1; h <= q; ++h) {
        double cross = 0.0;
        for (std::size_t j = 0; j + h < q; ++j)
            cross += (weights[j] - theta) * (weights[j + h] - theta);
        cross_total += gammabar[h] * cross;
    }
    s += 2.0 / static_cast<double>(q) * cross_total;
    HacEstimate est;
    est.value = std::pow(static_cast<double>(q), -2.0 * d) * s;
    est.q = q;
    est.d_used = d;
    est.kind = HacKind::CompleteRandomized;
    if (!(est.value > 0.0))
        throw DegenerateStudentizerError("nonpositive complete studentizer");
    return est;
}

HacEstimate hac_classical(const std::vector<double>& gammabar, std::size_t q, double d) {
    if (q < 1)
        throw ParameterError("bandwidth must be at least 1");
    HacEstimate est;
    est.value = std::pow(static_cast<double>(q), -2.0 * d) * bartlett_sum(gammabar, q);
    est.q = q;
    est.d_used = d;
    est.kind = HacKind::Classical;
    if (!(est.value > 0.0))
        throw DegenerateStudentizerError("nonpositive classical studentizer");
    return est;
}

double studentized_randomized(const Series& series, const std::vector<double>& weights,
                              double theta, double mu, double d, std::size_t q, bool complete,
                              const WeightScheme& scheme) {
    const std::size_t n = series.size();
    if (weights.size() != n)
        throw ParameterError("weights length must match the series length");
    const std::vector<double> gammabar = sample_autocov(series, q);
    const HacEstimate est = complete ? hac_complete(gammabar, weights, theta, q, d)
                                     : hac_partial(gammabar, scheme, theta, q, d, n);
    double num = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        num += (weights[i] - theta) * (series.values[i] - mu);
    return std::pow(static_cast<double>(n), -0.5 - d) * num / std::sqrt(est.value);
}

double studentized_classical(const Series& series, double mu, double d, std::size_t q) {
    const std::size_t n = series.size();
    const std::vector<double> gammabar = sample_autocov(series, q);
    const HacEstimate est = hac_classical(gammabar, q, d);
    double mean = 0.0;
    for (double x : series.values)
        mean += x;
    mean /= static_cast<double>(n);
    return std::pow(static_cast<double>(n), 0.5 - d) * (mean - mu) / std::sqrt(est.value);
}

MemoryEstimate estimate_memory(const Series& series) {
    const std::size_t n = series.size();
    if (n < 64)
        throw ParameterError("estimate_memory requires n >= 64");
    const std::size_t m = static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.65)));

    double mean = 0.0;
    for (double x : series.values)
        mean += x;
    mean /= static_cast<double>(n);

    std::vector<double> log_lambda(m), log_periodogram(m);
    bool any_power = false;
    for (std::size_t j = 1; j <= m; ++j) {
        const double lambda = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
        const double c = 2.0 * std::cos(lambda);
        double s1 = 0.0;
        double s2 = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            const double s0 = (series.values[t] - mean) + c * s1 - s2;
            s2 = s1;
            s1 = s0;
        }
        const double power = s1 * s1 + s2 * s2 - c * s1 * s2;
        const double intensity = power / (2.0 * M_PI * static_cast<double>(n));
        log_lambda[j - 1] = std::log(lambda);
        if (intensity > 0.0) {
            log_periodogram[j - 1] = std::log(intensity);
            any_power = true;
        } else {
            log_periodogram[j - 1] = -750.0;
        }
    }
    if (!any_power)
        throw EstimationError("periodogram vanishes on all local Whittle frequencies");

    const auto objective = [&](double d) {
        double acc = 0.0;
        double mean_log_lambda = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            acc += std::exp(2.0 * d * log_lambda[j] + log_periodogram[j]);
            mean_log_lambda += log_lambda[j];
        }
        acc /= static_cast<double>(m);
        mean_log_lambda /= static_cast<double>(m);
        if (!(acc > 0.0) || !std::isfinite(acc))
            throw EstimationError("local Whittle objective is not finite");
        return std::log(acc) - 2.0 * d * mean_log_lambda;
    };

    double a = 0.0;
    double b = 0.499;
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = objective(x1);
    double f2 = objective(x2);
    for (int it = 0; it < 90; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = objective(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = objective(x2);
        }
    }
    MemoryEstimate est;
    est.d_hat = std::clamp(0.5 * (a + b), 0.0, 0.499);
    est.m = m;
    est.method = MemoryMethod::LocalWhittle;
    est.clamped = est.d_hat > 0.499 - 1e-4;
    return est;
}

} // namespace randpivot
