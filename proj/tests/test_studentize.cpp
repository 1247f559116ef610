#include "doctest.h"

#include "randpivot/errors.hpp"
#include "randpivot/linproc.hpp"
#include "randpivot/pivot.hpp"
#include "randpivot/rng.hpp"
#include "randpivot/stats.hpp"
#include "randpivot/studentize.hpp"
#include "randpivot/weights.hpp"
#include "randpivot/window.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace randpivot;

namespace {

ProcessSpec ar1_spec(InnovationKind innov = InnovationKind::StdLognormal) {
    ProcessSpec s;
    s.kind = ProcessKind::AR1;
    s.phi = 0.8;
    s.innovation = innov;
    return s;
}

ProcessSpec fid_spec() {
    ProcessSpec s;
    s.kind = ProcessKind::FID;
    s.d = 0.4;
    s.innovation = InnovationKind::StdLognormal;
    return s;
}

ProcessSpec white_spec(InnovationKind innov) {
    ProcessSpec s;
    s.kind = ProcessKind::White;
    s.innovation = innov;
    return s;
}

double sample_skewness(const std::vector<double>& v) {
    const double m = mean(v);
    double s2 = 0.0;
    double s3 = 0.0;
    for (const double x : v) {
        const double c = x - m;
        s2 += c * c;
        s3 += c * c * c;
    }
    s2 /= static_cast<double>(v.size());
    s3 /= static_cast<double>(v.size());
    return s3 / std::pow(s2, 1.5);
}

} // namespace

TEST_CASE("bandwidth rules") {
    CHECK(bandwidth(200, 0.0, BandwidthRegime::ShortMemoryRule) == 6);
    CHECK(bandwidth(400, 0.0, BandwidthRegime::ShortMemoryRule) == 8);
    CHECK(bandwidth(100, 0.4, BandwidthRegime::LongMemoryRule) == 2);
    CHECK(bandwidth(200, 0.4, BandwidthRegime::LongMemoryRule) == 2);
    CHECK(bandwidth(5000, 0.4, BandwidthRegime::LongMemoryRule) == 3);
    CHECK(bandwidth(4, 0.0, BandwidthRegime::ShortMemoryRule) == 2);
    for (std::size_t n = 4; n < 3000; n = n * 2 + 1) {
        const std::size_t cap = static_cast<std::size_t>(
            std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
        CHECK(bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule) <= cap);
        CHECK(bandwidth(n, 0.0, BandwidthRegime::LongMemoryRule) <= cap);
    }
}

TEST_CASE("zero autocovariances are rejected") {
    const std::vector<double> dead(8, 0.0);
    CHECK_THROWS_AS(hac_partial(dead, WeightScheme::bernoulli(0.25), 0.39, 6, 0.0, 100),
                    DegenerateStudentizerError);
    CHECK_THROWS_AS(hac_classical(dead, 6, 0.0), DegenerateStudentizerError);
    Series flat;
    flat.values.assign(100, 5.0);
    CHECK_THROWS_AS(studentized_classical(flat, 5.0, 0.0, 6), DegenerateStudentizerError);
    const std::vector<double> w(100, 5.0);
    CHECK_THROWS_AS(studentized_randomized(flat, w, 5.0, 5.0, 0.0, 6, false,
                                           WeightScheme::point_mass(5.0)),
                    DegenerateStudentizerError);
}

TEST_CASE("partial studentizer is consistent on white noise") {
    const Series x = simulate(white_spec(InnovationKind::StdNormal), 10000, 801);
    const auto gbar = sample_autocov(x, 21);
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const double theta = 0.4094;
    const auto est = hac_partial(gbar, scheme, theta, 21, 0.0, 10000);
    const auto pm = pattern_moments(scheme, theta, 10000);
    CHECK(est.value == doctest::Approx(pm.m2).epsilon(0.05));
    CHECK(est.q == 21);
    CHECK(est.kind == HacKind::PartialRandomized);
}

TEST_CASE("long memory studentizer matches its finite-bandwidth target, not the limit") {
    const std::size_t n = 10000;
    const std::size_t q = bandwidth(n, 0.4, BandwidthRegime::LongMemoryRule);
    CHECK(q == 3);
    const WeightScheme scheme = WeightScheme::multinomial();
    const double theta = 1.97;
    const auto mom = theoretical_moments(fid_spec(), q, 2, 100000);
    const auto pm = pattern_moments(scheme, theta, n);
    double model_value = pm.m2 * mom.gamma[0];
    for (std::size_t h = 1; h <= q; ++h)
        model_value += 2.0 * pm.m2cross * (1.0 - static_cast<double>(h) / static_cast<double>(q)) *
                       mom.gamma[h];
    model_value *= std::pow(static_cast<double>(q), -0.8);

    double acc = 0.0;
    const std::size_t reps = 40;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng = Rng::for_stream(802, r, StreamRole::Data, 0);
        const Series x = simulate(fid_spec(), n, rng);
        acc += hac_partial(sample_autocov(x, q), scheme, theta, q, 0.4, n).value;
    }
    const double sampled = acc / static_cast<double>(reps);
    CHECK(sampled == doctest::Approx(model_value).epsilon(0.25));

    const double kprime = (1.0 - theta) * (1.0 - theta);
    const std::size_t big = 2000000;
    double g = 2.0700983252962866;
    double var_sum = static_cast<double>(big) * g;
    for (std::size_t h = 1; h < big; ++h) {
        g *= (static_cast<double>(h) - 1.0 + 0.4) / (static_cast<double>(h) - 0.4);
        var_sum += 2.0 * static_cast<double>(big - h) * g;
    }
    const double sx2 = var_sum / std::pow(static_cast<double>(big), 1.8);
    CHECK(model_value / (kprime * sx2) > 1.25);
}

TEST_CASE("point mass weights collapse both studentizers onto the classical one") {
    const Series x = simulate(ar1_spec(), 500, 803);
    const auto gbar = sample_autocov(x, 10);
    const double c = 2.0;
    const double theta = 0.5;
    const auto classical = hac_classical(gbar, 10, 0.0);
    const auto partial = hac_partial(gbar, WeightScheme::point_mass(c), theta, 10, 0.0, 500);
    CHECK(partial.value == doctest::Approx((c - theta) * (c - theta) * classical.value)
                               .epsilon(1e-12));
    const std::vector<double> w(500, c);
    const auto complete = hac_complete(gbar, w, theta, 10, 0.0);
    CHECK(complete.value == doctest::Approx(partial.value).epsilon(1e-12));
    CHECK(complete.kind == HacKind::CompleteRandomized);
}

TEST_CASE("partial studentizer converges as n grows") {
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const double theta = 0.39;
    const auto pm = pattern_moments(scheme, theta, 100000);
    const double g0 = 1.0 / 0.36;
    const double limit = pm.m2 * g0 + pm.m2cross * 2.0 * g0 * (0.8 / 0.2);

    const std::size_t sizes[] = {1000, 10000, 100000};
    std::vector<double> first_diffs;
    std::vector<double> second_diffs;
    std::vector<double> values_at_largest;
    for (std::uint64_t seed = 0; seed < 9; ++seed) {
        double v[3];
        for (int k = 0; k < 3; ++k) {
            const std::size_t n = sizes[k];
            Rng rng = Rng::for_stream(804, seed, StreamRole::Data, 0);
            const Series x = simulate(ar1_spec(), n, rng);
            const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);
            v[k] = hac_partial(sample_autocov(x, q), scheme, theta, q, 0.0, n).value;
        }
        first_diffs.push_back(std::fabs(v[1] - v[0]));
        second_diffs.push_back(std::fabs(v[2] - v[1]));
        values_at_largest.push_back(v[2]);
    }
    CHECK(median(second_diffs) < median(first_diffs));
    CHECK(median(values_at_largest) == doctest::Approx(limit).epsilon(0.10));
}

TEST_CASE("complete and partial studentizers agree for large n") {
    const std::size_t n = 10000;
    const Series x = simulate(ar1_spec(), n, 805);
    const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);
    const auto gbar = sample_autocov(x, q);
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const double theta = 0.39;
    const double partial = hac_partial(gbar, scheme, theta, q, 0.0, n).value;
    std::vector<double> devs;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        Rng rng = Rng::for_stream(806, r, StreamRole::Weights, 0);
        const auto w = gen_weights(scheme, n, rng);
        const double complete = hac_complete(gbar, w, theta, q, 0.0).value;
        devs.push_back(std::fabs(complete / partial - 1.0));
    }
    CHECK(median(devs) < 0.15);
}

TEST_CASE("complete studentizer noise shrinks as the bandwidth grows") {
    const std::size_t n = 10000;
    const Series x = simulate(ar1_spec(), n, 805);
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const double theta = 0.39;
    std::vector<double> med_dev;
    for (const std::size_t q : {22u, 150u}) {
        const auto gbar = sample_autocov(x, q);
        const double partial = hac_partial(gbar, scheme, theta, q, 0.0, n).value;
        std::vector<double> devs;
        for (std::uint64_t r = 0; r < 1000; ++r) {
            Rng rng = Rng::for_stream(806, r, StreamRole::Weights, q);
            const auto w = gen_weights(scheme, n, rng);
            devs.push_back(std::fabs(hac_complete(gbar, w, theta, q, 0.0).value / partial - 1.0));
        }
        med_dev.push_back(median(devs));
    }
    CHECK(med_dev[1] < med_dev[0]);
}

TEST_CASE("studentized pivot equals the unstudentized one times the variance bridge") {
    const std::size_t n = 300;
    const Series x = simulate(ar1_spec(), n, 807);
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const double theta = 0.39;
    const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);
    const auto mom = theoretical_moments(ar1_spec(), n - 1, 2, 3000);
    Rng wrng(808);
    const auto w = gen_weights(scheme, n, wrng);

    for (const bool complete : {false, true}) {
        const double g = studentized_randomized(x, w, theta, 0.0, 0.0, q, complete, scheme);
        const auto t = pivot_randomized(x, w, theta, 0.0, scheme, mom.gamma);
        const auto gbar = sample_autocov(x, q);
        const double s = complete ? hac_complete(gbar, w, theta, q, 0.0).value
                                  : hac_partial(gbar, scheme, theta, q, 0.0, n).value;
        const double bridge =
            std::sqrt(t.normalizer / (static_cast<double>(n) * s));
        CHECK(g == doctest::Approx(t.value * bridge).epsilon(1e-12));
    }
}

TEST_CASE("bartlett studentizer is nonnegative for arbitrary data") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng = Rng::for_stream(809, seed, StreamRole::Data, 0);
        const std::size_t n = 16 + static_cast<std::size_t>(rng.next_below(200));
        Series x;
        x.values.resize(n);
        for (auto& v : x.values)
            v = rng.next_normal() * 3.0 + (seed % 2 ? 10.0 : -4.0);
        const std::size_t q = 1 + static_cast<std::size_t>(rng.next_below(n - 1));
        const auto gbar = sample_autocov(x, q);
        double v = 0.0;
        bool degenerate = false;
        try {
            v = hac_classical(gbar, q, 0.0).value;
        } catch (const DegenerateStudentizerError&) {
            degenerate = true;
        }
        if (!degenerate)
            CHECK(v > 0.0);
    }
}

TEST_CASE("short memory studentized pivot is near normal at n=5000") {
    const std::size_t n = 5000;
    const std::size_t reps = 20000;
    const ProcessSpec spec = ar1_spec();
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const auto mom = theoretical_moments(spec, n - 1, n - 1, 3000);
    const auto sol = solve_window_constant(cubic_coefficients(mom, scheme, n), scheme, n);
    const double theta = sol.selected;
    const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);
    std::vector<double> vals;
    vals.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng drng = Rng::for_stream(810, r, StreamRole::Data, 0);
        Rng wrng = Rng::for_stream(810, r, StreamRole::Weights, 0);
        const Series x = simulate(spec, n, drng);
        const auto w = gen_weights(scheme, n, wrng);
        vals.push_back(studentized_randomized(x, w, theta, 0.0, 0.0, q, false, scheme));
    }
    CHECK(sup_distance_to_normal(vals) < 0.025);
}

TEST_CASE("long memory studentized pivot is near normal with d known") {
    const std::size_t n = 5000;
    const std::size_t reps = 20000;
    const ProcessSpec spec = fid_spec();
    const WeightScheme scheme = WeightScheme::multinomial();
    const double theta = 1.97;
    // The long-memory table rule gives q=3 at this n, too few taper lags for the
    // studentizer to settle; the CLT admits any q growing like O(sqrt(n)).
    const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);
    std::vector<double> vals;
    vals.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng drng = Rng::for_stream(815, r, StreamRole::Data, 0);
        Rng wrng = Rng::for_stream(815, r, StreamRole::Weights, 0);
        const Series x = simulate(spec, n, drng);
        const auto w = gen_weights(scheme, n, wrng);
        vals.push_back(studentized_randomized(x, w, theta, 0.0, 0.4, q, false, scheme));
    }
    CHECK(sup_distance_to_normal(vals) < 0.04);
}

TEST_CASE("classical studentized pivot is near normal for white noise") {
    const std::size_t n = 10000;
    const std::size_t reps = 10000;
    const ProcessSpec spec = white_spec(InnovationKind::StdNormal);
    const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);
    std::vector<double> vals;
    vals.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng rng = Rng::for_stream(811, r, StreamRole::Data, 0);
        const Series x = simulate(spec, n, rng);
        vals.push_back(studentized_classical(x, 0.0, 0.0, q));
    }
    CHECK(sup_distance_to_normal(vals) < 0.02);
}

TEST_CASE("randomization removes most of the studentized skewness") {
    const std::size_t n = 200;
    const std::size_t reps = 100000;
    const ProcessSpec spec = ar1_spec();
    const WeightScheme scheme = WeightScheme::bernoulli(0.25);
    const auto mom = theoretical_moments(spec, n - 1, n - 1, 3000);
    const auto sol = solve_window_constant(cubic_coefficients(mom, scheme, n), scheme, n);
    const std::size_t q = bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule);

    std::vector<double> classical_vals;
    std::vector<double> randomized_vals;
    classical_vals.reserve(reps);
    randomized_vals.reserve(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        Rng drng = Rng::for_stream(812, r, StreamRole::Data, 0);
        Rng wrng = Rng::for_stream(812, r, StreamRole::Weights, 0);
        const Series x = simulate(spec, n, drng);
        const auto w = gen_weights(scheme, n, wrng);
        classical_vals.push_back(studentized_classical(x, 0.0, 0.0, q));
        randomized_vals.push_back(studentized_randomized(x, w, sol.selected, 0.0, 0.0, q, false,
                                                         scheme));
    }
    CHECK(std::fabs(sample_skewness(classical_vals)) >
          std::fabs(sample_skewness(randomized_vals)));
}

TEST_CASE("memory estimator calibration") {
    const std::size_t n = 5000;
    const std::size_t reps = 500;
    std::size_t fid_hits = 0;
    std::size_t white_hits = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        Rng frng = Rng::for_stream(813, r, StreamRole::Data, 0);
        const Series xf = simulate(fid_spec(), n, frng);
        const auto ef = estimate_memory(xf);
        CHECK(ef.d_hat >= 0.0);
        CHECK(ef.d_hat < 0.5);
        CHECK(ef.m == static_cast<std::size_t>(std::pow(static_cast<double>(n), 0.65)));
        if (std::fabs(ef.d_hat - 0.4) <= 0.08)
            fid_hits += 1;

        Rng wrng = Rng::for_stream(814, r, StreamRole::Data, 0);
        const Series xw = simulate(white_spec(InnovationKind::StdNormal), n, wrng);
        if (estimate_memory(xw).d_hat < 0.08)
            white_hits += 1;
    }
    CHECK(fid_hits >= 450);
    CHECK(white_hits >= 450);
}

TEST_CASE("deterministic trend saturates the memory estimator") {
    Series trend;
    trend.values.resize(512);
    for (std::size_t i = 0; i < trend.values.size(); ++i)
        trend.values[i] = static_cast<double>(i);
    bool threw = false;
    MemoryEstimate est;
    try {
        est = estimate_memory(trend);
    } catch (const EstimationError&) {
        threw = true;
    }
    if (!threw) {
        CHECK(est.d_hat > 0.498);
        CHECK(est.clamped);
    }
}
