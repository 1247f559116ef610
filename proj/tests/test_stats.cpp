#include "doctest.h"

#include "randpivot/rng.hpp"
#include "randpivot/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

using namespace randpivot;

TEST_CASE("normal cdf reference values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
    CHECK(normal_cdf(-1.0) == doctest::Approx(1.0 - 0.8413447460685429).epsilon(1e-12));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
    CHECK(normal_cdf(6.0) > 0.999999999);
}

TEST_CASE("normal quantile inverts the cdf") {
    for (const double p : {0.001, 0.025, 0.2, 0.5, 0.8, 0.975, 0.999}) {
        const double x = normal_quantile(p);
        CHECK(normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("two-sided critical value") {
    CHECK(z_alpha_half(0.05) == doctest::Approx(1.959963984540054).epsilon(1e-12));
    CHECK(z_alpha_half(0.01) == doctest::Approx(2.5758293035489004).epsilon(1e-12));
}

TEST_CASE("mean, variance, median") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK(mean(x) == doctest::Approx(2.0));
    CHECK(variance(x) == doctest::Approx(2.0 / 3.0));
    CHECK(median(x) == doctest::Approx(2.0));
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == doctest::Approx(2.5));
}

TEST_CASE("sup distance to the normal is small for normal samples") {
    Rng rng(17);
    std::vector<double> z(20000);
    for (double& v : z) v = rng.next_normal();
    CHECK(sup_distance_to_normal(z) < 0.02);
    for (double& v : z) v += 0.5;
    CHECK(sup_distance_to_normal(z) > 0.15);
}

TEST_CASE("least-squares slope on an exact line") {
    const std::vector<double> x{1.0, 2.0, 3.0, 4.0};
    std::vector<double> y;
    for (const double v : x) y.push_back(-0.5 * v + 3.0);
    CHECK(ls_slope(x, y) == doctest::Approx(-0.5).epsilon(1e-12));
}
