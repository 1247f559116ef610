#include "randpivot/weights.hpp"

#include "randpivot/errors.hpp"
#include "randpivot/rng.hpp"

#include <cmath>
#include <sstream>

namespace randpivot {

namespace {

double horner(const std::array<double, 4>& c, double x) {
    return ((c[0] * x + c[1]) * x + c[2]) * x + c[3];
}

} // namespace

void WeightScheme::validate() const {
    switch (kind) {
    case WeightKind::IidBernoulli:
        if (!(p > 0.0 && p < 1.0))
            throw ParameterError("Bernoulli weights require p in (0, 1)");
        break;
    case WeightKind::IidCustom:
        if (!std::isfinite(ew1) || !std::isfinite(ew2) || !std::isfinite(ew3))
            throw ParameterError("custom weights require finite first three moments");
        if (ew2 - ew1 * ew1 < -1e-12)
            throw ParameterError("custom weight moments imply negative variance");
        break;
    case WeightKind::SymMultinomial:
        break;
    }
}

double WeightScheme::mean_w() const {
    switch (kind) {
    case WeightKind::IidBernoulli:
        return p;
    case WeightKind::IidCustom:
        return ew1;
    case WeightKind::SymMultinomial:
        return 1.0;
    }
    return 0.0;
}

double WeightScheme::var_w(std::size_t n) const {
    switch (kind) {
    case WeightKind::IidBernoulli:
        return p * (1.0 - p);
    case WeightKind::IidCustom:
        return std::max(ew2 - ew1 * ew1, 0.0);
    case WeightKind::SymMultinomial:
        return 1.0 - 1.0 / static_cast<double>(n);
    }
    return 0.0;
}

std::array<double, 3> WeightScheme::raw_moments(std::size_t n) const {
    switch (kind) {
    case WeightKind::IidBernoulli:
        return {p, p, p};
    case WeightKind::IidCustom:
        return {ew1, ew2, ew3};
    case WeightKind::SymMultinomial: {
        const double in = 1.0 / static_cast<double>(n);
        return {1.0, 2.0 - in, 5.0 - 6.0 * in + 2.0 * in * in};
    }
    }
    return {0.0, 0.0, 0.0};
}

std::string WeightScheme::to_config() const {
    std::ostringstream os;
    os.precision(17);
    os << "scheme = ";
    switch (kind) {
    case WeightKind::IidBernoulli:
        os << "bernoulli\np = " << p;
        break;
    case WeightKind::IidCustom:
        os << "custom\new1 = " << ew1 << "\new2 = " << ew2 << "\new3 = " << ew3;
        break;
    case WeightKind::SymMultinomial:
        os << "multinomial";
        break;
    }
    os << '\n';
    return os.str();
}

WeightScheme WeightScheme::bernoulli(double p) {
    WeightScheme s;
    s.kind = WeightKind::IidBernoulli;
    s.p = p;
    s.validate();
    return s;
}

WeightScheme WeightScheme::multinomial() {
    WeightScheme s;
    s.kind = WeightKind::SymMultinomial;
    return s;
}

WeightScheme WeightScheme::point_mass(double c) {
    WeightScheme s;
    s.kind = WeightKind::IidCustom;
    s.ew1 = c;
    s.ew2 = c * c;
    s.ew3 = c * c * c;
    s.sampler = [c](Rng&) { return c; };
    return s;
}

std::vector<double> gen_weights(const WeightScheme& scheme, std::size_t n, Rng& rng) {
    scheme.validate();
    if (n < 2)
        throw ParameterError("gen_weights requires n >= 2");
    std::vector<double> w(n, 0.0);
    switch (scheme.kind) {
    case WeightKind::IidBernoulli:
        for (std::size_t i = 0; i < n; ++i)
            w[i] = rng.next_double() < scheme.p ? 1.0 : 0.0;
        break;
    case WeightKind::IidCustom:
        if (!scheme.sampler)
            throw ParameterError("custom weights require a sampler");
        for (std::size_t i = 0; i < n; ++i)
            w[i] = scheme.sampler(rng);
        break;
    case WeightKind::SymMultinomial:
        for (std::size_t i = 0; i < n; ++i)
            w[rng.next_below(n)] += 1.0;
        break;
    }
    return w;
}

PatternPolys pattern_polynomials(const WeightScheme& scheme, std::size_t n) {
    scheme.validate();
    PatternPolys polys;
    if (scheme.kind == WeightKind::SymMultinomial) {
        const double in = 1.0 / static_cast<double>(n);
        polys.m3 = {-1.0, 3.0, -3.0 * (2.0 - in), 5.0 - 6.0 * in + 2.0 * in * in};
        polys.m21 = {-1.0, 3.0, -(4.0 - 3.0 * in), 2.0 - 4.0 * in + 2.0 * in * in};
        polys.m111 = {-1.0, 3.0, -3.0 * (1.0 - in), 1.0 - 3.0 * in + 2.0 * in * in};
    } else {
        const auto [e1, e2, e3] = scheme.raw_moments(n);
        polys.m3 = {-1.0, 3.0 * e1, -3.0 * e2, e3};
        polys.m21 = {-1.0, 3.0 * e1, -(e2 + 2.0 * e1 * e1), e2 * e1};
        polys.m111 = {-1.0, 3.0 * e1, -3.0 * e1 * e1, e1 * e1 * e1};
    }
    return polys;
}

PatternMoments pattern_moments(const WeightScheme& scheme, double theta, std::size_t n) {
    scheme.validate();
    PatternMoments pm;
    pm.theta = theta;
    pm.m1 = scheme.mean_w() - theta;
    const auto polys = pattern_polynomials(scheme, n);
    pm.m3 = horner(polys.m3, theta);
    pm.m21 = horner(polys.m21, theta);
    pm.m111 = horner(polys.m111, theta);
    if (scheme.kind == WeightKind::SymMultinomial) {
        const double in = 1.0 / static_cast<double>(n);
        pm.m2 = (2.0 - in) - 2.0 * theta + theta * theta;
        pm.m2cross = (1.0 - in) - 2.0 * theta + theta * theta;
        pm.K = 2.0 - 2.0 * theta + theta * theta;
        pm.Kprime = (1.0 - theta) * (1.0 - theta);
    } else {
        const auto [e1, e2, e3] = scheme.raw_moments(n);
        (void)e3;
        pm.m2 = e2 - 2.0 * theta * e1 + theta * theta;
        pm.m2cross = pm.m1 * pm.m1;
        pm.K = pm.m2;
        pm.Kprime = pm.m2cross;
    }
    return pm;
}

} // namespace randpivot
