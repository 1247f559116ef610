#include "randpivot/window.hpp"

#include "randpivot/errors.hpp"
#include "randpivot/pivot.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace randpivot {

namespace {

struct CubicTerms {
    double C3 = 0.0;
    double C21 = 0.0;
    double C111 = 0.0;
};

CubicTerms moment_terms(const MomentStructure& mom, std::size_t n) {
    if (!mom.has_third_order)
        throw IncompleteMomentError("moment structure lacks third-order entries");
    CubicTerms t;
    t.C3 = mom.m3_single;
    const double dn = static_cast<double>(n);
    const std::size_t hmax = std::min(mom.m3_pair.size(), n - 1);
    for (std::size_t h = 1; h <= hmax; ++h)
        t.C21 += (1.0 - static_cast<double>(h) / dn) * mom.pair_sum(h);
    const std::size_t mmax = std::min(mom.m3_triple_by_sum.size() + 1, n - 1);
    for (std::size_t m = 2; m <= mmax; ++m)
        t.C111 += (1.0 - static_cast<double>(m) / dn) * mom.triple_sum(m);
    return t;
}

std::vector<double> real_cubic_roots(const std::array<double, 4>& c) {
    const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3])});
    std::vector<double> roots;
    if (scale <= 0.0)
        return roots;
    const double tol = 1e-12 * scale;
    if (std::abs(c[0]) > tol) {
        const double p = c[1] / c[0];
        const double q = c[2] / c[0];
        const double r = c[3] / c[0];
        const double A = q - p * p / 3.0;
        const double B = 2.0 * p * p * p / 27.0 - p * q / 3.0 + r;
        const double shift = -p / 3.0;
        const double disc = B * B / 4.0 + A * A * A / 27.0;
        if (disc > 0.0) {
            const double s = std::sqrt(disc);
            const double t = std::cbrt(-B / 2.0 + s) + std::cbrt(-B / 2.0 - s);
            roots.push_back(t + shift);
        } else {
            const double m = std::sqrt(std::max(-A / 3.0, 0.0));
            if (m == 0.0) {
                roots.push_back(shift);
            } else {
                double arg = -B / (2.0 * m * m * m);
                arg = std::clamp(arg, -1.0, 1.0);
                const double phi = std::acos(arg);
                for (int k = 0; k < 3; ++k)
                    roots.push_back(2.0 * m * std::cos((phi + 2.0 * M_PI * k) / 3.0) + shift);
            }
        }
    } else if (std::abs(c[1]) > tol) {
        const double disc = c[2] * c[2] - 4.0 * c[1] * c[3];
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            roots.push_back((-c[2] + s) / (2.0 * c[1]));
            roots.push_back((-c[2] - s) / (2.0 * c[1]));
        }
    } else if (std::abs(c[2]) > tol) {
        roots.push_back(-c[3] / c[2]);
    }

    for (double& root : roots) {
        for (int step = 0; step < 2; ++step) {
            const double h = eval_cubic(c, root);
            const double hp = (3.0 * c[0] * root + 2.0 * c[1]) * root + c[2];
            if (std::abs(hp) < 1e-300)
                break;
            root -= h / hp;
        }
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end(),
                            [](double a, double b) {
                                return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a));
                            }),
                roots.end());
    return roots;
}

} // namespace

double eval_cubic(const std::array<double, 4>& coeffs, double theta) {
    return ((coeffs[0] * theta + coeffs[1]) * theta + coeffs[2]) * theta + coeffs[3];
}

std::array<double, 4> cubic_coefficients(const MomentStructure& mom, const WeightScheme& scheme,
                                         std::size_t n) {
    if (n < 2)
        throw ParameterError("cubic_coefficients requires n >= 2");
    const CubicTerms t = moment_terms(mom, n);
    const PatternPolys polys = pattern_polynomials(scheme, n);
    std::array<double, 4> c{};
    for (int i = 0; i < 4; ++i)
        c[i] = polys.m3[i] * t.C3 + 3.0 * polys.m21[i] * t.C21 + 6.0 * polys.m111[i] * t.C111;
    return c;
}

WindowSolution solve_window_constant(const std::array<double, 4>& coeffs,
                                     const WeightScheme& scheme, std::size_t n,
                                     SelectionPolicy policy, double fixed_theta) {
    scheme.validate();
    WindowSolution sol;
    sol.coeffs = coeffs;
    const double ew = scheme.mean_w();
    sol.eps_excl = 0.05 * std::sqrt(scheme.var_w(n));
    sol.delta_max = 1e-3 * std::max(1.0, std::abs(coeffs[3]));

    const double scale = std::max(
        {std::abs(coeffs[0]), std::abs(coeffs[1]), std::abs(coeffs[2]), std::abs(coeffs[3])});

    if (policy == SelectionPolicy::UserFixed) {
        if (std::abs(fixed_theta - ew) < sol.eps_excl)
            throw ParameterError("fixed theta lies inside the exclusion band around the weight mean");
        sol.roots = real_cubic_roots(coeffs);
        sol.selected = fixed_theta;
        sol.residual = eval_cubic(coeffs, fixed_theta);
        return sol;
    }

    if (scale <= 1e-300) {
        sol.degenerate = true;
        sol.selected = ew + 1.0;
        sol.residual = 0.0;
        return sol;
    }

    sol.roots = real_cubic_roots(coeffs);
    std::vector<double> admissible;
    for (double r : sol.roots) {
        if (std::abs(r - ew) >= sol.eps_excl)
            admissible.push_back(r);
        else
            sol.excluded.emplace_back(r, "within exclusion band around the weight mean");
    }

    if (!admissible.empty()) {
        double best = admissible.front();
        for (double r : admissible) {
            const bool better = policy == SelectionPolicy::NearestToMean
                                    ? std::abs(r - ew) < std::abs(best - ew)
                                    : std::abs(r - ew) > std::abs(best - ew);
            if (better)
                best = r;
        }
        sol.selected = best;
        sol.residual = eval_cubic(coeffs, best);
        return sol;
    }

    const std::size_t grid_points = 4000;
    double best_theta = 0.0;
    double best_abs = std::numeric_limits<double>::infinity();
    const auto scan = [&](double start, double stop) {
        for (std::size_t i = 0; i < grid_points; ++i) {
            const double theta =
                start + (stop - start) * (static_cast<double>(i) / static_cast<double>(grid_points - 1));
            const double value = std::abs(eval_cubic(coeffs, theta));
            if (value < best_abs) {
                best_abs = value;
                best_theta = theta;
            }
        }
    };
    scan(ew - 2.0, ew - sol.eps_excl);
    scan(ew + sol.eps_excl, ew + 2.0);

    if (best_abs <= sol.delta_max) {
        sol.selected = best_theta;
        sol.residual = eval_cubic(coeffs, best_theta);
        sol.from_grid = true;
        return sol;
    }
    throw NoAdmissibleWindowError("no admissible window constant: best |H| " +
                                  std::to_string(best_abs) + " exceeds tolerance " +
                                  std::to_string(sol.delta_max));
}

double skewness_classical(const MomentStructure& mom, std::size_t n) {
    const CubicTerms t = moment_terms(mom, n);
    const double dn = static_cast<double>(n);
    double var = mom.gamma.at(0);
    const std::size_t hmax = std::min(mom.gamma.size() - 1, n - 1);
    for (std::size_t h = 1; h <= hmax; ++h)
        var += 2.0 * (1.0 - static_cast<double>(h) / dn) * mom.gamma[h];
    if (!(var > 0.0))
        throw DegenerateVarianceError("nonpositive variance in classical skewness");
    return (t.C3 + 3.0 * t.C21 + 6.0 * t.C111) / (std::sqrt(dn) * std::pow(var, 1.5));
}

double skewness_randomized(const MomentStructure& mom, const WeightScheme& scheme, double theta,
                           std::size_t n) {
    const std::array<double, 4> c = cubic_coefficients(mom, scheme, n);
    const double normalizer = randomized_variance(scheme, theta, mom.gamma, n);
    return eval_cubic(c, theta) * static_cast<double>(n) / std::pow(normalizer, 1.5);
}

std::string WindowSolution::to_json() const {
    nlohmann::json j;
    j["coeffs"] = {{"c3", coeffs[0]}, {"c2", coeffs[1]}, {"c1", coeffs[2]}, {"c0", coeffs[3]}};
    j["roots"] = roots;
    j["selected"] = selected;
    j["residual"] = residual;
    j["mode"] = mode == MomentSource::Model ? "model" : "plugin";
    j["degenerate"] = degenerate;
    j["from_grid"] = from_grid;
    j["eps_excl"] = eps_excl;
    j["delta_max"] = delta_max;
    auto& ex = j["excluded"] = nlohmann::json::array();
    for (const auto& [root, reason] : excluded)
        ex.push_back({{"root", root}, {"reason", reason}});
    return j.dump(2);
}

} // namespace randpivot
