#pragma once

#include "randpivot/linproc.hpp"
#include "randpivot/weights.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace randpivot {

enum class SelectionPolicy { MaxDistanceFromMean, NearestToMean, UserFixed };

struct WindowSolution {
    std::array<double, 4> coeffs{};
    std::vector<double> roots;
    double selected = 0.0;
    std::vector<std::pair<double, std::string>> excluded;
    double residual = 0.0;
    MomentSource mode = MomentSource::Model;
    bool degenerate = false;
    bool from_grid = false;
    double eps_excl = 0.0;
    double delta_max = 0.0;

    std::string to_json() const;
};

std::array<double, 4> cubic_coefficients(const MomentStructure& mom, const WeightScheme& scheme,
                                         std::size_t n);

double eval_cubic(const std::array<double, 4>& coeffs, double theta);

WindowSolution solve_window_constant(const std::array<double, 4>& coeffs,
                                     const WeightScheme& scheme, std::size_t n,
                                     SelectionPolicy policy = SelectionPolicy::MaxDistanceFromMean,
                                     double fixed_theta = 0.0);

double skewness_classical(const MomentStructure& mom, std::size_t n);

double skewness_randomized(const MomentStructure& mom, const WeightScheme& scheme, double theta,
                           std::size_t n);

} // namespace randpivot
