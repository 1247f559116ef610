#pragma once

#include <stdexcept>
#include <string>

namespace randpivot {

struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IncompleteMomentError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoAdmissibleWindowError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateVarianceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateStudentizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DenominatorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace randpivot
