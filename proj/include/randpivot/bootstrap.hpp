#pragma once

#include "randpivot/ci.hpp"
#include "randpivot/linproc.hpp"

#include <optional>

namespace randpivot {

class Rng;

enum class BootstrapMethod { Sieve, FilteredSieve, Block };

struct BootstrapConfig {
    std::size_t B = 1000;
    BootstrapMethod method = BootstrapMethod::Sieve;
    double alpha = 0.05;
    std::size_t pmax = 0;
    std::size_t blocklen = 0;

    void validate() const;
    std::size_t effective_pmax(std::size_t n) const;
    std::size_t effective_blocklen(std::size_t n) const;
};

Interval sieve_ci(const Series& series, const BootstrapConfig& cfg, Rng& rng);

Interval filtered_sieve_ci(const Series& series, const BootstrapConfig& cfg, Rng& rng,
                           std::optional<double> d_override = std::nullopt);

Interval block_ci(const Series& series, const BootstrapConfig& cfg, Rng& rng);

} // namespace randpivot
