#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace randpivot {

/// Radix-2 FFT plan for a fixed power-of-two size: bit-reversal permutation
/// and twiddle factors are precomputed once and shared read-only, so a plan
/// can be applied concurrently from many threads.
class FftPlan {
  public:
    explicit FftPlan(std::size_t size);

    std::size_t size() const { return n_; }

    /// In-place transform; inverse=true applies the unscaled inverse
    /// (conjugate transform) followed by division by size.
    void apply(std::vector<std::complex<double>>& a, bool inverse) const;

    /// Shared plan cache keyed by size.
    static std::shared_ptr<const FftPlan> get(std::size_t size);

  private:
    std::size_t n_;
    std::vector<std::size_t> rev_;
    std::vector<std::complex<double>> twiddle_; // forward factors, n_/2 entries

    friend std::size_t next_pow2(std::size_t);
};

std::size_t next_pow2(std::size_t n);

/// Linear convolution of a and b (lengths la, lb) returning la+lb-1 values.
std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b);

} // namespace randpivot
