#include "randpivot/fft.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace randpivot {

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n)
        p <<= 1;
    return p;
}

FftPlan::FftPlan(std::size_t size) : n_(size) {
    if (n_ == 0 || (n_ & (n_ - 1)) != 0)
        throw std::invalid_argument("FftPlan: size must be a power of two");
    rev_.resize(n_);
    std::size_t bits = 0;
    while ((std::size_t{1} << bits) < n_)
        ++bits;
    for (std::size_t i = 0; i < n_; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < bits; ++b)
            if (i & (std::size_t{1} << b))
                r |= std::size_t{1} << (bits - 1 - b);
        rev_[i] = r;
    }
    twiddle_.resize(n_ / 2);
    for (std::size_t k = 0; k < n_ / 2; ++k) {
        const double ang = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n_);
        twiddle_[k] = {std::cos(ang), std::sin(ang)};
    }
}

void FftPlan::apply(std::vector<std::complex<double>>& a, bool inverse) const {
    if (a.size() != n_)
        throw std::invalid_argument("FftPlan::apply: size mismatch");
    for (std::size_t i = 0; i < n_; ++i)
        if (rev_[i] > i)
            std::swap(a[i], a[rev_[i]]);
    for (std::size_t len = 2; len <= n_; len <<= 1) {
        const std::size_t stride = n_ / len;
        for (std::size_t start = 0; start < n_; start += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                std::complex<double> w = twiddle_[k * stride];
                if (inverse)
                    w = std::conj(w);
                const auto u = a[start + k];
                const auto v = a[start + k + len / 2] * w;
                a[start + k] = u + v;
                a[start + k + len / 2] = u - v;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n_);
        for (auto& z : a)
            z *= inv;
    }
}

std::shared_ptr<const FftPlan> FftPlan::get(std::size_t size) {
    static std::mutex mu;
    static std::map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(size);
    if (it != cache.end())
        return it->second;
    auto plan = std::make_shared<const FftPlan>(size);
    cache.emplace(size, plan);
    return plan;
}

std::vector<double> fft_convolve(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("fft_convolve: empty input");
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t L = next_pow2(out_len);
    auto plan = FftPlan::get(L);
    std::vector<std::complex<double>> fa(L), fb(L);
    for (std::size_t i = 0; i < a.size(); ++i)
        fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        fb[i] = b[i];
    plan->apply(fa, false);
    plan->apply(fb, false);
    for (std::size_t i = 0; i < L; ++i)
        fa[i] *= fb[i];
    plan->apply(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i)
        out[i] = fa[i].real();
    return out;
}

} // namespace randpivot
