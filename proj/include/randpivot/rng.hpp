#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

namespace randpivot {

/// Role of an RNG stream inside one experiment replication. Streams with
/// different roles are statistically independent, so adding a consumer (say,
/// a bootstrap) never perturbs the draws seen by another (the data).
enum class StreamRole : std::uint64_t { Data = 1, Weights = 2, Bootstrap = 3 };

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// xoshiro256++ generator with splittable seeding.
///
/// A stream is keyed by (master seed, replication index, role, salt); the key
/// is stirred through SplitMix64 to fill the state. Equal keys give identical
/// streams, distinct keys give independent ones, and no stream is ever shared
/// between threads, which is what makes the Monte Carlo harness deterministic
/// under any parallel schedule.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) { seed_state(seed); }

    static Rng for_stream(std::uint64_t master, std::uint64_t replication, StreamRole role,
                          std::uint64_t salt = 0) {
        std::uint64_t k = master;
        std::uint64_t mixer = k;
        k = detail::splitmix64(mixer) ^ (0xd1342543de82ef95ULL * (replication + 1));
        mixer = k;
        k = detail::splitmix64(mixer) ^ (0xaf251af3b0f025b5ULL * (static_cast<std::uint64_t>(role) + 1));
        mixer = k;
        k = detail::splitmix64(mixer) ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
        return Rng(k);
    }

    /// Derived independent stream; used to give each method its own bootstrap
    /// randomness regardless of which other methods run.
    Rng fork(std::uint64_t salt) const {
        std::uint64_t k = s_[0] ^ (s_[1] * 0x2545f4914f6cdd1dULL) ^ (salt + 0x632be59bd9b4e019ULL);
        return Rng(k);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller (pairs are cached).
    double next_normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = next_double();
        while (u1 <= 0.0)
            u1 = next_double();
        const double u2 = next_double();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Uniform integer in {0, ..., bound-1} by multiply-shift on the top bits.
    std::uint64_t next_below(std::uint64_t bound) {
        return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

  private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    void seed_state(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_)
            w = detail::splitmix64(sm);
        bool all_zero = true;
        for (auto w : s_)
            all_zero = all_zero && w == 0;
        if (all_zero)
            s_[0] = 0x9e3779b97f4a7c15ULL;
    }

    std::uint64_t s_[4]{};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace randpivot
