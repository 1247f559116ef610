#include "randpivot/linproc.hpp"

#include "randpivot/errors.hpp"
#include "randpivot/fft.hpp"
#include "randpivot/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <tuple>

namespace randpivot {

namespace {

const double kLognormalShift = std::exp(0.5);
const double kLognormalScale = std::sqrt(std::exp(2.0) - std::exp(1.0));

std::size_t ar1_burn_in(double phi) {
    return 1000 + static_cast<std::size_t>(std::ceil(10.0 / (1.0 - std::abs(phi))));
}

std::size_t fid_truncation(std::size_t n) {
    return std::max<std::size_t>(10 * n, 10000);
}

std::shared_ptr<const std::vector<std::complex<double>>> fid_spectrum(double d, std::size_t K,
                                                                      std::size_t L,
                                                                      const std::vector<double>& a) {
    static std::mutex mu;
    static std::map<std::tuple<std::uint64_t, std::size_t, std::size_t>,
                    std::shared_ptr<const std::vector<std::complex<double>>>>
        cache;
    const auto key = std::make_tuple(std::bit_cast<std::uint64_t>(d), K, L);
    {
        std::lock_guard lock(mu);
        auto it = cache.find(key);
        if (it != cache.end())
            return it->second;
    }
    auto spec = std::make_shared<std::vector<std::complex<double>>>(L);
    for (std::size_t k = 0; k < a.size(); ++k)
        (*spec)[k] = a[k];
    FftPlan::get(L)->apply(*spec, false);
    std::lock_guard lock(mu);
    cache.emplace(key, spec);
    return spec;
}

} // namespace

void ProcessSpec::validate() const {
    switch (kind) {
    case ProcessKind::AR1:
        if (!(std::abs(phi) < 1.0))
            throw ParameterError("AR1 requires |phi| < 1");
        if (d != 0.0)
            throw ParameterError("AR1 requires d = 0");
        break;
    case ProcessKind::FID:
        if (!(d > 0.0 && d < 0.5))
            throw ParameterError("FID requires 0 < d < 1/2");
        break;
    case ProcessKind::MAfinite:
        if (ma.empty())
            throw ParameterError("MAfinite requires at least one coefficient");
        if (d != 0.0)
            throw ParameterError("MAfinite requires d = 0");
        break;
    case ProcessKind::White:
        if (d != 0.0)
            throw ParameterError("White requires d = 0");
        break;
    }
    if (innovation == InnovationKind::Custom && custom_mu2 != 1.0)
        throw ParameterError("custom innovation must be standardized to unit variance");
    if (!std::isfinite(mu))
        throw ParameterError("process mean must be finite");
}

double ProcessSpec::memory() const {
    return kind == ProcessKind::FID ? d : 0.0;
}

double ProcessSpec::innovation_mu3() const {
    switch (innovation) {
    case InnovationKind::StdNormal:
        return 0.0;
    case InnovationKind::StdLognormal:
        return (std::exp(1.0) + 2.0) * std::sqrt(std::exp(1.0) - 1.0);
    case InnovationKind::Custom:
        return custom_mu3;
    }
    return 0.0;
}

std::string ProcessSpec::to_config() const {
    std::ostringstream os;
    os.precision(17);
    os << "kind = ";
    switch (kind) {
    case ProcessKind::White:
        os << "white";
        break;
    case ProcessKind::AR1:
        os << "ar1\nphi = " << phi;
        break;
    case ProcessKind::FID:
        os << "fid\nd = " << d;
        break;
    case ProcessKind::MAfinite:
        os << "ma\ncoeffs =";
        for (double b : ma)
            os << ' ' << b;
        break;
    }
    os << "\ninnovation = ";
    switch (innovation) {
    case InnovationKind::StdNormal:
        os << "normal";
        break;
    case InnovationKind::StdLognormal:
        os << "lognormal";
        break;
    case InnovationKind::Custom:
        os << "custom\nmu2 = " << custom_mu2 << "\nmu3 = " << custom_mu3 << "\nmu4 = " << custom_mu4;
        break;
    }
    os << "\nmu = " << mu << '\n';
    return os.str();
}

double innovation_draw(const ProcessSpec& spec, Rng& rng) {
    switch (spec.innovation) {
    case InnovationKind::StdNormal:
        return rng.next_normal();
    case InnovationKind::StdLognormal:
        return (std::exp(rng.next_normal()) - kLognormalShift) / kLognormalScale;
    case InnovationKind::Custom:
        throw ParameterError("custom innovation law carries moments only and cannot be sampled");
    }
    return 0.0;
}

Series simulate(const ProcessSpec& spec, std::size_t n, Rng& rng) {
    spec.validate();
    if (n < 2)
        throw ParameterError("simulate requires n >= 2");
    Series out;
    out.values.resize(n);
    switch (spec.kind) {
    case ProcessKind::White: {
        for (std::size_t i = 0; i < n; ++i)
            out.values[i] = spec.mu + innovation_draw(spec, rng);
        break;
    }
    case ProcessKind::AR1: {
        const std::size_t burn = ar1_burn_in(spec.phi);
        double x = 0.0;
        for (std::size_t t = 0; t < burn; ++t)
            x = spec.phi * x + innovation_draw(spec, rng);
        for (std::size_t t = 0; t < n; ++t) {
            x = spec.phi * x + innovation_draw(spec, rng);
            out.values[t] = spec.mu + x;
        }
        break;
    }
    case ProcessKind::MAfinite: {
        const std::size_t K = spec.ma.size() - 1;
        std::vector<double> z(n + K);
        for (auto& v : z)
            v = innovation_draw(spec, rng);
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            for (std::size_t k = 0; k <= K; ++k)
                s += spec.ma[k] * z[t + K - k];
            out.values[t] = spec.mu + s;
        }
        break;
    }
    case ProcessKind::FID: {
        const std::size_t K = fid_truncation(n);
        const std::vector<double> a = ma_coefficients(spec, K);
        const std::size_t L = next_pow2(K + n);
        auto fa = fid_spectrum(spec.d, K, L, a);
        std::vector<std::complex<double>> fz(L);
        for (std::size_t t = 0; t < K + n; ++t)
            fz[t] = innovation_draw(spec, rng);
        auto plan = FftPlan::get(L);
        plan->apply(fz, false);
        for (std::size_t i = 0; i < L; ++i)
            fz[i] *= (*fa)[i];
        plan->apply(fz, true);
        for (std::size_t t = 0; t < n; ++t)
            out.values[t] = spec.mu + fz[K + t].real();
        break;
    }
    }
    return out;
}

Series simulate(const ProcessSpec& spec, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    Series out = simulate(spec, n, rng);
    out.seed = seed;
    return out;
}

std::vector<double> ma_coefficients(const ProcessSpec& spec, std::size_t K) {
    spec.validate();
    std::vector<double> a(K + 1, 0.0);
    switch (spec.kind) {
    case ProcessKind::White:
        a[0] = 1.0;
        break;
    case ProcessKind::AR1: {
        a[0] = 1.0;
        for (std::size_t k = 1; k <= K; ++k)
            a[k] = a[k - 1] * spec.phi;
        break;
    }
    case ProcessKind::FID: {
        a[0] = 1.0;
        for (std::size_t k = 1; k <= K; ++k)
            a[k] = a[k - 1] * (static_cast<double>(k) - 1.0 + spec.d) / static_cast<double>(k);
        break;
    }
    case ProcessKind::MAfinite: {
        for (std::size_t k = 0; k < spec.ma.size() && k <= K; ++k)
            a[k] = spec.ma[k];
        break;
    }
    }
    return a;
}

MomentStructure theoretical_moments(const ProcessSpec& spec, std::size_t H, std::size_t Lpair,
                                    std::size_t K) {
    spec.validate();
    const std::vector<double> a = ma_coefficients(spec, K);
    const double mu3 = spec.innovation_mu3();
    MomentStructure mom;
    mom.source = MomentSource::Model;
    mom.lag_cap = Lpair;
    mom.has_third_order = true;

    mom.gamma.resize(H + 1, 0.0);
    if (spec.kind == ProcessKind::FID) {
        mom.gamma[0] = std::tgamma(1.0 - 2.0 * spec.d) / std::pow(std::tgamma(1.0 - spec.d), 2.0);
        for (std::size_t h = 1; h <= H; ++h)
            mom.gamma[h] = mom.gamma[h - 1] * (static_cast<double>(h) - 1.0 + spec.d) /
                           (static_cast<double>(h) - spec.d);
    } else {
        for (std::size_t h = 0; h <= H; ++h) {
            double s = 0.0;
            for (std::size_t k = 0; k + h <= K; ++k)
                s += a[k] * a[k + h];
            mom.gamma[h] = s;
        }
    }

    double a3 = 0.0;
    for (double v : a)
        a3 += v * v * v;
    mom.m3_single = mu3 * a3;

    mom.m3_pair.resize(Lpair);
    for (std::size_t h = 1; h <= Lpair; ++h) {
        double s21 = 0.0;
        double s12 = 0.0;
        for (std::size_t k = 0; k + h <= K; ++k) {
            s21 += a[k] * a[k] * a[k + h];
            s12 += a[k] * a[k + h] * a[k + h];
        }
        mom.m3_pair[h - 1] = {mu3 * s21, mu3 * s12};
    }

    std::vector<double> prefix(K + 2, 0.0);
    for (std::size_t j = 0; j <= K; ++j)
        prefix[j + 1] = prefix[j] + a[j];
    if (Lpair >= 2) {
        mom.m3_triple_by_sum.resize(Lpair - 1, 0.0);
        for (std::size_t m = 2; m <= Lpair; ++m) {
            double s = 0.0;
            for (std::size_t k = 0; k + m <= K; ++k)
                s += a[k] * a[k + m] * (prefix[k + m] - prefix[k + 1]);
            mom.m3_triple_by_sum[m - 2] = mu3 * s;
        }
    }

    if (spec.kind == ProcessKind::FID) {
        const double tail = std::pow(std::abs(a[K]), 3.0) * static_cast<double>(K) /
                            (2.0 - 3.0 * spec.d);
        if (tail > 1e-4 * std::max(std::abs(a3), 1e-12))
            mom.truncation_warning = true;
    }
    return mom;
}

std::vector<double> sample_autocov(const Series& series, std::size_t smax) {
    const std::size_t n = series.size();
    if (n < 2)
        throw ParameterError("sample_autocov requires n >= 2");
    if (smax >= n)
        throw ParameterError("sample_autocov requires smax <= n - 1");
    double mean = 0.0;
    for (double v : series.values)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> g(smax + 1, 0.0);
    for (std::size_t s = 0; s <= smax; ++s) {
        double acc = 0.0;
        for (std::size_t j = 0; j + s < n; ++j)
            acc += (series.values[j] - mean) * (series.values[j + s] - mean);
        g[s] = acc / static_cast<double>(n);
    }
    return g;
}

MomentStructure plugin_moments(const Series& series, std::size_t H, std::size_t L) {
    const std::size_t n = series.size();
    if (n < 4 || L > H || H > n - 2)
        throw ParameterError("plugin_moments requires L <= H <= n - 2");
    MomentStructure mom;
    mom.source = MomentSource::PlugIn;
    mom.lag_cap = L;
    mom.has_third_order = true;
    mom.gamma = sample_autocov(series, H);
    if (!(mom.gamma[0] > 0.0))
        throw DegenerateDataError("plugin_moments requires a nondegenerate series");

    double mean = 0.0;
    for (double v : series.values)
        mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> c(n);
    for (std::size_t j = 0; j < n; ++j)
        c[j] = series.values[j] - mean;

    double s3 = 0.0;
    for (double v : c)
        s3 += v * v * v;
    mom.m3_single = s3 / static_cast<double>(n);

    mom.m3_pair.resize(L);
    for (std::size_t h = 1; h <= L; ++h) {
        double s21 = 0.0;
        double s12 = 0.0;
        for (std::size_t j = 0; j + h < n; ++j) {
            s21 += c[j] * c[j] * c[j + h];
            s12 += c[j] * c[j + h] * c[j + h];
        }
        mom.m3_pair[h - 1] = {s21 / static_cast<double>(n), s12 / static_cast<double>(n)};
    }

    if (L >= 2) {
        std::vector<double> prefix(n + 1, 0.0);
        for (std::size_t j = 0; j < n; ++j)
            prefix[j + 1] = prefix[j] + c[j];
        mom.m3_triple_by_sum.resize(L - 1, 0.0);
        for (std::size_t m = 2; m <= L; ++m) {
            double s = 0.0;
            for (std::size_t j = 0; j + m < n; ++j)
                s += c[j] * c[j + m] * (prefix[j + m] - prefix[j + 1]);
            mom.m3_triple_by_sum[m - 2] = s / static_cast<double>(n);
        }
    }
    return mom;
}

void write_series_csv(const Series& series, std::ostream& out) {
    out << "x\n";
    out.precision(17);
    for (double v : series.values)
        out << v << '\n';
}

Series read_series_csv(std::istream& in) {
    Series out;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (first) {
            first = false;
            if (line == "x")
                continue;
        }
        try {
            out.values.push_back(std::stod(line));
        } catch (const std::exception&) {
            throw ParameterError("series CSV contains a non-numeric row: " + line);
        }
    }
    if (out.values.size() < 2)
        throw ParameterError("series CSV must contain at least two values");
    return out;
}

} // namespace randpivot
