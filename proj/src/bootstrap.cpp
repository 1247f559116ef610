#include "randpivot/bootstrap.hpp"

#include "randpivot/errors.hpp"
#include "randpivot/rng.hpp"
#include "randpivot/stats.hpp"
#include "randpivot/studentize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace randpivot {

namespace {

constexpr std::size_t kSieveBurn = 200;
constexpr double kPathBlowup = 1e8;

struct ArFit {
    std::vector<double> phi;
    std::vector<double> resid;
};

bool solve_normal_equations(std::vector<std::vector<double>>& g, std::vector<double>& b) {
    const std::size_t p = b.size();
    double scale = 0.0;
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) scale = std::max(scale, std::fabs(g[i][j]));
    if (scale <= 0.0) return false;
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < p; ++r)
            if (std::fabs(g[r][col]) > std::fabs(g[piv][col])) piv = r;
        if (std::fabs(g[piv][col]) < 1e-12 * scale) return false;
        if (piv != col) {
            std::swap(g[piv], g[col]);
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < p; ++r) {
            const double f = g[r][col] / g[col][col];
            for (std::size_t c = col; c < p; ++c) g[r][c] -= f * g[col][c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = p; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < p; ++j) s -= g[i][j] * b[j];
        b[i] = s / g[i][i];
    }
    return true;
}

ArFit fit_best_ar(const std::vector<double>& c, std::size_t pmax) {
    const std::size_t n = c.size();
    double best_aic = std::numeric_limits<double>::infinity();
    std::vector<double> best_phi;
    bool any = false;
    for (std::size_t p = 1; p <= pmax; ++p) {
        std::vector<std::vector<double>> g(p, std::vector<double>(p, 0.0));
        std::vector<double> b(p, 0.0);
        for (std::size_t t = p; t < n; ++t) {
            for (std::size_t i = 0; i < p; ++i) {
                b[i] += c[t] * c[t - 1 - i];
                for (std::size_t j = i; j < p; ++j) g[i][j] += c[t - 1 - i] * c[t - 1 - j];
            }
        }
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = 0; j < i; ++j) g[i][j] = g[j][i];
        std::vector<double> phi = b;
        if (!solve_normal_equations(g, phi)) continue;
        double rss = 0.0;
        for (std::size_t t = p; t < n; ++t) {
            double pred = 0.0;
            for (std::size_t i = 0; i < p; ++i) pred += phi[i] * c[t - 1 - i];
            const double e = c[t] - pred;
            rss += e * e;
        }
        const double m = static_cast<double>(n - p);
        const double sigma2 = rss / m;
        if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) continue;
        const double aic = m * std::log(sigma2) + 2.0 * static_cast<double>(p + 1);
        any = true;
        if (aic < best_aic) {
            best_aic = aic;
            best_phi = phi;
        }
    }
    if (!any) throw FitError("autoregressive fit failed at every candidate order");
    const std::size_t p = best_phi.size();
    std::vector<double> resid;
    resid.reserve(n - p);
    double rbar = 0.0;
    for (std::size_t t = p; t < n; ++t) {
        double pred = 0.0;
        for (std::size_t i = 0; i < p; ++i) pred += best_phi[i] * c[t - 1 - i];
        resid.push_back(c[t] - pred);
        rbar += resid.back();
    }
    rbar /= static_cast<double>(resid.size());
    for (double& r : resid) r -= rbar;
    return ArFit{std::move(best_phi), std::move(resid)};
}

void sieve_path(const ArFit& fit, std::size_t n, Rng& rng, std::vector<double>& out) {
    const std::size_t p = fit.phi.size();
    const std::size_t m = fit.resid.size();
    std::vector<double> buf(kSieveBurn + n, 0.0);
    for (std::size_t t = 0; t < buf.size(); ++t) {
        double y = fit.resid[rng.next_below(static_cast<std::uint64_t>(m))];
        for (std::size_t i = 0; i < p && i < t; ++i) y += fit.phi[i] * buf[t - 1 - i];
        if (std::fabs(y) > kPathBlowup)
            throw FitError("resampled autoregression diverged");
        buf[t] = y;
    }
    out.assign(buf.begin() + static_cast<std::ptrdiff_t>(kSieveBurn), buf.end());
}

Interval percentile_interval(std::vector<double>& means, double alpha, const std::string& method) {
    std::sort(means.begin(), means.end());
    const double bd = static_cast<double>(means.size());
    std::size_t k1 = static_cast<std::size_t>(std::floor(bd * alpha / 2.0));
    if (k1 < 1) k1 = 1;
    std::size_t k2 = static_cast<std::size_t>(std::ceil(bd * (1.0 - alpha / 2.0)));
    if (k2 > means.size()) k2 = means.size();
    if (k2 < k1) k2 = k1;
    Interval iv;
    iv.lo = means[k1 - 1];
    iv.hi = means[k2 - 1];
    iv.alpha = alpha;
    iv.length = iv.hi - iv.lo;
    iv.method = method;
    return iv;
}

std::vector<double> centered_values(const Series& series, double& xbar) {
    xbar = mean(series.values);
    std::vector<double> c(series.values);
    for (double& v : c) v -= xbar;
    return c;
}

} // namespace

void BootstrapConfig::validate() const {
    if (B < 100) throw ParameterError("bootstrap replicate count must be at least 100");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
}

std::size_t BootstrapConfig::effective_pmax(std::size_t n) const {
    if (pmax > 0) return pmax;
    const double v = 10.0 * std::log10(static_cast<double>(n));
    return static_cast<std::size_t>(std::ceil(v - 1e-9));
}

std::size_t BootstrapConfig::effective_blocklen(std::size_t n) const {
    if (blocklen > 0) return blocklen;
    return static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n)) - 1e-9));
}

Interval sieve_ci(const Series& series, const BootstrapConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t n = series.size();
    const std::size_t pmax = cfg.effective_pmax(n);
    if (n <= 2 * pmax) throw ParameterError("series too short for the requested sieve order range");
    double xbar = 0.0;
    const std::vector<double> c = centered_values(series, xbar);
    const ArFit fit = fit_best_ar(c, pmax);
    std::vector<double> means;
    means.reserve(cfg.B);
    std::vector<double> path;
    for (std::size_t b = 0; b < cfg.B; ++b) {
        sieve_path(fit, n, rng, path);
        means.push_back(xbar + mean(path));
    }
    return percentile_interval(means, cfg.alpha, "sieve");
}

Interval filtered_sieve_ci(const Series& series, const BootstrapConfig& cfg, Rng& rng,
                           std::optional<double> d_override) {
    cfg.validate();
    const std::size_t n = series.size();
    const std::size_t pmax = cfg.effective_pmax(n);
    if (n <= 2 * pmax) throw ParameterError("series too short for the requested sieve order range");
    double dhat = 0.0;
    if (d_override) {
        dhat = *d_override;
    } else {
        dhat = estimate_memory(series).d_hat;
    }
    double xbar = 0.0;
    const std::vector<double> c = centered_values(series, xbar);
    std::vector<double> pi(n, 0.0);
    pi[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j)
        pi[j] = pi[j - 1] * (static_cast<double>(j) - 1.0 - dhat) / static_cast<double>(j);
    std::vector<double> u(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        for (std::size_t j = 0; j <= t; ++j) s += pi[j] * c[t - j];
        u[t] = s;
    }
    const double ubar = mean(u);
    for (double& v : u) v -= ubar;
    const ArFit fit = fit_best_ar(u, pmax);
    std::vector<double> psi(n, 0.0);
    psi[0] = 1.0;
    for (std::size_t j = 1; j < n; ++j)
        psi[j] = psi[j - 1] * (static_cast<double>(j) - 1.0 + dhat) / static_cast<double>(j);
    std::vector<double> means;
    means.reserve(cfg.B);
    std::vector<double> path;
    std::vector<double> z(n, 0.0);
    for (std::size_t b = 0; b < cfg.B; ++b) {
        sieve_path(fit, n, rng, path);
        double zsum = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            double s = 0.0;
            for (std::size_t j = 0; j <= t; ++j) s += psi[j] * path[t - j];
            z[t] = s;
            zsum += s;
        }
        means.push_back(xbar + zsum / static_cast<double>(n));
    }
    Interval iv = percentile_interval(means, cfg.alpha, "filtered_sieve");
    iv.d_used = dhat;
    return iv;
}

Interval block_ci(const Series& series, const BootstrapConfig& cfg, Rng& rng) {
    cfg.validate();
    const std::size_t n = series.size();
    const std::size_t ell = cfg.effective_blocklen(n);
    if (ell < 1 || ell > n) throw ParameterError("block length must lie in [1, n]");
    const std::size_t nblocks = (n + ell - 1) / ell;
    const std::size_t nstarts = n - ell + 1;
    std::vector<double> means;
    means.reserve(cfg.B);
    for (std::size_t b = 0; b < cfg.B; ++b) {
        double s = 0.0;
        std::size_t filled = 0;
        for (std::size_t k = 0; k < nblocks; ++k) {
            const std::size_t start =
                static_cast<std::size_t>(rng.next_below(static_cast<std::uint64_t>(nstarts)));
            const std::size_t take = std::min(ell, n - filled);
            for (std::size_t j = 0; j < take; ++j) s += series.values[start + j];
            filled += take;
        }
        means.push_back(s / static_cast<double>(n));
    }
    return percentile_interval(means, cfg.alpha, "block");
}

} // namespace randpivot
