#include "randpivot/harness.hpp"

#include "randpivot/bootstrap.hpp"
#include "randpivot/ci.hpp"
#include "randpivot/errors.hpp"
#include "randpivot/pivot.hpp"
#include "randpivot/rng.hpp"
#include "randpivot/stats.hpp"
#include "randpivot/window.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

namespace randpivot {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(const Clock::time_point& t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

enum class MethodTag : std::uint64_t { Randomized = 0, Classical, Sieve, AugSieve, Block };

MethodTag parse_method_tag(const std::string& s) {
    if (s == "randomized") return MethodTag::Randomized;
    if (s == "classical") return MethodTag::Classical;
    if (s == "sieve") return MethodTag::Sieve;
    if (s == "augsieve" || s == "filtered_sieve") return MethodTag::AugSieve;
    if (s == "block") return MethodTag::Block;
    throw ConfigError("unknown method tag: " + s);
}

std::string method_name(MethodTag t) {
    switch (t) {
    case MethodTag::Randomized: return "randomized";
    case MethodTag::Classical: return "classical";
    case MethodTag::Sieve: return "sieve";
    case MethodTag::AugSieve: return "augsieve";
    case MethodTag::Block: return "block";
    }
    return "?";
}

std::vector<MethodTag> parse_methods(const std::vector<std::string>& methods) {
    std::vector<MethodTag> tags;
    for (const auto& m : methods) {
        const MethodTag t = parse_method_tag(m);
        if (std::find(tags.begin(), tags.end(), t) == tags.end()) tags.push_back(t);
    }
    return tags;
}

std::size_t resolve_threads(std::size_t njobs) {
    std::size_t t = std::thread::hardware_concurrency();
    if (t == 0) t = 1;
    if (const char* env = std::getenv("RANDPIVOT_THREADS")) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) t = static_cast<std::size_t>(v);
    }
    return std::max<std::size_t>(1, std::min(t, njobs));
}

/// Runs body(0..count-1) across worker threads. Each index is processed by
/// exactly one worker and writes only to its own slots, so the result is the
/// same for any thread count.
void run_replications(std::size_t count, double max_seconds, const Clock::time_point& t0,
                      const std::function<void(std::size_t)>& body) {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::atomic<bool> over_budget{false};
    std::exception_ptr eptr = nullptr;
    std::mutex emu;
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count || stop.load()) break;
            if (max_seconds > 0.0 && elapsed_seconds(t0) > max_seconds) {
                over_budget.store(true);
                stop.store(true);
                break;
            }
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lk(emu);
                if (!eptr) eptr = std::current_exception();
                stop.store(true);
                break;
            }
        }
    };
    const std::size_t nthreads = resolve_threads(count);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nthreads);
        for (std::size_t k = 0; k < nthreads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (eptr) std::rethrow_exception(eptr);
    if (over_budget.load()) throw BudgetError("runtime budget exceeded");
}

std::string fmt_g6(double v) {
    if (!std::isfinite(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string fmt_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

struct RepCell {
    double length = 0.0;
    std::uint8_t flag = 0;
};

} // namespace

void ExperimentConfig::validate() const {
    spec.validate();
    if (n < 4) throw ConfigError("n must be at least 4");
    if (replications < 100) throw ConfigError("replications must be at least 100");
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (methods.empty()) throw ConfigError("methods must be non-empty");
    const std::vector<MethodTag> tags = parse_methods(methods);
    const bool wants_random =
        std::find(tags.begin(), tags.end(), MethodTag::Randomized) != tags.end();
    if (wants_random && !scheme) throw ConfigError("the randomized method needs a weight scheme");
    if (scheme) scheme->validate();
    if (wants_random && theta_mode == ThetaMode::Fixed && !std::isfinite(theta_fixed))
        throw ConfigError("fixed theta must be finite");
    if (bootstrap_B < 100) throw ConfigError("bootstrap replicate count must be at least 100");
}

double resolve_model_theta(const ProcessSpec& spec, const WeightScheme& scheme, std::size_t n) {
    const std::size_t K = spec.kind == ProcessKind::FID ? 100000 : 3000;
    const MomentStructure mom = theoretical_moments(spec, n - 1, n - 1, K);
    const auto coeffs = cubic_coefficients(mom, scheme, n);
    return solve_window_constant(coeffs, scheme, n).selected;
}

std::string CoverageReport::csv_header() {
    return "method,n,coverage,mean_length,median_length,discarded,seed";
}

std::string CoverageReport::to_csv() const {
    std::ostringstream os;
    os << csv_header() << '\n';
    for (const auto& r : rows) {
        os << r.method << ',' << r.n << ',' << fmt_fixed4(r.coverage) << ','
           << fmt_g6(r.mean_length) << ',' << fmt_g6(r.median_length) << ',' << r.discarded << ','
           << r.seed << '\n';
    }
    return os.str();
}

CoverageReport coverage_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = Clock::now();
    const std::size_t R = cfg.replications;
    const std::size_t n = cfg.n;
    const double d = cfg.spec.memory();
    const std::size_t q = cfg.q_override ? cfg.q_override : bandwidth(n, d, cfg.q_rule);
    const std::vector<MethodTag> tags = parse_methods(cfg.methods);
    const bool wants_random =
        std::find(tags.begin(), tags.end(), MethodTag::Randomized) != tags.end();

    double theta = std::numeric_limits<double>::quiet_NaN();
    if (wants_random) {
        if (cfg.theta_mode == ThetaMode::Model) theta = resolve_model_theta(cfg.spec, *cfg.scheme, n);
        if (cfg.theta_mode == ThetaMode::Fixed) theta = cfg.theta_fixed;
    }

    std::vector<std::vector<RepCell>> cells(tags.size(), std::vector<RepCell>(R));

    run_replications(R, cfg.max_seconds, t0, [&](std::size_t rep) {
        Rng drng = Rng::for_stream(cfg.seed, rep, StreamRole::Data, 0);
        Series series;
        try {
            series = simulate(cfg.spec, n, drng);
        } catch (const std::exception&) {
            return;
        }
        double theta_rep = theta;
        bool theta_ok = true;
        if (wants_random && cfg.theta_mode == ThetaMode::PlugIn) {
            try {
                const std::size_t H = std::min(n - 2, std::max<std::size_t>(q, 2));
                const std::size_t L = std::min<std::size_t>(q, H);
                const MomentStructure mom = plugin_moments(series, H, L);
                const auto coeffs = cubic_coefficients(mom, *cfg.scheme, n);
                theta_rep = solve_window_constant(coeffs, *cfg.scheme, n).selected;
            } catch (const std::exception&) {
                theta_ok = false;
            }
        }
        std::vector<double> w;
        bool weights_ok = true;
        if (wants_random) {
            Rng wrng = Rng::for_stream(cfg.seed, rep, StreamRole::Weights, 0);
            try {
                w = gen_weights(*cfg.scheme, n, wrng);
            } catch (const std::exception&) {
                weights_ok = false;
            }
        }
        for (std::size_t mi = 0; mi < tags.size(); ++mi) {
            RepCell& cell = cells[mi][rep];
            try {
                Interval iv;
                switch (tags[mi]) {
                case MethodTag::Randomized:
                    if (!theta_ok || !weights_ok)
                        throw EstimationError("window constant or weights unavailable");
                    iv = randomized_ci(series, w, theta_rep, cfg.alpha, d, q,
                                       cfg.complete_studentizer, *cfg.scheme);
                    break;
                case MethodTag::Classical:
                    iv = classical_ci(series, cfg.alpha, d, q);
                    break;
                case MethodTag::Sieve:
                case MethodTag::AugSieve:
                case MethodTag::Block: {
                    Rng brng = Rng::for_stream(cfg.seed, rep, StreamRole::Bootstrap,
                                               static_cast<std::uint64_t>(tags[mi]));
                    BootstrapConfig bc;
                    bc.B = cfg.bootstrap_B;
                    bc.alpha = cfg.alpha;
                    bc.pmax = cfg.bootstrap_pmax;
                    bc.blocklen = cfg.bootstrap_blocklen;
                    if (tags[mi] == MethodTag::Sieve) iv = sieve_ci(series, bc, brng);
                    else if (tags[mi] == MethodTag::AugSieve) iv = filtered_sieve_ci(series, bc, brng);
                    else iv = block_ci(series, bc, brng);
                    break;
                }
                }
                cell.flag = iv.covers(cfg.spec.mu) ? 2 : 1;
                cell.length = iv.length;
            } catch (const std::exception&) {
                cell.flag = 0;
            }
        }
    });

    CoverageReport report;
    report.theta_used = theta;
    report.q_used = q;
    for (std::size_t mi = 0; mi < tags.size(); ++mi) {
        std::size_t covered = 0;
        std::size_t discarded = 0;
        std::vector<double> lengths;
        lengths.reserve(R);
        for (std::size_t rep = 0; rep < R; ++rep) {
            const RepCell& cell = cells[mi][rep];
            if (cell.flag == 0) {
                ++discarded;
                continue;
            }
            if (cell.flag == 2) ++covered;
            lengths.push_back(cell.length);
        }
        MethodRow row;
        row.method = method_name(tags[mi]);
        row.n = n;
        row.coverage = static_cast<double>(covered) / static_cast<double>(R);
        row.mean_length =
            lengths.empty() ? std::numeric_limits<double>::quiet_NaN() : mean(lengths);
        row.median_length =
            lengths.empty() ? std::numeric_limits<double>::quiet_NaN() : median(lengths);
        row.discarded = discarded;
        row.seed = cfg.seed;
        report.rows.push_back(std::move(row));
    }
    std::ostringstream echo;
    echo << cfg.spec.to_config() << ' '
         << (cfg.scheme ? cfg.scheme->to_config() : std::string("scheme=none")) << " n=" << n
         << " replications=" << R << " alpha=" << cfg.alpha << " q=" << q << " theta="
         << (cfg.theta_mode == ThetaMode::PlugIn ? std::string("plugin") : fmt_g6(theta))
         << " seed=" << cfg.seed;
    report.config_echo = echo.str();
    report.wall_seconds = elapsed_seconds(t0);
    return report;
}

std::string ErrorCurve::to_csv() const {
    std::ostringstream os;
    os << "n,classical_error,randomized_error\n";
    for (std::size_t i = 0; i < grid.size(); ++i)
        os << grid[i] << ',' << fmt_g6(classical_error[i]) << ',' << fmt_g6(randomized_error[i])
           << '\n';
    return os.str();
}

ErrorCurve edgeworth_error_experiment(const EdgeworthConfig& cfg) {
    cfg.spec.validate();
    cfg.scheme.validate();
    if (cfg.grid.size() < 3) throw ConfigError("grid needs at least 3 sizes");
    for (std::size_t i = 1; i < cfg.grid.size(); ++i)
        if (cfg.grid[i] <= cfg.grid[i - 1]) throw ConfigError("grid must be strictly increasing");
    if (cfg.replications < 100000)
        throw ConfigError("error-curve estimation needs at least 100000 replications");
    if (cfg.spec.memory() != 0.0) throw ConfigError("error curves are for short-memory processes");

    const auto t0 = Clock::now();
    ErrorCurve curve;
    curve.grid = cfg.grid;
    for (const std::size_t n : cfg.grid) {
        const MomentStructure mom = theoretical_moments(cfg.spec, n - 1, n - 1, 3000);
        const auto coeffs = cubic_coefficients(mom, cfg.scheme, n);
        const double theta = solve_window_constant(coeffs, cfg.scheme, n).selected;
        double var_sum = static_cast<double>(n) * mom.gamma[0];
        for (std::size_t h = 1; h < n; ++h)
            var_sum += 2.0 * static_cast<double>(n - h) * mom.gamma[h];
        const double sd_cls = std::sqrt(var_sum);
        const double sd_rand = std::sqrt(randomized_variance(cfg.scheme, theta, mom.gamma, n));
        std::vector<double> t_cls(cfg.replications);
        std::vector<double> t_rand(cfg.replications);
        run_replications(cfg.replications, 0.0, t0, [&](std::size_t rep) {
            Rng drng = Rng::for_stream(cfg.seed, rep, StreamRole::Data, n);
            const Series series = simulate(cfg.spec, n, drng);
            Rng wrng = Rng::for_stream(cfg.seed, rep, StreamRole::Weights, n);
            const std::vector<double> w = gen_weights(cfg.scheme, n, wrng);
            double sx = 0.0;
            double swx = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double c = series.values[i] - cfg.spec.mu;
                sx += c;
                swx += (w[i] - theta) * c;
            }
            t_cls[rep] = sx / sd_cls;
            t_rand[rep] = swx / sd_rand;
        });
        curve.classical_error.push_back(sup_distance_to_normal(std::move(t_cls)));
        curve.randomized_error.push_back(sup_distance_to_normal(std::move(t_rand)));
        curve.theta_by_n.push_back(theta);
    }
    std::vector<double> lx;
    std::vector<double> ly_cls;
    std::vector<double> ly_rand;
    for (std::size_t i = 0; i < curve.grid.size(); ++i) {
        lx.push_back(std::log(static_cast<double>(curve.grid[i])));
        ly_cls.push_back(std::log(curve.classical_error[i]));
        ly_rand.push_back(std::log(curve.randomized_error[i]));
    }
    curve.classical_slope = ls_slope(lx, ly_cls);
    curve.randomized_slope = ls_slope(lx, ly_rand);
    return curve;
}

namespace {

struct ProcOpts {
    std::string process = "ar1";
    double phi = 0.8;
    double d = 0.4;
    std::vector<double> ma;
    std::string innovation = "lognormal";
    double mu = 0.0;

    ProcessSpec to_spec() const {
        ProcessSpec s;
        if (process == "white") {
            s.kind = ProcessKind::White;
        } else if (process == "ar1") {
            s.kind = ProcessKind::AR1;
            s.phi = phi;
        } else if (process == "fid") {
            s.kind = ProcessKind::FID;
            s.d = d;
        } else if (process == "ma") {
            s.kind = ProcessKind::MAfinite;
            s.ma = ma;
        } else {
            throw ConfigError("unknown process: " + process);
        }
        if (innovation == "normal") s.innovation = InnovationKind::StdNormal;
        else if (innovation == "lognormal") s.innovation = InnovationKind::StdLognormal;
        else throw ConfigError("unknown innovation law: " + innovation);
        s.mu = mu;
        s.validate();
        return s;
    }
};

void add_proc_opts(CLI::App* cmd, ProcOpts& o) {
    cmd->add_option("--process", o.process, "process kind: white, ar1, fid, ma");
    cmd->add_option("--phi", o.phi, "AR(1) coefficient");
    cmd->add_option("--d", o.d, "memory parameter for fid");
    cmd->add_option("--ma", o.ma, "MA coefficients, comma separated")->delimiter(',');
    cmd->add_option("--innovation", o.innovation, "innovation law: normal, lognormal");
    cmd->add_option("--mu", o.mu, "process mean");
}

struct SchemeOpts {
    std::string scheme = "bernoulli";
    double p = 0.25;

    WeightScheme to_scheme() const {
        if (scheme == "bernoulli") return WeightScheme::bernoulli(p);
        if (scheme == "multinomial") return WeightScheme::multinomial();
        throw ConfigError("unknown weight scheme: " + scheme);
    }
};

void add_scheme_opts(CLI::App* cmd, SchemeOpts& o) {
    cmd->add_option("--scheme", o.scheme, "weight scheme: bernoulli, multinomial");
    cmd->add_option("--p", o.p, "Bernoulli success probability");
}

void emit_text(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot open output file: " + path);
    f << text;
}

Series load_series(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open input file: " + path);
    return read_series_csv(f);
}

BandwidthRegime pick_regime(const std::string& rule, double d) {
    if (rule == "short") return BandwidthRegime::ShortMemoryRule;
    if (rule == "long") return BandwidthRegime::LongMemoryRule;
    if (rule == "auto")
        return d > 0.0 ? BandwidthRegime::LongMemoryRule : BandwidthRegime::ShortMemoryRule;
    throw ConfigError("unknown bandwidth rule: " + rule);
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"randomized confidence intervals for the mean of linear processes"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from a key=value file");

    auto* sim = app.add_subcommand("simulate", "simulate a linear process and write it as CSV");
    sim->fallthrough();
    ProcOpts sim_proc;
    add_proc_opts(sim, sim_proc);
    std::size_t sim_n = 200;
    std::uint64_t sim_seed = kDefaultSeed;
    std::string sim_out;
    sim->add_option("--n", sim_n, "series length");
    sim->add_option("--seed", sim_seed, "seed");
    sim->add_option("--out", sim_out, "output file (default: stdout)");
    sim->callback([&]() {
        const ProcessSpec spec = sim_proc.to_spec();
        const Series series = simulate(spec, sim_n, sim_seed);
        std::ostringstream os;
        write_series_csv(series, os);
        emit_text(os.str(), sim_out, out);
    });

    auto* win = app.add_subcommand("window", "solve for the window constant of the weighted sum");
    win->fallthrough();
    ProcOpts win_proc;
    SchemeOpts win_scheme;
    add_proc_opts(win, win_proc);
    add_scheme_opts(win, win_scheme);
    std::size_t win_n = 200;
    std::string win_in;
    std::size_t win_h = 0;
    std::size_t win_l = 0;
    std::size_t win_k = 0;
    std::string win_policy = "max";
    double win_fixed = 0.0;
    win->add_option("--n", win_n, "series length (model mode)");
    win->add_option("--in", win_in, "series CSV; switches to plug-in moments");
    win->add_option("--H", win_h, "plug-in autocovariance horizon (0 = auto)");
    win->add_option("--L", win_l, "plug-in third-moment lag cap (0 = auto)");
    win->add_option("--K", win_k, "model MA truncation (0 = auto)");
    win->add_option("--policy", win_policy, "root selection: max, nearest, fixed");
    win->add_option("--fixed-theta", win_fixed, "window constant for --policy fixed");
    win->callback([&]() {
        const WeightScheme scheme = win_scheme.to_scheme();
        SelectionPolicy policy = SelectionPolicy::MaxDistanceFromMean;
        if (win_policy == "nearest") policy = SelectionPolicy::NearestToMean;
        else if (win_policy == "fixed") policy = SelectionPolicy::UserFixed;
        else if (win_policy != "max") throw ConfigError("unknown policy: " + win_policy);
        MomentStructure mom;
        std::size_t n = win_n;
        if (win_in.empty()) {
            const ProcessSpec spec = win_proc.to_spec();
            std::size_t K = win_k;
            if (K == 0) K = spec.kind == ProcessKind::FID ? 100000 : 3000;
            mom = theoretical_moments(spec, n - 1, n - 1, K);
        } else {
            const Series series = load_series(win_in);
            n = series.size();
            if (n < 4) throw ConfigError("series too short");
            std::size_t H = win_h ? win_h : n - 2;
            std::size_t L = win_l ? win_l : std::min(bandwidth(n, 0.0, BandwidthRegime::ShortMemoryRule), H);
            mom = plugin_moments(series, H, L);
        }
        const auto coeffs = cubic_coefficients(mom, scheme, n);
        WindowSolution sol = solve_window_constant(coeffs, scheme, n, policy, win_fixed);
        sol.mode = mom.source;
        out << sol.to_json() << '\n';
    });

    auto* civ = app.add_subcommand("ci", "confidence intervals for the mean of a stored series");
    civ->fallthrough();
    SchemeOpts ci_scheme;
    add_scheme_opts(civ, ci_scheme);
    std::string ci_in;
    std::vector<std::string> ci_methods{"randomized", "classical"};
    double ci_alpha = 0.05;
    double ci_d = 0.0;
    bool ci_estimate_d = false;
    std::size_t ci_q = 0;
    std::string ci_qrule = "auto";
    std::string ci_theta_mode = "plugin";
    double ci_theta = 0.0;
    bool ci_complete = false;
    std::uint64_t ci_seed = kDefaultSeed;
    std::size_t ci_b = 1000;
    double ci_mu = 0.0;
    bool ci_have_mu = false;
    std::string ci_out;
    civ->add_option("--in", ci_in, "series CSV")->required();
    civ->add_option("--methods", ci_methods, "comma-separated method list")->delimiter(',');
    civ->add_option("--alpha", ci_alpha, "nominal level complement");
    civ->add_option("--d", ci_d, "memory parameter");
    civ->add_flag("--estimate-d", ci_estimate_d, "estimate the memory parameter from the data");
    civ->add_option("--q", ci_q, "bandwidth override (0 = rule)");
    civ->add_option("--q-rule", ci_qrule, "bandwidth rule: auto, short, long");
    civ->add_option("--theta-mode", ci_theta_mode, "window constant source: plugin, fixed");
    civ->add_option("--theta", ci_theta, "window constant for --theta-mode fixed");
    civ->add_flag("--complete", ci_complete, "use the complete studentizer");
    civ->add_option("--seed", ci_seed, "seed for the weight draw");
    civ->add_option("--bootstrap-B", ci_b, "bootstrap replicates");
    civ->add_option("--mu", ci_mu, "true mean; adds the covered column");
    civ->add_option("--out", ci_out, "output file (default: stdout)");
    civ->callback([&]() {
        ci_have_mu = civ->count("--mu") > 0;
        const Series series = load_series(ci_in);
        const std::size_t n = series.size();
        if (n < 4) throw ConfigError("series too short");
        double d = ci_d;
        if (ci_estimate_d) d = estimate_memory(series).d_hat;
        const std::size_t q = ci_q ? ci_q : bandwidth(n, d, pick_regime(ci_qrule, d));
        const std::vector<MethodTag> tags = parse_methods(ci_methods);
        const WeightScheme scheme = ci_scheme.to_scheme();
        std::ostringstream os;
        os << "method,lo,hi,length,covered\n";
        for (const MethodTag tag : tags) {
            Interval iv;
            switch (tag) {
            case MethodTag::Randomized: {
                double theta = ci_theta;
                if (ci_theta_mode == "plugin") {
                    const std::size_t H = std::min(n - 2, std::max<std::size_t>(q, 2));
                    const std::size_t L = std::min<std::size_t>(q, H);
                    const MomentStructure mom = plugin_moments(series, H, L);
                    const auto coeffs = cubic_coefficients(mom, scheme, n);
                    theta = solve_window_constant(coeffs, scheme, n).selected;
                } else if (ci_theta_mode != "fixed") {
                    throw ConfigError("unknown theta mode: " + ci_theta_mode);
                }
                Rng wrng = Rng::for_stream(ci_seed, 0, StreamRole::Weights, 0);
                const std::vector<double> w = gen_weights(scheme, n, wrng);
                iv = randomized_ci(series, w, theta, ci_alpha, d, q, ci_complete, scheme);
                break;
            }
            case MethodTag::Classical:
                iv = classical_ci(series, ci_alpha, d, q);
                break;
            case MethodTag::Sieve: {
                Rng brng = Rng::for_stream(ci_seed, 0, StreamRole::Bootstrap,
                                           static_cast<std::uint64_t>(tag));
                BootstrapConfig bc;
                bc.B = ci_b;
                bc.alpha = ci_alpha;
                iv = sieve_ci(series, bc, brng);
                break;
            }
            case MethodTag::AugSieve: {
                Rng brng = Rng::for_stream(ci_seed, 0, StreamRole::Bootstrap,
                                           static_cast<std::uint64_t>(tag));
                BootstrapConfig bc;
                bc.B = ci_b;
                bc.alpha = ci_alpha;
                iv = filtered_sieve_ci(series, bc, brng);
                break;
            }
            case MethodTag::Block: {
                Rng brng = Rng::for_stream(ci_seed, 0, StreamRole::Bootstrap,
                                           static_cast<std::uint64_t>(tag));
                BootstrapConfig bc;
                bc.B = ci_b;
                bc.alpha = ci_alpha;
                iv = block_ci(series, bc, brng);
                break;
            }
            }
            os << iv.to_csv_row(ci_mu, ci_have_mu) << '\n';
        }
        emit_text(os.str(), ci_out, out);
    });

    auto* cov = app.add_subcommand("coverage", "Monte Carlo coverage experiment");
    cov->fallthrough();
    ProcOpts cov_proc;
    SchemeOpts cov_scheme;
    add_proc_opts(cov, cov_proc);
    add_scheme_opts(cov, cov_scheme);
    std::size_t cov_n = 200;
    std::size_t cov_reps = 2000;
    double cov_alpha = 0.05;
    std::vector<std::string> cov_methods{"randomized", "classical"};
    std::uint64_t cov_seed = kDefaultSeed;
    std::size_t cov_q = 0;
    std::string cov_qrule = "auto";
    std::string cov_theta_mode;
    double cov_theta = 0.0;
    bool cov_complete = false;
    std::size_t cov_b = 1000;
    std::size_t cov_pmax = 0;
    std::size_t cov_blocklen = 0;
    double cov_budget = 0.0;
    std::string cov_out;
    cov->add_option("--n", cov_n, "series length");
    cov->add_option("--replications", cov_reps, "Monte Carlo replications");
    cov->add_option("--alpha", cov_alpha, "nominal level complement");
    cov->add_option("--methods", cov_methods, "comma-separated method list")->delimiter(',');
    cov->add_option("--seed", cov_seed, "master seed");
    cov->add_option("--q", cov_q, "bandwidth override (0 = rule)");
    cov->add_option("--q-rule", cov_qrule, "bandwidth rule: auto, short, long");
    cov->add_option("--theta-mode", cov_theta_mode, "window constant source: model, plugin, fixed");
    cov->add_option("--theta", cov_theta, "window constant; implies fixed mode");
    cov->add_flag("--complete", cov_complete, "use the complete studentizer");
    cov->add_option("--bootstrap-B", cov_b, "bootstrap replicates");
    cov->add_option("--pmax", cov_pmax, "sieve AIC order cap (0 = rule)");
    cov->add_option("--blocklen", cov_blocklen, "block length (0 = rule)");
    cov->add_option("--max-seconds", cov_budget, "runtime budget in seconds");
    cov->add_option("--out", cov_out, "output file (default: stdout)");
    cov->callback([&]() {
        ExperimentConfig cfg;
        cfg.spec = cov_proc.to_spec();
        cfg.scheme = cov_scheme.to_scheme();
        cfg.n = cov_n;
        cfg.replications = cov_reps;
        cfg.alpha = cov_alpha;
        cfg.methods = cov_methods;
        cfg.seed = cov_seed;
        cfg.q_override = cov_q;
        cfg.q_rule = pick_regime(cov_qrule, cfg.spec.memory());
        const bool theta_given = cov->count("--theta") > 0;
        if (cov_theta_mode.empty()) {
            cfg.theta_mode = theta_given ? ThetaMode::Fixed : ThetaMode::Model;
        } else if (cov_theta_mode == "model") {
            if (theta_given) throw ConfigError("--theta contradicts --theta-mode model");
            cfg.theta_mode = ThetaMode::Model;
        } else if (cov_theta_mode == "plugin") {
            if (theta_given) throw ConfigError("--theta contradicts --theta-mode plugin");
            cfg.theta_mode = ThetaMode::PlugIn;
        } else if (cov_theta_mode == "fixed") {
            if (!theta_given) throw ConfigError("--theta-mode fixed needs --theta");
            cfg.theta_mode = ThetaMode::Fixed;
        } else {
            throw ConfigError("unknown theta mode: " + cov_theta_mode);
        }
        cfg.theta_fixed = cov_theta;
        cfg.complete_studentizer = cov_complete;
        cfg.bootstrap_B = cov_b;
        cfg.bootstrap_pmax = cov_pmax;
        cfg.bootstrap_blocklen = cov_blocklen;
        cfg.max_seconds = cov_budget;
        const CoverageReport report = coverage_experiment(cfg);
        emit_text(report.to_csv(), cov_out, out);
    });

    auto* edge = app.add_subcommand("edgeworth", "sup-CDF error curves for both pivots");
    edge->fallthrough();
    ProcOpts edge_proc;
    SchemeOpts edge_scheme;
    add_proc_opts(edge, edge_proc);
    add_scheme_opts(edge, edge_scheme);
    std::vector<std::size_t> edge_grid{100, 400, 1600};
    std::size_t edge_reps = 100000;
    std::uint64_t edge_seed = kDefaultSeed;
    std::string edge_out;
    edge->add_option("--grid", edge_grid, "comma-separated series lengths")->delimiter(',');
    edge->add_option("--replications", edge_reps, "Monte Carlo replications per size");
    edge->add_option("--seed", edge_seed, "master seed");
    edge->add_option("--out", edge_out, "output file (default: stdout)");
    edge->callback([&]() {
        EdgeworthConfig cfg;
        cfg.spec = edge_proc.to_spec();
        cfg.scheme = edge_scheme.to_scheme();
        cfg.grid = edge_grid;
        cfg.replications = edge_reps;
        cfg.seed = edge_seed;
        const ErrorCurve curve = edgeworth_error_experiment(cfg);
        emit_text(curve.to_csv(), edge_out, out);
        err << "classical_slope=" << fmt_g6(curve.classical_slope)
            << " randomized_slope=" << fmt_g6(curve.randomized_slope) << '\n';
    });

    auto* tab = app.add_subcommand("table", "bundled simulation-study presets");
    tab->fallthrough();
    int tab_k = 0;
    std::size_t tab_reps = 2000;
    std::uint64_t tab_seed = kDefaultSeed;
    std::vector<double> tab_thetas;
    std::size_t tab_b = 1000;
    double tab_budget = 0.0;
    std::string tab_out;
    tab->add_option("k", tab_k, "preset number: 1, 2, 3")->required()->check(CLI::Range(1, 3));
    tab->add_option("--replications", tab_reps, "Monte Carlo replications");
    tab->add_option("--seed", tab_seed, "master seed");
    tab->add_option("--theta", tab_thetas,
                    "fixed window constants, one per row or a single shared value")
        ->delimiter(',');
    tab->add_option("--bootstrap-B", tab_b, "bootstrap replicates");
    tab->add_option("--max-seconds", tab_budget, "runtime budget in seconds");
    tab->add_option("--out", tab_out, "output file (default: stdout)");
    tab->callback([&]() {
        const std::vector<std::size_t> ns =
            tab_k == 3 ? std::vector<std::size_t>{100, 200} : std::vector<std::size_t>{200, 400};
        ProcessSpec spec;
        spec.innovation = InnovationKind::StdLognormal;
        if (tab_k == 3) {
            spec.kind = ProcessKind::FID;
            spec.d = 0.4;
        } else {
            spec.kind = ProcessKind::AR1;
            spec.phi = 0.8;
        }
        const WeightScheme scheme =
            tab_k == 1 ? WeightScheme::bernoulli(0.25) : WeightScheme::multinomial();
        const std::vector<std::string> methods =
            tab_k == 3 ? std::vector<std::string>{"randomized", "classical", "block", "augsieve",
                                                  "sieve"}
                       : std::vector<std::string>{"randomized", "classical"};
        if (!tab_thetas.empty() && tab_thetas.size() != 1 && tab_thetas.size() != ns.size())
            throw ConfigError("--theta needs one value or one per row");
        CoverageReport combined;
        const auto t0 = Clock::now();
        for (std::size_t i = 0; i < ns.size(); ++i) {
            ExperimentConfig cfg;
            cfg.spec = spec;
            cfg.scheme = scheme;
            cfg.n = ns[i];
            cfg.replications = tab_reps;
            cfg.alpha = 0.05;
            cfg.methods = methods;
            cfg.seed = tab_seed;
            cfg.q_rule = tab_k == 3 ? BandwidthRegime::LongMemoryRule
                                    : BandwidthRegime::ShortMemoryRule;
            if (!tab_thetas.empty()) {
                cfg.theta_mode = ThetaMode::Fixed;
                cfg.theta_fixed = tab_thetas.size() == 1 ? tab_thetas[0] : tab_thetas[i];
            }
            cfg.bootstrap_B = tab_b;
            if (tab_budget > 0.0) {
                const double left = tab_budget - elapsed_seconds(t0);
                if (left <= 0.0) throw BudgetError("runtime budget exceeded");
                cfg.max_seconds = left;
            }
            CoverageReport report = coverage_experiment(cfg);
            for (auto& row : report.rows) combined.rows.push_back(std::move(row));
            combined.wall_seconds = elapsed_seconds(t0);
        }
        emit_text(combined.to_csv(), tab_out, out);
    });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        while (!target->get_subcommands().empty()) target = target->get_subcommands().front();
        out << target->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return 2;
    } catch (const BudgetError& e) {
        err << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return 2;
    }
    return 0;
}

} // namespace randpivot
