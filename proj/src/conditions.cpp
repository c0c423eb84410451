#include "ulil/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ulil/compensated.hpp"
#include "ulil/errors.hpp"
#include "ulil/format.hpp"
#include "ulil/rng.hpp"

namespace ulil {

double iterated_log(double x) { return std::max(std::log(x), 1.0); }

double iterated_log2(double x) { return iterated_log(iterated_log(x)); }

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi > lo) || points < 2)
        throw_bad_argument("geometric_grid: need 0 < lo < hi and at least two points");
    std::vector<double> g(points);
    double step = std::log(hi / lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) g[i] = lo * std::exp(step * static_cast<double>(i));
    g.front() = lo;
    g.back() = hi;
    return g;
}

namespace {

constexpr std::uint64_t kStreamX = 0;
constexpr std::uint64_t kStreamY = 1;

void check_u_grid(std::span<const double> u_grid) {
    if (u_grid.size() < 2) throw_bad_argument("u grid needs at least two points");
    double prev = 0.0;
    for (double u : u_grid) {
        if (!(u >= 10.0)) throw_bad_argument("u grid must start at 10 or above");
        if (!(u > prev)) throw_bad_argument("u grid must be strictly increasing");
        prev = u;
    }
}

double tail_third_max(const std::vector<double>& ratio) {
    std::size_t n = ratio.size();
    std::size_t start = n - (n + 2) / 3;  // last ceil(n/3) points
    double best = 0.0;
    for (std::size_t i = start; i < n; ++i) best = std::max(best, ratio[i]);
    return best;
}

}  // namespace

TruncatedMomentCurve truncated_moment_curve(const Kernel& kernel, const Distribution& dist,
                                            std::span<const double> u_grid,
                                            std::size_t mc_samples, std::uint64_t seed) {
    check_u_grid(u_grid);
    TruncatedMomentCurve out;
    out.u.assign(u_grid.begin(), u_grid.end());
    const std::size_t gn = out.u.size();
    out.values.assign(gn, 0.0);
    out.se.assign(gn, 0.0);
    out.ratio.assign(gn, 0.0);

    const auto& curve = kernel.analytic().second_moment_curve;
    if (curve && kernel.analytic_matches(dist)) {
        out.analytic = true;
        for (std::size_t i = 0; i < gn; ++i) out.values[i] = curve(out.u[i]);
    } else {
        if (mc_samples < 1000)
            throw_bad_argument("truncated_moment_curve: Monte Carlo mode needs mc_samples >= 1000");
        // One shared sample of h^2 for every u keeps the curve monotone.
        std::vector<double> h2(mc_samples);
        for (std::size_t s = 0; s < mc_samples; ++s) {
            double x = dist.sample(seed, kStreamX, s);
            double y = dist.sample(seed, kStreamY, s);
            double h = kernel(x, y);
            if (!std::isfinite(h)) throw_numeric("truncated_moment_curve: non-finite kernel value");
            h2[s] = h * h;
        }
        for (std::size_t i = 0; i < gn; ++i) {
            CompensatedSum mean, sq;
            for (double v : h2) {
                double m = std::min(v, out.u[i]);
                mean += m;
                sq += m * m;
            }
            double mu = mean.value() / static_cast<double>(mc_samples);
            double var = std::max(sq.value() / static_cast<double>(mc_samples) - mu * mu, 0.0);
            out.values[i] = mu;
            out.se[i] = std::sqrt(var / static_cast<double>(mc_samples));
        }
    }
    for (std::size_t i = 0; i < gn; ++i) out.ratio[i] = out.values[i] / iterated_log2(out.u[i]);
    out.limsup_estimate = tail_third_max(out.ratio);
    return out;
}

namespace {

ChaosMatrix sample_kernel_matrix(const Kernel& kernel, const Distribution& dist, std::size_t m,
                                 std::uint64_t seed) {
    std::vector<double> xs = dist.sample_stream(seed, kStreamX, m);
    std::vector<double> ys = dist.sample_stream(seed, kStreamY, m);
    ChaosMatrix mat(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            double h = kernel(xs[i], ys[j]);
            if (!std::isfinite(h)) throw_numeric("operator_norm: non-finite kernel value");
            mat.at(i, j) = h;
        }
    return mat;
}

double percentile(std::vector<double> sorted_values, double p) {
    std::sort(sorted_values.begin(), sorted_values.end());
    double pos = p * static_cast<double>(sorted_values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, sorted_values.size() - 1);
    double w = pos - static_cast<double>(lo);
    return (1.0 - w) * sorted_values[lo] + w * sorted_values[hi];
}

}  // namespace

OperatorNormEstimate operator_norm_empirical(const Kernel& kernel, const Distribution& dist,
                                             std::size_t m, std::uint64_t seed,
                                             int bootstrap_resamples) {
    if (m < 50) throw_bad_argument("operator_norm: m must be at least 50");
    ChaosMatrix mat = sample_kernel_matrix(kernel, dist, m, seed);
    OperatorNormEstimate out;
    out.method = OperatorNormMethod::svd_empirical;
    out.sample_m = m;
    out.value = power_iteration_sigma_max(mat, 1e-8, 10000, seed ^ 0x9E37u) /
                static_cast<double>(m);
    out.bootstrap_resamples = bootstrap_resamples;
    if (bootstrap_resamples > 0) {
        std::vector<double> boot(static_cast<std::size_t>(bootstrap_resamples));
        ChaosMatrix rs(m, m);
        std::vector<std::size_t> ri(m), rj(m);
        for (int b = 0; b < bootstrap_resamples; ++b) {
            for (std::size_t i = 0; i < m; ++i) {
                ri[i] = static_cast<std::size_t>(rng::mix(seed, 20 + b, i) % m);
                rj[i] = static_cast<std::size_t>(rng::mix(seed, 200 + b, i) % m);
            }
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < m; ++j) rs.at(i, j) = mat.at(ri[i], rj[j]);
            boot[static_cast<std::size_t>(b)] =
                power_iteration_sigma_max(rs, 1e-8, 10000, seed ^ 0x9E37u) /
                static_cast<double>(m);
        }
        // sigma_max is nonsmooth, so the CI comes from resampling rather
        // than an asymptotic formula; widen to include the point estimate.
        out.lo = std::min(percentile(boot, 0.025), out.value);
        out.hi = std::max(percentile(boot, 0.975), out.value);
    } else {
        out.lo = out.hi = out.value;
    }
    return out;
}

OperatorNormEstimate operator_norm(const Kernel& kernel, const Distribution& dist, std::size_t m,
                                   std::uint64_t seed) {
    if (kernel.analytic().operator_norm && kernel.analytic_matches(dist)) {
        OperatorNormEstimate out;
        out.method = OperatorNormMethod::analytic;
        out.value = out.lo = out.hi = *kernel.analytic().operator_norm;
        return out;
    }
    return operator_norm_empirical(kernel, dist, m, seed);
}

SchurBound schur_bound(const Kernel& kernel, const Distribution& dist, std::size_t probe_m,
                       std::uint64_t seed) {
    if (probe_m < 100) throw_bad_argument("schur_bound: probe_m must be at least 100");
    SchurBound out;
    // Probe points at law quantiles; row/column mean absolute values by
    // Monte Carlo against a fresh sample on the opposite coordinate.
    std::size_t probes = std::min<std::size_t>(64, probe_m);
    std::vector<double> sample = dist.sample_stream(seed, kStreamY, probe_m);
    double s1 = 0.0, s2 = 0.0;
    for (std::size_t p = 0; p < probes; ++p) {
        double q = dist.quantile((static_cast<double>(p) + 0.5) / static_cast<double>(probes));
        CompensatedSum row, col;
        for (double s : sample) {
            row += std::abs(kernel(q, s));
            col += std::abs(kernel(s, q));
        }
        s1 = std::max(s1, row.value() / static_cast<double>(probe_m));
        s2 = std::max(s2, col.value() / static_cast<double>(probe_m));
    }
    out.s1 = s1;
    out.s2 = s2;
    out.bound = std::sqrt(s1 * s2);
    out.estimate_only = true;
    return out;
}

TruncationProfile truncation_profile(const Kernel& kernel, const Distribution& dist, int n_lo,
                                     int n_hi, std::span<const double> probes,
                                     std::size_t mc_samples, std::uint64_t seed) {
    if (n_lo < 1 || n_hi > 64 || n_lo > n_hi)
        throw_bad_argument("truncation_profile: level range must lie within [1, 64]");
    if (probes.empty()) throw_bad_argument("truncation_profile: need at least one probe point");

    TruncationProfile out;
    out.probes.assign(probes.begin(), probes.end());
    for (int n = n_lo; n <= n_hi; ++n) out.n.push_back(n);
    const std::size_t levels = out.n.size();
    out.f.assign(levels, std::vector<double>(probes.size(), 0.0));
    out.g.assign(levels, std::vector<double>(probes.size(), 0.0));
    out.c.assign(levels, 0.0);

    const auto* block = kernel.block().get();
    if (block && dist.family() == DistFamily::uniform01) {
        out.analytic = true;
        for (std::size_t li = 0; li < levels; ++li) {
            int n = out.n[li];
            double cap = std::ldexp(1.0, 4 * n);          // 2^(4n)
            double gcut = std::ldexp(1.0, n) * double(n) * double(n);  // 2^n n^2
            double clow = std::ldexp(1.0, n) / (double(n) * double(n));
            for (std::size_t pi = 0; pi < probes.size(); ++pi) {
                double x = probes[pi];
                std::size_t bi = block->locate(x);
                if (bi == BlockKernelSpec::npos) continue;
                double peak = block->a()[bi] / block->b()[bi];
                out.f[li][pi] = std::min(peak * peak, cap) * block->b()[bi];
                // E_Y h 1{|h| >= s} vanishes: the indicator is symmetric in
                // the sign of I(y) and I integrates to zero.
                out.g[li][pi] = 0.0;
            }
            CompensatedSum cn;
            for (std::size_t bi = 0; bi < block->block_count(); ++bi) {
                double peak = std::abs(block->a()[bi]) / block->b()[bi];
                if (peak > clow && peak <= gcut) cn += block->a()[bi] * block->a()[bi];
            }
            out.c[li] = cn.value();
        }
        return out;
    }

    if (mc_samples < 1000)
        throw_bad_argument("truncation_profile: Monte Carlo mode needs mc_samples >= 1000");
    std::vector<double> ys = dist.sample_stream(seed, kStreamY, mc_samples);
    std::vector<double> xs = dist.sample_stream(seed, kStreamX, mc_samples);
    for (std::size_t li = 0; li < levels; ++li) {
        int n = out.n[li];
        double cap = std::ldexp(1.0, 4 * n);
        double gcut = std::ldexp(1.0, n) * double(n) * double(n);
        double clow = std::ldexp(1.0, n) / (double(n) * double(n));
        for (std::size_t pi = 0; pi < probes.size(); ++pi) {
            CompensatedSum f_acc, g_acc;
            for (double y : ys) {
                double h = kernel(probes[pi], y);
                f_acc += std::min(h * h, cap);
                if (std::abs(h) >= gcut) g_acc += h;
            }
            out.f[li][pi] = f_acc.value() / static_cast<double>(mc_samples);
            out.g[li][pi] = g_acc.value() / static_cast<double>(mc_samples);
        }
        CompensatedSum c_acc;
        for (std::size_t s = 0; s < mc_samples; ++s) {
            double h = kernel(xs[s], ys[s]);
            double ah = std::abs(h);
            if (ah > clow && ah <= gcut) c_acc += h * h;
        }
        out.c[li] = c_acc.value() / static_cast<double>(mc_samples);
    }
    return out;
}

std::string ConditionReport::to_text() const {
    std::ostringstream os;
    os << "kernel = " << kernel_name << "\n";
    os << "dist = " << dist_name << "\n";
    os << "canonical.status = " << (canonical == ConditionStatus::pass ? "pass" : "fail") << "\n";
    os << "canonical.certified = " << (canonical_certified ? "true" : "false") << "\n";
    os << "canonical.max_abs = " << format_double(canonical_max_abs) << "\n";
    os << "canonical.threshold = " << format_double(canonical_threshold) << "\n";
    os << "cond_b.limsup = " << format_double(cond_b_limsup) << "\n";
    os << "cond_b.certified = " << (cond_b_certified ? "true" : "false") << "\n";
    os << "cond_b.grid_top = " << format_double(cond_b_grid_top) << "\n";
    os << "cond_c.value = " << format_double(cond_c_value) << "\n";
    os << "cond_c.method = "
       << (cond_c_method == OperatorNormMethod::analytic
               ? "analytic"
               : (cond_c_method == OperatorNormMethod::svd_empirical ? "svd_empirical"
                                                                     : "schur_bound"))
       << "\n";
    os << "cond_c.ci_lo = " << format_double(cond_c_lo) << "\n";
    os << "cond_c.ci_hi = " << format_double(cond_c_hi) << "\n";
    os << "schur.upper = " << format_double(schur_upper) << "\n";
    return os.str();
}

ConditionReport certify(const Kernel& kernel, const Distribution& dist,
                        const CertifyConfig& config) {
    ConditionReport report;
    report.kernel_name = kernel.name();
    report.dist_name = dist.name();

    // Canonicality: |E_X h(X, y)| at law quantile probes, against a
    // 4-standard-error threshold (exact when the conditional mean has a
    // closed form).
    const auto& cm = kernel.analytic().cond_mean;
    bool analytic_canonical = static_cast<bool>(cm) && kernel.analytic_matches(dist);
    double worst = 0.0, worst_threshold = 0.0;
    bool pass = true;
    for (std::size_t p = 0; p < config.probe_count; ++p) {
        double y = dist.quantile((static_cast<double>(p) + 0.5) /
                                 static_cast<double>(config.probe_count));
        if (analytic_canonical) {
            double v = std::abs(cm(y));
            if (v > worst) { worst = v; worst_threshold = 1e-12; }
            if (v > 1e-12) pass = false;
        } else {
            CompensatedSum mean, sq;
            for (std::size_t s = 0; s < config.mc_samples; ++s) {
                double h = kernel(dist.sample(config.seed, kStreamX, s), y);
                mean += h;
                sq += h * h;
            }
            double mu = mean.value() / static_cast<double>(config.mc_samples);
            double var =
                std::max(sq.value() / static_cast<double>(config.mc_samples) - mu * mu, 0.0);
            double se = std::sqrt(var / static_cast<double>(config.mc_samples));
            double threshold = 4.0 * se + 1e-15;
            if (std::abs(mu) > worst) { worst = std::abs(mu); worst_threshold = threshold; }
            if (std::abs(mu) > threshold) pass = false;
        }
    }
    report.canonical = pass ? ConditionStatus::pass : ConditionStatus::fail;
    report.canonical_certified = analytic_canonical;
    report.canonical_max_abs = worst;
    report.canonical_threshold = worst_threshold;

    // Condition on the truncated second moment.
    bool analytic_curve = static_cast<bool>(kernel.analytic().second_moment_curve) &&
                          kernel.analytic_matches(dist);
    double top = analytic_curve ? 1e300 : 1e12;
    std::vector<double> grid = geometric_grid(10.0, top, config.curve_points);
    TruncatedMomentCurve curve =
        truncated_moment_curve(kernel, dist, grid, std::max<std::size_t>(config.mc_samples, 1000),
                               config.seed + 1);
    report.cond_b_limsup = curve.limsup_estimate;
    report.cond_b_certified = curve.analytic;
    report.cond_b_grid_top = top;

    // Condition on the bilinear-form norm.
    OperatorNormEstimate on = operator_norm(kernel, dist, config.operator_m, config.seed + 2);
    report.cond_c_value = on.value;
    report.cond_c_method = on.method;
    report.cond_c_lo = on.lo;
    report.cond_c_hi = on.hi;

    report.schur_upper = schur_bound(kernel, dist, std::max<std::size_t>(100, config.mc_samples / 10),
                                     config.seed + 3)
                             .bound;
    return report;
}

}  // namespace ulil
