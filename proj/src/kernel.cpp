#include "ulil/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "ulil/errors.hpp"

namespace ulil {

BlockKernelSpec::BlockKernelSpec(std::vector<double> a, std::vector<double> b)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.empty() || a_.size() != b_.size())
        throw_bad_argument("block kernel: a and b must be nonempty and equal length");
    double total = 0.0;
    for (std::size_t n = 0; n < a_.size(); ++n) {
        if (!std::isfinite(a_[n]))
            throw_bad_argument("block kernel: a must be finite");
        if (!(b_[n] > 0.0) || !std::isfinite(b_[n]))
            throw_bad_argument("block kernel: b must be positive and finite");
        total += b_[n];
    }
    if (total > 1.0 + 1e-15)
        throw_bad_argument("block kernel: sum of b exceeds 1, supports cannot be packed into [0,1]");
    edges_.resize(b_.size() + 1);
    edges_[0] = 0.0;
    for (std::size_t n = 0; n < b_.size(); ++n) edges_[n + 1] = edges_[n] + b_[n];
}

std::size_t BlockKernelSpec::locate(double x) const {
    if (!(x >= edges_.front()) || !(x < edges_.back())) return npos;
    auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
    return static_cast<std::size_t>(it - edges_.begin()) - 1;
}

double BlockKernelSpec::indicator(std::size_t n, double x) const {
    double lo = edges_[n];
    double hi = edges_[n + 1];
    if (!(x >= lo) || !(x < hi)) return 0.0;
    double mid = lo + (hi - lo) / 2.0;
    return x < mid ? 1.0 : -1.0;
}

double BlockKernelSpec::eval(double x, double y) const {
    std::size_t nx = locate(x);
    if (nx == npos || nx != locate(y)) return 0.0;
    return (a_[nx] / b_[nx]) * indicator(nx, x) * indicator(nx, y);
}

double BlockKernelSpec::sup_abs_a() const {
    double s = 0.0;
    for (double v : a_) s = std::max(s, std::abs(v));
    return s;
}

double BlockKernelSpec::second_moment_curve(double u) const {
    double acc = 0.0;
    for (std::size_t n = 0; n < a_.size(); ++n) {
        double peak = (a_[n] / b_[n]) * (a_[n] / b_[n]);  // value of h^2 on block n
        if (peak <= u)
            acc += a_[n] * a_[n];
        else
            acc += u * b_[n] * b_[n];
    }
    return acc;
}

double block_kernel_eval(const BlockKernelSpec& spec, double x, double y) {
    return spec.eval(x, y);
}

Kernel::Kernel(std::string name, std::function<double(double, double)> eval)
    : name_(std::move(name)), eval_(std::move(eval)) {}

const std::vector<SeparableTerm>& Kernel::separable() const {
    if (!separable_) throw_bad_argument("kernel '" + name_ + "' has no separable expansion");
    return *separable_;
}

Kernel& Kernel::set_separable(std::vector<SeparableTerm> terms) {
    separable_ = std::make_shared<const std::vector<SeparableTerm>>(std::move(terms));
    return *this;
}

Kernel& Kernel::set_analytic(AnalyticInfo info) {
    analytic_ = std::move(info);
    return *this;
}

Kernel& Kernel::set_block(std::shared_ptr<const BlockKernelSpec> spec) {
    block_ = std::move(spec);
    return *this;
}

namespace basis {

double legendre01(unsigned m, double x) {
    double u = 2.0 * x - 1.0;
    double pm1 = 1.0, p = u;  // P_0, P_1
    for (unsigned k = 1; k < m; ++k) {
        double pnext = ((2.0 * k + 1.0) * u * p - k * pm1) / (k + 1.0);
        pm1 = p;
        p = pnext;
    }
    double val = (m == 0) ? 1.0 : p;
    return std::sqrt(2.0 * m + 1.0) * val;
}

double hermite_normal(unsigned m, double x) {
    double hm1 = 1.0, h = x;  // He_0, He_1
    for (unsigned k = 1; k < m; ++k) {
        double hnext = x * h - k * hm1;
        hm1 = h;
        h = hnext;
    }
    double val = (m == 0) ? 1.0 : h;
    double fact = 1.0;
    for (unsigned k = 2; k <= m; ++k) fact *= k;
    return val / std::sqrt(fact);
}

}  // namespace basis

namespace {

std::function<double(double)> make_phi(const std::string& family, unsigned m) {
    if (family == "legendre")
        return [m](double x) { return basis::legendre01(m, x); };
    if (family == "hermite")
        return [m](double x) { return basis::hermite_normal(m, x); };
    if (family == "identity") {
        if (m != 1) throw_bad_argument("identity basis has a single member");
        return [](double x) { return x; };
    }
    throw_bad_argument("unknown basis family: " + family);
}

std::string resolve_phi_family(const std::string& requested, const Distribution& dist) {
    if (requested != "auto") return requested;
    switch (dist.family()) {
        case DistFamily::uniform01: return "legendre";
        case DistFamily::gaussian01: return "hermite";
        default: return "identity";
    }
}

Kernel make_product(const Distribution& dist, double scale) {
    Kernel k("product", [scale](double x, double y) { return scale * x * y; });
    double mu = dist.mean();
    double ex2 = dist.variance() + mu * mu;
    AnalyticInfo info;
    info.dist_name = dist.name();
    info.mean_h = scale * mu * mu;
    // sup E[XY f(X) g(Y)] over unit-variance bounded f, g factors into
    // (sup E X f)^2-style terms and equals E X^2.
    info.operator_norm = std::abs(scale) * ex2;
    info.cond_mean = [scale, mu](double x) { return scale * x * mu; };
    if (dist.family() == DistFamily::rademacher) {
        double s2 = scale * scale;
        info.second_moment_curve = [s2](double u) { return std::min(s2, u); };
    }
    Kernel out = std::move(k);
    out.set_analytic(std::move(info));
    out.set_separable({SeparableTerm{scale, [](double x) { return x; }, "identity:1"}});
    return out;
}

Kernel make_sum(const Distribution& dist, double scale) {
    Kernel k("sum", [scale](double x, double y) { return scale * (x + y); });
    double mu = dist.mean();
    AnalyticInfo info;
    info.dist_name = dist.name();
    info.mean_h = scale * 2.0 * mu;
    info.cond_mean = [scale, mu](double x) { return scale * (x + mu); };
    if (dist.centered()) info.operator_norm = std::abs(scale) * std::sqrt(dist.variance());
    k.set_analytic(std::move(info));
    return k;
}

Kernel make_zero(const Distribution& dist) {
    Kernel k("zero", [](double, double) { return 0.0; });
    AnalyticInfo info;
    info.dist_name = dist.name();
    info.mean_h = 0.0;
    info.operator_norm = 0.0;
    info.cond_mean = [](double) { return 0.0; };
    info.second_moment_curve = [](double) { return 0.0; };
    k.set_analytic(std::move(info));
    k.set_separable({});
    return k;
}

Kernel make_block(std::vector<double> a, std::vector<double> b, const Distribution& dist,
                  double scale, int truncated_at) {
    if (dist.family() != DistFamily::uniform01)
        throw_bad_argument("block kernels are defined for the uniform01 law");
    if (scale != 1.0) {
        for (double& v : a) v *= scale;
    }
    auto spec = std::make_shared<const BlockKernelSpec>(std::move(a), std::move(b));
    Kernel k("block", [spec](double x, double y) { return spec->eval(x, y); });
    AnalyticInfo info;
    info.dist_name = dist.name();
    info.mean_h = 0.0;  // each I_n integrates to zero
    info.operator_norm = spec->sup_abs_a();
    info.cond_mean = [](double) { return 0.0; };
    info.second_moment_curve = [spec](double u) { return spec->second_moment_curve(u); };
    k.set_analytic(std::move(info));
    k.set_block(spec);
    k.set_truncated_at(truncated_at);
    return k;
}

Kernel make_block_doubleexp(double a, double b, const Distribution& dist, double scale) {
    if (!(b > 0.0) || !std::isfinite(a) || a == 0.0)
        throw_bad_argument("block_doubleexp: requires finite a != 0 and b > 0");
    // b_n = exp(-exp(a^2 n / b)), n = 1, 2, ...; stop at the first
    // value below 1e-300 (deeper blocks are unreachable in double
    // precision) and record where.
    std::vector<double> as, bs;
    int truncated_at = 0;
    for (int n = 1; n <= 100000; ++n) {
        double inner = std::exp(a * a * static_cast<double>(n) / b);
        double bn = std::exp(-inner);
        if (!(bn >= 1e-300)) {
            truncated_at = n - 1;
            break;
        }
        as.push_back(a);
        bs.push_back(bn);
        truncated_at = n;
    }
    if (as.empty())
        throw_bad_argument("block_doubleexp: no blocks above the 1e-300 cutoff for these parameters");
    Kernel k = make_block(std::move(as), std::move(bs), dist, scale, truncated_at);
    return k;
}

Kernel make_finite_rank(const std::vector<double>& lambdas, const std::string& phi_family,
                        const Distribution& dist, double scale) {
    std::string family = resolve_phi_family(phi_family, dist);
    std::vector<SeparableTerm> terms;
    terms.reserve(lambdas.size());
    double max_abs = 0.0;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        unsigned m = static_cast<unsigned>(i + 1);
        terms.push_back(SeparableTerm{scale * lambdas[i], make_phi(family, m),
                                      family + ":" + std::to_string(m)});
        max_abs = std::max(max_abs, std::abs(scale * lambdas[i]));
    }
    auto shared = std::make_shared<const std::vector<SeparableTerm>>(std::move(terms));
    Kernel k("finite_rank", [shared](double x, double y) {
        double acc = 0.0;
        // lambda * (phi(x) * phi(y)) keeps evaluation exactly symmetric.
        for (const auto& t : *shared) acc += t.lambda * (t.phi(x) * t.phi(y));
        return acc;
    });
    AnalyticInfo info;
    info.dist_name = dist.name();
    info.mean_h = 0.0;  // basis members have zero mean under their law
    info.operator_norm = max_abs;
    info.cond_mean = [](double) { return 0.0; };
    k.set_analytic(std::move(info));
    k.set_separable(std::vector<SeparableTerm>(*shared));
    return k;
}

}  // namespace

Kernel catalog(const std::string& name, const CatalogParams& params, const Distribution& dist) {
    if (name == "product") return make_product(dist, params.scale);
    if (name == "sum") return make_sum(dist, params.scale);
    if (name == "zero") return make_zero(dist);
    if (name == "block") return make_block(params.a, params.b, dist, params.scale, -1);
    if (name == "block_doubleexp")
        return make_block_doubleexp(params.de_a, params.de_b, dist, params.scale);
    if (name == "finite_rank") return make_finite_rank(params.lambdas, params.phi, dist, params.scale);
    throw_bad_argument("unknown kernel: " + name);
}

std::vector<std::string> catalog_names() {
    return {"product", "sum", "zero", "block", "block_doubleexp", "finite_rank"};
}

}  // namespace ulil
