#include "ulil/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ulil/errors.hpp"
#include "ulil/rng.hpp"

namespace ulil {

ChaosMatrix ChaosMatrix::identity(std::size_t k) {
    ChaosMatrix m(k, k);
    for (std::size_t i = 0; i < k; ++i) m.at(i, i) = 1.0;
    return m;
}

ChaosMatrix ChaosMatrix::ones(std::size_t r, std::size_t c) {
    ChaosMatrix m(r, c);
    std::fill(m.entries.begin(), m.entries.end(), 1.0);
    return m;
}

namespace {

double clip_norm_sq(std::span<const double> v, double lambda) {
    double s = 0.0;
    for (double vi : v) {
        double b = std::min(1.0, std::abs(vi) / lambda);
        s += b * b;
    }
    return s;
}

}  // namespace

BoxBallResult box_ball_linear_max(std::span<const double> v, double t) {
    if (!(t > 0.0)) throw_bad_argument("box_ball_linear_max: t must be positive");
    BoxBallResult out;
    out.b.assign(v.size(), 0.0);

    double vmax = 0.0;
    std::size_t nnz = 0;
    for (double vi : v) {
        if (vi != 0.0) ++nnz;
        vmax = std::max(vmax, std::abs(vi));
    }
    if (nnz == 0) return out;  // zero objective, keep b = 0

    // All-clipped point sign(v) has squared norm nnz; feasible when nnz <= t.
    if (static_cast<double>(nnz) <= t) {
        double val = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] == 0.0) continue;
            out.b[i] = v[i] > 0.0 ? 1.0 : -1.0;
            val += std::abs(v[i]);
        }
        out.value = val;
        return out;
    }

    // Bisect the water level: clip_norm_sq is decreasing in lambda; find
    // the smallest lambda with norm <= t. Expand the upper bracket until
    // it is feasible.
    double lo = 0.0;
    double hi = vmax;
    while (clip_norm_sq(v, hi) > t) hi *= 2.0;
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-12 * std::max(hi, 1.0); ++iter) {
        double mid = 0.5 * (lo + hi);
        if (clip_norm_sq(v, mid) > t)
            lo = mid;
        else
            hi = mid;
    }
    double lambda = hi;  // feasible side of the bracket
    double val = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        double mag = std::min(1.0, std::abs(v[i]) / lambda);
        out.b[i] = v[i] >= 0.0 ? mag : -mag;
        if (v[i] == 0.0) out.b[i] = 0.0;
        val += std::abs(v[i]) * mag;
    }
    out.value = val;
    return out;
}

namespace {

void matvec(const ChaosMatrix& a, std::span<const double> c, std::vector<double>& out) {
    out.assign(a.rows, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        const double* row = &a.entries[i * a.cols];
        for (std::size_t j = 0; j < a.cols; ++j) s += row[j] * c[j];
        out[i] = s;
    }
}

void matvec_t(const ChaosMatrix& a, std::span<const double> b, std::vector<double>& out) {
    out.assign(a.cols, 0.0);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = &a.entries[i * a.cols];
        for (std::size_t j = 0; j < a.cols; ++j) out[j] += row[j] * b[i];
    }
}

double bilinear(const ChaosMatrix& a, std::span<const double> b, std::span<const double> c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* row = &a.entries[i * a.cols];
        double ri = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) ri += row[j] * c[j];
        s += b[i] * ri;
    }
    return s;
}

void check_finite(const ChaosMatrix& a) {
    if (a.rows == 0 || a.cols == 0) throw_bad_argument("chaos matrix must be nonempty");
    for (double e : a.entries)
        if (!std::isfinite(e)) throw_bad_argument("chaos matrix entries must be finite");
}

std::size_t dominant_row(const ChaosMatrix& a) {
    std::size_t best = 0;
    double bestn = -1.0;
    for (std::size_t i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols; ++j) s += a.at(i, j) * a.at(i, j);
        if (s > bestn) { bestn = s; best = i; }
    }
    return best;
}

std::size_t dominant_col(const ChaosMatrix& a) {
    std::size_t best = 0;
    double bestn = -1.0;
    for (std::size_t j = 0; j < a.cols; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) s += a.at(i, j) * a.at(i, j);
        if (s > bestn) { bestn = s; best = j; }
    }
    return best;
}

}  // namespace

ChaosNormResult chaos_norm(const ChaosMatrix& a, double t, int restarts) {
    check_finite(a);
    if (!(t > 0.0)) throw_bad_argument("chaos_norm: t must be positive");
    if (restarts < 1) throw_bad_argument("chaos_norm: restarts must be >= 1");

    const std::size_t k = a.rows, l = a.cols;
    ChaosNormResult best;
    best.b.assign(k, 0.0);
    best.c.assign(l, 0.0);
    best.restarts_used = restarts;
    bool best_set = false;

    std::vector<double> c0(l), work;
    for (int r = 0; r < restarts; ++r) {
        // Start family: leading right-singular direction, dominant
        // row/column sign patterns, then seeded random directions.
        if (r == 0) {
            std::vector<double> v(l);
            for (std::size_t j = 0; j < l; ++j)
                v[j] = rng::gaussian(9000, 0, j);
            std::vector<double> w;
            for (int it = 0; it < 60; ++it) {
                matvec(a, v, work);
                matvec_t(a, work, v);
                double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
                if (n == 0.0) break;
                for (double& x : v) x /= n;
            }
            c0 = v;
        } else if (r == 1) {
            std::size_t i = dominant_row(a);
            for (std::size_t j = 0; j < l; ++j) {
                double e = a.at(i, j);
                c0[j] = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
            }
        } else if (r == 2) {
            std::size_t j0 = dominant_col(a);
            std::vector<double> b0(k);
            for (std::size_t i = 0; i < k; ++i) {
                double e = a.at(i, j0);
                b0[i] = e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0);
            }
            matvec_t(a, b0, c0);
        } else {
            for (std::size_t j = 0; j < l; ++j)
                c0[j] = rng::gaussian(7700, static_cast<std::uint64_t>(r), j);
        }

        std::vector<double> c = c0;
        std::vector<double> b(k, 0.0);
        double value = 0.0;
        bool converged = false;
        for (int it = 0; it < 1000; ++it) {
            matvec(a, c, work);
            BoxBallResult rb = box_ball_linear_max(work, t);
            b = std::move(rb.b);
            matvec_t(a, b, work);
            BoxBallResult rc = box_ball_linear_max(work, t);
            c = std::move(rc.b);
            double next = rc.value;  // equals b^T A c for the updated pair
            if (std::abs(next - value) <= 1e-10 * std::max(std::abs(next), 1e-30)) {
                value = next;
                converged = true;
                break;
            }
            value = next;
        }
        if (!best_set || value > best.value) {
            best.value = value;
            best.b = b;
            best.c = c;
            best.converged = converged;
            best_set = true;
        }
    }
    // Report the bilinear form of the returned pair so the certificate
    // (b, c, value) is internally consistent.
    best.value = bilinear(a, best.b, best.c);
    return best;
}

namespace {

// Exact inner maximization used by the oracle. Independent of
// box_ball_linear_max: closed form over the sorted magnitudes.
// Sizes are bounded by the oracle precondition (k*l <= 16), so this
// runs entirely on the stack.
double clipped_linear_max_sorted(std::span<const double> v, double t) {
    double m[17];
    std::size_t n = 0;
    for (double vi : v) {
        double mag = std::abs(vi);
        if (mag > 0.0) m[n++] = mag;
    }
    if (n == 0) return 0.0;
    // insertion sort, descending
    for (std::size_t i = 1; i < n; ++i) {
        double key = m[i];
        std::size_t j = i;
        while (j > 0 && m[j - 1] < key) { m[j] = m[j - 1]; --j; }
        m[j] = key;
    }
    if (static_cast<double>(n) <= t) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += m[i];
        return s;
    }

    double tail_sq[18];
    tail_sq[n] = 0.0;
    for (std::size_t i = n; i > 0; --i) tail_sq[i - 1] = tail_sq[i] + m[i - 1] * m[i - 1];

    double best = 0.0;
    double prefix = 0.0;
    std::size_t smax = std::min<std::size_t>(n, static_cast<std::size_t>(std::floor(t)));
    for (std::size_t s = 0; s <= smax; ++s) {
        double budget = t - static_cast<double>(s);
        double value = prefix;
        if (budget > 0.0 && tail_sq[s] > 0.0) {
            double lambda = std::sqrt(tail_sq[s] / budget);
            for (std::size_t i = s; i < n; ++i)
                value += std::min(1.0, m[i] / lambda) * m[i];
        }
        best = std::max(best, value);
        if (s < n) prefix += m[s];
    }
    return best;
}

struct GridScan {
    const ChaosMatrix& a;
    double t;
    std::vector<double> vwork;

    explicit GridScan(const ChaosMatrix& m, double tt) : a(m), t(tt), vwork(m.cols) {}

    double eval(std::span<const double> braw) {
        // Project onto the ball (scaling preserves the box), then solve
        // the c side exactly.
        double nsq = 0.0;
        for (double x : braw) nsq += x * x;
        double scale = nsq > t ? std::sqrt(t / nsq) : 1.0;
        for (std::size_t j = 0; j < a.cols; ++j) vwork[j] = 0.0;
        for (std::size_t i = 0; i < a.rows; ++i) {
            double bi = braw[i] * scale;
            const double* row = &a.entries[i * a.cols];
            for (std::size_t j = 0; j < a.cols; ++j) vwork[j] += row[j] * bi;
        }
        return clipped_linear_max_sorted(vwork, t);
    }
};

}  // namespace

double chaos_norm_oracle(const ChaosMatrix& a, double t, double grid_step) {
    check_finite(a);
    if (!(t > 0.0)) throw_bad_argument("chaos_norm_oracle: t must be positive");
    if (a.rows * a.cols > 16)
        throw_bad_argument("chaos_norm_oracle: instance too large (k*l must be <= 16)");
    if (!(grid_step > 0.0) || grid_step > 0.1)
        throw_bad_argument("chaos_norm_oracle: grid_step must be in (0, 0.1]");

    const std::size_t k = a.rows;
    GridScan scan(a, t);

    std::vector<double> b(k, -1.0), point(k), best_b(k, 0.0);
    double best = scan.eval(best_b);

    // Coarse pass over the box grid.
    for (;;) {
        for (std::size_t i = 0; i < k; ++i) point[i] = std::min(1.0, b[i]);
        double val = scan.eval(point);
        if (val > best) { best = val; best_b = point; }
        std::size_t axis = 0;
        while (axis < k) {
            b[axis] += grid_step;
            if (b[axis] <= 1.0 + 0.5 * grid_step) break;
            b[axis] = -1.0;
            ++axis;
        }
        if (axis == k) break;
    }

    // Two local refinement passes around the best coarse point.
    double span = grid_step;
    std::vector<int> idx(k);
    for (int pass = 0; pass < 2; ++pass) {
        double step = span / 5.0;
        std::vector<double> base = best_b;
        std::fill(idx.begin(), idx.end(), -5);
        for (;;) {
            for (std::size_t i = 0; i < k; ++i)
                point[i] = std::clamp(base[i] + idx[i] * step, -1.0, 1.0);
            double val = scan.eval(point);
            if (val > best) { best = val; best_b = point; }
            std::size_t axis = 0;
            while (axis < k) {
                if (++idx[axis] <= 5) break;
                idx[axis] = -5;
                ++axis;
            }
            if (axis == k) break;
        }
        span = step;
    }
    return best;
}

double power_iteration_sigma_max(const ChaosMatrix& a, double rel_tol, int max_iter,
                                 std::uint64_t seed) {
    check_finite(a);
    std::vector<double> v(a.cols), w;
    for (std::size_t j = 0; j < a.cols; ++j) v[j] = rng::gaussian(seed, 0, j);
    double nv = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
    for (double& x : v) x /= nv;

    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        matvec(a, v, w);
        double s = std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0));
        if (s == 0.0) return 0.0;
        matvec_t(a, w, v);
        double n = std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
        if (n == 0.0) return 0.0;
        for (double& x : v) x /= n;
        if (it > 0 && std::abs(s - sigma) <= rel_tol * s) return s;
        sigma = s;
    }
    throw_numeric("power iteration failed to converge");
}

}  // namespace ulil
