#include <atomic>
#include <functional>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>
#include <vector>

#include "cli.hpp"
#include "ulil/ulil.h"

namespace cli {

namespace {

int map_status(ulil_status s) {
    return s == ULIL_OK ? kExitOk : (s == ULIL_ERR_ARGUMENT ? kExitConfig : kExitNumeric);
}

[[nodiscard]] int fail(ulil_status s) {
    std::cerr << "error: " << ulil_last_error() << "\n";
    return map_status(s);
}

#define CLI_CHECK(call)                                   \
    do {                                                  \
        ulil_status status_ = (call);                     \
        if (status_ != ULIL_OK) return fail(status_);     \
    } while (0)

struct Handles {
    ulil_dist* dist = nullptr;
    ulil_kernel* kernel = nullptr;
    ~Handles() {
        ulil_kernel_destroy(kernel);
        ulil_dist_destroy(dist);
    }
};

ulil_status make_dist(const DistSpec& spec, ulil_dist** out) {
    if (spec.name == "discrete")
        return ulil_dist_create_discrete(spec.values.data(), spec.weights.data(),
                                         spec.values.size(), out);
    return ulil_dist_create(spec.name.c_str(), out);
}

ulil_status make_kernel(const KernelSpec& spec, const ulil_dist* dist, ulil_kernel** out) {
    if (spec.family == "product") return ulil_kernel_create_product(dist, spec.scale, out);
    if (spec.family == "sum") return ulil_kernel_create_sum(dist, spec.scale, out);
    if (spec.family == "zero") return ulil_kernel_create_zero(dist, out);
    if (spec.family == "block")
        return ulil_kernel_create_block(dist, spec.a.data(), spec.b.data(), spec.a.size(),
                                        spec.scale, out);
    if (spec.family == "block_doubleexp")
        return ulil_kernel_create_block_doubleexp(dist, spec.de_a, spec.de_b, spec.scale, out);
    if (spec.family == "finite_rank")
        return ulil_kernel_create_finite_rank(dist, spec.lambdas.data(), spec.lambdas.size(),
                                              spec.phi.c_str(), spec.scale, out);
    std::cerr << "error: unknown kernel family: " << spec.family << "\n";
    return ULIL_ERR_ARGUMENT;
}

int make_handles(const KernelSpec& k, const DistSpec& d, Handles& h) {
    ulil_status s = make_dist(d, &h.dist);
    if (s != ULIL_OK) return fail(s);
    s = make_kernel(k, h.dist, &h.kernel);
    if (s != ULIL_OK) return fail(s);
    return kExitOk;
}

int prepare_out(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) {
        std::cerr << "error: cannot create output directory " << out << ": " << ec.message()
                  << "\n";
        return kExitConfig;
    }
    return kExitOk;
}

std::string path_join(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

// Runs fn(i) for i < n over `workers` threads. Results must land in
// pre-sized slots so the outcome is independent of scheduling.
void run_parallel(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    unsigned count = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < count; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& th : pool) th.join();
}

std::string variant_to_name(ulil_sum_variant v) {
    switch (v) {
        case ULIL_SUM_PLAIN: return "plain";
        case ULIL_SUM_RANDOMIZED: return "randomized";
        case ULIL_SUM_DECOUPLED: return "decoupled";
        case ULIL_SUM_DECOUPLED_RANDOMIZED: return "decoupled_randomized";
    }
    return "?";
}

bool variant_from_name(const std::string& name, ulil_sum_variant& out) {
    if (name == "plain") out = ULIL_SUM_PLAIN;
    else if (name == "randomized") out = ULIL_SUM_RANDOMIZED;
    else if (name == "decoupled") out = ULIL_SUM_DECOUPLED;
    else if (name == "decoupled_randomized") out = ULIL_SUM_DECOUPLED_RANDOMIZED;
    else return false;
    return true;
}

struct TrajectorySet {
    std::vector<ulil_trajectory*> handles;
    ~TrajectorySet() {
        for (ulil_trajectory* t : handles) ulil_trajectory_destroy(t);
    }
};

// Runs one trajectory per seed on the worker pool; fills set.handles
// in seed-list order.
int run_trajectories(const Handles& h, ulil_sum_variant variant, int engine, int max_exponent,
                     const std::vector<std::uint64_t>& seeds, unsigned workers,
                     TrajectorySet& set) {
    set.handles.assign(seeds.size(), nullptr);
    std::atomic<int> bad{static_cast<int>(ULIL_OK)};
    run_parallel(seeds.size(), workers, [&](std::size_t i) {
        ulil_trajectory* t = nullptr;
        ulil_status s =
            ulil_run_trajectory(h.kernel, h.dist, variant, engine, max_exponent, seeds[i], &t);
        if (s != ULIL_OK) {
            int expected = static_cast<int>(ULIL_OK);
            bad.compare_exchange_strong(expected, static_cast<int>(s));
            return;
        }
        set.handles[i] = t;
    });
    if (bad.load() != static_cast<int>(ULIL_OK)) return fail(static_cast<ulil_status>(bad.load()));
    return kExitOk;
}

}  // namespace

int cmd_catalog() {
    size_t needed = 0;
    if (ulil_catalog_text(nullptr, 0, &needed) != ULIL_OK) return kExitNumeric;
    std::vector<char> buf(needed);
    if (ulil_catalog_text(buf.data(), buf.size(), nullptr) != ULIL_OK) return kExitNumeric;
    std::cout << buf.data();
    return kExitOk;
}

int cmd_conditions(const CommonOpts& common, const ConditionsParams& p) {
    Handles h;
    if (int rc = make_handles(p.kernel, p.dist, h)) return rc;

    ulil_report* report = nullptr;
    CLI_CHECK(ulil_certify(h.kernel, h.dist, p.probes, p.mc_samples, p.operator_m, common.seed,
                           &report));
    size_t needed = 0;
    ulil_report_text(report, nullptr, 0, &needed);
    std::vector<char> text(needed);
    ulil_report_text(report, text.data(), text.size(), nullptr);

    double pass = 0.0, cond_b = 0.0, cond_c = 0.0;
    ulil_report_value(report, "canonical.pass", &pass);
    ulil_report_value(report, "cond_b.limsup", &cond_b);
    ulil_report_value(report, "cond_c.value", &cond_c);
    ulil_report_destroy(report);

    std::cout << "canonical = " << (pass == 1.0 ? "pass" : "FAIL") << "\n";
    std::cout << "cond_b.limsup = " << fmt_double(cond_b) << "\n";
    std::cout << "cond_c.value = " << fmt_double(cond_c) << "\n";

    if (!common.out.empty()) {
        if (int rc = prepare_out(common.out)) return rc;
        write_file(path_join(common.out, "report.txt"), text.data());
        write_file(path_join(common.out, "manifest.cfg"),
                   manifest_text(manifest_for("conditions", common, p)));
    }
    return kExitOk;
}

int cmd_simulate(const CommonOpts& common, const SimulateParams& params) {
    SimulateParams p = params;
    Handles h;
    if (int rc = make_handles(p.kernel, p.dist, h)) return rc;

    ulil_sum_variant variant;
    if (!variant_from_name(p.variant, variant)) {
        std::cerr << "error: unknown variant: " << p.variant << "\n";
        return kExitConfig;
    }
    if (p.engine.empty())
        p.engine = ulil_kernel_has_separable(h.kernel) ? "separable" : "generic";
    int engine;
    if (p.engine == "generic") engine = 0;
    else if (p.engine == "separable") engine = 1;
    else {
        std::cerr << "error: unknown engine: " << p.engine << "\n";
        return kExitConfig;
    }
    if (p.burn_in < 0) p.burn_in = ulil_default_burn_in(p.max_exponent);
    if (p.seeds.empty()) {
        std::cerr << "error: need at least one seed\n";
        return kExitConfig;
    }

    TrajectorySet set;
    if (int rc = run_trajectories(h, variant, engine, p.max_exponent, p.seeds, common.workers, set))
        return rc;

    // one record per (seed, checkpoint)
    std::ostringstream csv;
    csv << "seed,variant,n,raw_sum,norm_nl2n,norm_2nl2n\n";
    for (std::size_t i = 0; i < set.handles.size(); ++i) {
        size_t rows = ulil_trajectory_size(set.handles[i]);
        for (size_t r = 0; r < rows; ++r) {
            ulil_checkpoint row;
            ulil_trajectory_row(set.handles[i], r, &row);
            csv << p.seeds[i] << ',' << variant_to_name(variant) << ',' << row.n << ','
                << fmt_double(row.raw_sum) << ',' << fmt_double(row.norm_nl2n) << ','
                << fmt_double(row.norm_2nl2n) << "\n";
        }
    }

    ulil_limsup_result stats;
    std::vector<double> sup1(p.seeds.size()), sup2(p.seeds.size());
    CLI_CHECK(ulil_limsup_estimate(set.handles.data(), set.handles.size(), p.burn_in, &stats,
                                   sup1.data(), sup2.data()));

    std::ostringstream ld;
    for (std::size_t i = 0; i < p.seeds.size(); ++i) {
        ld << "{\"seed\":" << p.seeds[i] << ",\"tail_sup_nl2n\":" << fmt_double(sup1[i])
           << ",\"tail_sup_2nl2n\":" << fmt_double(sup2[i]) << ",\"overflow\":"
           << (ulil_trajectory_overflow(set.handles[i]) ? "true" : "false") << "}\n";
    }
    ld << "{\"median_nl2n\":" << fmt_double(stats.median_nl2n)
       << ",\"iqr_nl2n\":" << fmt_double(stats.iqr_nl2n)
       << ",\"median_2nl2n\":" << fmt_double(stats.median_2nl2n)
       << ",\"iqr_2nl2n\":" << fmt_double(stats.iqr_2nl2n) << ",\"burn_in\":" << p.burn_in
       << ",\"seeds\":" << p.seeds.size() << "}\n";

    std::cout << "seeds = " << p.seeds.size() << "\n";
    std::cout << "checkpoints_per_seed = " << p.max_exponent << "\n";
    std::cout << "median_tail_sup_nl2n = " << fmt_double(stats.median_nl2n) << "\n";
    std::cout << "median_tail_sup_2nl2n = " << fmt_double(stats.median_2nl2n) << "\n";

    if (!common.out.empty()) {
        if (int rc = prepare_out(common.out)) return rc;
        write_file(path_join(common.out, "trajectories.csv"), csv.str());
        write_file(path_join(common.out, "summary.ldjson"), ld.str());
        write_file(path_join(common.out, "manifest.cfg"),
                   manifest_text(manifest_for("simulate", common, p)));
    }
    return kExitOk;
}

int cmd_chaos_norm(const CommonOpts& common, const ChaosNormParams& p) {
    std::vector<double> entries;
    std::size_t rows = 0, cols = 0;
    try {
        parse_matrix(p.matrix, entries, rows, cols);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    ulil_chaos_result result;
    std::vector<double> b(rows), c(cols);
    CLI_CHECK(ulil_chaos_norm(entries.data(), rows, cols, p.t, p.restarts, &result, b.data(),
                              c.data()));
    std::cout << "value = " << fmt_double(result.value) << "\n";
    std::cout << "converged = " << (result.converged ? "true" : "false") << "\n";
    double oracle = 0.0;
    if (p.oracle) {
        CLI_CHECK(ulil_chaos_norm_oracle(entries.data(), rows, cols, p.t, p.grid_step, &oracle));
        std::cout << "oracle = " << fmt_double(oracle) << "\n";
    }
    if (!common.out.empty()) {
        if (int rc = prepare_out(common.out)) return rc;
        std::ostringstream ld;
        ld << "{\"value\":" << fmt_double(result.value) << ",\"t\":" << fmt_double(p.t)
           << ",\"restarts\":" << result.restarts_used
           << ",\"converged\":" << (result.converged ? "true" : "false") << ",\"b\":[";
        for (std::size_t i = 0; i < b.size(); ++i) ld << (i ? "," : "") << fmt_double(b[i]);
        ld << "],\"c\":[";
        for (std::size_t i = 0; i < c.size(); ++i) ld << (i ? "," : "") << fmt_double(c[i]);
        ld << "]";
        if (p.oracle) ld << ",\"oracle\":" << fmt_double(oracle);
        ld << "}\n";
        write_file(path_join(common.out, "result.ldjson"), ld.str());
        write_file(path_join(common.out, "manifest.cfg"),
                   manifest_text(manifest_for("chaos-norm", common, p)));
    }
    return kExitOk;
}

int cmd_bounds(const CommonOpts& common, const BoundsParams& p) {
    double value = 0.0;
    if (p.type == "talagrand") {
        if (p.ez_abs >= 0.0)
            CLI_CHECK(ulil_talagrand_bound_weak_variance(p.t, p.u, p.sigma2, p.ez_abs, p.bigk,
                                                         &value));
        else
            CLI_CHECK(ulil_talagrand_bound(p.t, p.u, p.v, p.bigk, &value));
        std::cout << "talagrand = " << fmt_double(value) << "\n";
    } else if (p.type == "prohorov") {
        CLI_CHECK(ulil_prohorov_bound(p.t, p.u, p.sigma2, &value));
        std::cout << "prohorov = " << fmt_double(value) << "\n";
    } else if (p.type == "bernstein") {
        CLI_CHECK(ulil_bernstein_bound(p.t, p.u, p.sigma2, &value));
        std::cout << "bernstein = " << fmt_double(value) << "\n";
    } else if (p.type == "latala") {
        std::vector<double> entries;
        std::size_t rows = 0, cols = 0;
        try {
            parse_matrix(p.matrix, entries, rows, cols);
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitConfig;
        }
        bool exhaustive = p.mode == "exhaustive";
        ulil_latala_result result;
        CLI_CHECK(ulil_latala_lower_check(entries.data(), rows, cols, p.t, p.c,
                                          exhaustive ? 1 : 0, p.samples, common.seed, &result));
        std::cout << "probability = " << fmt_double(result.probability) << "\n";
        std::cout << "threshold = " << fmt_double(result.threshold) << "\n";
        std::cout << "holds = " << (result.holds ? "true" : "false") << "\n";
        if (exhaustive && !common.out.empty()) {
            if (int rc = prepare_out(common.out)) return rc;
            std::vector<double> values(std::size_t{1} << (rows + cols));
            CLI_CHECK(ulil_chaos_sign_values(entries.data(), rows, cols, values.data()));
            std::ostringstream csv;
            csv << "chaos_value\n";
            for (double v : values) csv << fmt_double(v) << "\n";
            write_file(path_join(common.out, "distribution.csv"), csv.str());
        }
    } else {
        std::cerr << "error: unknown bound type: " << p.type << "\n";
        return kExitConfig;
    }
    if (!common.out.empty()) {
        if (int rc = prepare_out(common.out)) return rc;
        write_file(path_join(common.out, "manifest.cfg"),
                   manifest_text(manifest_for("bounds", common, p)));
    }
    return kExitOk;
}

int cmd_limit_set(const CommonOpts& common, const LimitSetParams& params) {
    LimitSetParams p = params;
    Handles h;
    if (int rc = make_handles(p.kernel, p.dist, h)) return rc;
    if (p.engine.empty())
        p.engine = ulil_kernel_has_separable(h.kernel) ? "separable" : "generic";
    int engine = p.engine == "separable" ? 1 : 0;
    if (p.burn_in < 0) p.burn_in = ulil_default_burn_in(p.max_exponent);

    TrajectorySet set;
    if (int rc =
            run_trajectories(h, ULIL_SUM_PLAIN, engine, p.max_exponent, p.seeds, common.workers, set))
        return rc;

    ulil_limit_set_result result;
    CLI_CHECK(ulil_limit_set_estimate(set.handles.data(), set.handles.size(), p.burn_in, h.kernel,
                                      h.dist, p.gram_m, common.seed, &result, nullptr, 0));
    std::vector<double> points(result.point_count);
    CLI_CHECK(ulil_limit_set_estimate(set.handles.data(), set.handles.size(), p.burn_in, h.kernel,
                                      h.dist, p.gram_m, common.seed, &result, points.data(),
                                      points.size()));

    std::cout << "hull = [" << fmt_double(result.hull_lo) << ", " << fmt_double(result.hull_hi)
              << "]\n";
    if (result.has_predicted)
        std::cout << "predicted = [" << fmt_double(result.predicted_lo) << ", "
                  << fmt_double(result.predicted_hi) << "]\n";

    if (!common.out.empty()) {
        if (int rc = prepare_out(common.out)) return rc;
        std::ostringstream csv;
        csv << "norm_2nl2n\n";
        for (double v : points) csv << fmt_double(v) << "\n";
        write_file(path_join(common.out, "points.csv"), csv.str());

        // 32-bin histogram over the hull
        std::vector<std::size_t> hist(32, 0);
        double width = result.hull_hi - result.hull_lo;
        for (double v : points) {
            std::size_t bin =
                width > 0.0 ? std::min<std::size_t>(
                                  31, static_cast<std::size_t>((v - result.hull_lo) / width * 32))
                            : 0;
            ++hist[bin];
        }
        std::ostringstream ld;
        ld << "{\"hull_lo\":" << fmt_double(result.hull_lo)
           << ",\"hull_hi\":" << fmt_double(result.hull_hi)
           << ",\"has_predicted\":" << (result.has_predicted ? "true" : "false");
        if (result.has_predicted)
            ld << ",\"predicted_lo\":" << fmt_double(result.predicted_lo)
               << ",\"predicted_hi\":" << fmt_double(result.predicted_hi);
        ld << ",\"points\":" << result.point_count << ",\"burn_in\":" << p.burn_in << "}\n";
        ld << "{\"histogram\":[";
        for (std::size_t i = 0; i < hist.size(); ++i) ld << (i ? "," : "") << hist[i];
        ld << "]}\n";
        write_file(path_join(common.out, "summary.ldjson"), ld.str());
        write_file(path_join(common.out, "manifest.cfg"),
                   manifest_text(manifest_for("limit-set", common, p)));
    }
    return kExitOk;
}

int cmd_rerun(const std::string& manifest_path, const CommonOpts& overrides, bool out_given,
              bool workers_given) {
    KeyValues kv;
    try {
        kv = read_flat_config(manifest_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    auto it = kv.find("command");
    if (it == kv.end()) {
        std::cerr << "error: manifest has no command key\n";
        return kExitConfig;
    }
    CommonOpts common;
    load_common(kv, common);
    if (out_given) common.out = overrides.out;
    if (workers_given) common.workers = overrides.workers;

    const std::string& command = it->second;
    try {
        if (command == "simulate") {
            SimulateParams p;
            load_params(kv, p);
            return cmd_simulate(common, p);
        }
        if (command == "conditions") {
            ConditionsParams p;
            load_params(kv, p);
            return cmd_conditions(common, p);
        }
        if (command == "chaos-norm") {
            ChaosNormParams p;
            load_params(kv, p);
            return cmd_chaos_norm(common, p);
        }
        if (command == "bounds") {
            BoundsParams p;
            load_params(kv, p);
            return cmd_bounds(common, p);
        }
        if (command == "limit-set") {
            LimitSetParams p;
            load_params(kv, p);
            return cmd_limit_set(common, p);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: bad manifest value: " << e.what() << "\n";
        return kExitConfig;
    }
    std::cerr << "error: unknown command in manifest: " << command << "\n";
    return kExitConfig;
}

}  // namespace cli
