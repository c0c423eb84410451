#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

// Command-line front end. Talks to the library exclusively through the
// C API in ulil/ulil.h; everything here is argument plumbing, file
// formats and the run manifest.

namespace cli {

// exit codes: 0 success, 2 configuration error, 3 numerical failure
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct KernelSpec {
    std::string family = "product";
    std::vector<double> a, b;         // block
    double de_a = 1.0, de_b = 1.0;    // block_doubleexp
    std::vector<double> lambdas;      // finite_rank
    std::string phi = "auto";         // finite_rank basis
    double scale = 1.0;
};

struct DistSpec {
    std::string name = "rademacher";
    std::vector<double> values, weights;  // discrete only
};

struct CommonOpts {
    std::string out;  // output directory; empty = no files
    unsigned workers = 1;
    std::uint64_t seed = 1;
};

struct SimulateParams {
    KernelSpec kernel;
    DistSpec dist;
    std::string variant = "plain";
    std::string engine;  // empty = pick from the kernel
    int max_exponent = 10;
    std::vector<std::uint64_t> seeds = {1};
    int burn_in = -1;  // -1 = default for max_exponent
};

struct ConditionsParams {
    KernelSpec kernel;
    DistSpec dist;
    std::size_t probes = 20;
    std::size_t mc_samples = 20000;
    std::size_t operator_m = 400;
};

struct ChaosNormParams {
    std::string matrix;  // inline rows "a,b;c,d"
    double t = 1.0;
    int restarts = 16;
    bool oracle = false;
    double grid_step = 0.1;
};

struct BoundsParams {
    std::string type = "talagrand";  // talagrand | prohorov | bernstein | latala
    double t = 1.0, u = 1.0, v = 1.0, bigk = 1.0, sigma2 = 1.0, ez_abs = -1.0;
    std::string matrix;  // latala
    double c = 0.05;
    std::string mode = "exhaustive";  // latala: exhaustive | mc
    std::size_t samples = 100000;
};

struct LimitSetParams {
    KernelSpec kernel;
    DistSpec dist;
    std::string engine;
    int max_exponent = 14;
    std::vector<std::uint64_t> seeds = {1};
    int burn_in = -1;
    std::size_t gram_m = 4000;
};

// ---- parsing / formatting helpers (config.cpp) ----

std::string fmt_double(double x);
std::string join_doubles(const std::vector<double>& v);
std::string join_u64(const std::vector<std::uint64_t>& v);
std::vector<double> parse_doubles(const std::string& text);
// "1..20", "3", "1,2,9..11" and combinations
std::vector<std::uint64_t> parse_seed_list(const std::string& text);
// "1,0;0,1" -> row-major entries + shape
void parse_matrix(const std::string& text, std::vector<double>& entries, std::size_t& rows,
                  std::size_t& cols);
std::string read_matrix_file(const std::string& path);  // CSV rows -> inline form

using KeyValues = std::map<std::string, std::string>;

KeyValues read_flat_config(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string default_out_dir();  // $ULIL_OUT or empty

// manifest serialization per command
KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const SimulateParams& p);
KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const ConditionsParams& p);
KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const ChaosNormParams& p);
KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const BoundsParams& p);
KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const LimitSetParams& p);
std::string manifest_text(const KeyValues& kv);

// manifest deserialization
void load_common(const KeyValues& kv, CommonOpts& common);
void load_params(const KeyValues& kv, SimulateParams& p);
void load_params(const KeyValues& kv, ConditionsParams& p);
void load_params(const KeyValues& kv, ChaosNormParams& p);
void load_params(const KeyValues& kv, BoundsParams& p);
void load_params(const KeyValues& kv, LimitSetParams& p);

// ---- commands (commands.cpp); each returns an exit code ----

int cmd_catalog();
int cmd_conditions(const CommonOpts& common, const ConditionsParams& p);
int cmd_simulate(const CommonOpts& common, const SimulateParams& p);
int cmd_chaos_norm(const CommonOpts& common, const ChaosNormParams& p);
int cmd_bounds(const CommonOpts& common, const BoundsParams& p);
int cmd_limit_set(const CommonOpts& common, const LimitSetParams& p);
int cmd_rerun(const std::string& manifest_path, const CommonOpts& overrides, bool out_given,
              bool workers_given);

}  // namespace cli
