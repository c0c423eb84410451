#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cli.hpp"

namespace cli {

std::string fmt_double(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(v[i]);
    }
    return out;
}

std::string join_u64(const std::vector<std::uint64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(v[i]);
    }
    return out;
}

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char ch : text) {
        if (ch == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const std::string& part : split(text, ',')) {
        std::string p = trim(part);
        if (p.empty()) throw std::runtime_error("empty entry in number list: " + text);
        char* end = nullptr;
        double v = std::strtod(p.c_str(), &end);
        if (end == p.c_str() || *end != '\0')
            throw std::runtime_error("bad number '" + p + "' in list");
        out.push_back(v);
    }
    return out;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> out;
    if (trim(text).empty()) return out;
    for (const std::string& part : split(text, ',')) {
        std::string p = trim(part);
        std::size_t dots = p.find("..");
        if (dots != std::string::npos) {
            std::uint64_t lo = std::stoull(p.substr(0, dots));
            std::uint64_t hi = std::stoull(p.substr(dots + 2));
            if (hi < lo) throw std::runtime_error("descending seed range: " + p);
            for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
        } else {
            out.push_back(std::stoull(p));
        }
    }
    return out;
}

void parse_matrix(const std::string& text, std::vector<double>& entries, std::size_t& rows,
                  std::size_t& cols) {
    entries.clear();
    rows = cols = 0;
    for (const std::string& row : split(trim(text), ';')) {
        std::vector<double> vals = parse_doubles(row);
        if (vals.empty()) throw std::runtime_error("matrix row is empty");
        if (cols == 0)
            cols = vals.size();
        else if (vals.size() != cols)
            throw std::runtime_error("matrix rows have unequal lengths");
        entries.insert(entries.end(), vals.begin(), vals.end());
        ++rows;
    }
    if (rows == 0) throw std::runtime_error("matrix is empty");
}

std::string read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file: " + path);
    std::string line, inline_form;
    while (std::getline(in, line)) {
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (!inline_form.empty()) inline_form += ';';
        inline_form += t;
    }
    if (inline_form.empty()) throw std::runtime_error("matrix file has no rows: " + path);
    return inline_form;
}

KeyValues read_flat_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    KeyValues kv;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string default_out_dir() {
    const char* env = std::getenv("ULIL_OUT");
    return env ? env : "";
}

namespace {

void put_common(KeyValues& kv, const std::string& command, const CommonOpts& common) {
    kv["command"] = command;
    kv["out"] = common.out;
    kv["workers"] = std::to_string(common.workers);
    kv["seed"] = std::to_string(common.seed);
}

void put_kernel(KeyValues& kv, const KernelSpec& k) {
    kv["kernel"] = k.family;
    if (!k.a.empty()) kv["kernel.a"] = join_doubles(k.a);
    if (!k.b.empty()) kv["kernel.b"] = join_doubles(k.b);
    if (k.family == "block_doubleexp") {
        kv["kernel.de_a"] = fmt_double(k.de_a);
        kv["kernel.de_b"] = fmt_double(k.de_b);
    }
    if (!k.lambdas.empty()) kv["kernel.lambda"] = join_doubles(k.lambdas);
    if (k.family == "finite_rank") kv["kernel.phi"] = k.phi;
    kv["kernel.scale"] = fmt_double(k.scale);
}

void put_dist(KeyValues& kv, const DistSpec& d) {
    kv["dist"] = d.name;
    if (!d.values.empty()) {
        kv["dist.values"] = join_doubles(d.values);
        kv["dist.weights"] = join_doubles(d.weights);
    }
}

void get_kernel(const KeyValues& kv, KernelSpec& k) {
    if (auto it = kv.find("kernel"); it != kv.end()) k.family = it->second;
    if (auto it = kv.find("kernel.a"); it != kv.end()) k.a = parse_doubles(it->second);
    if (auto it = kv.find("kernel.b"); it != kv.end()) k.b = parse_doubles(it->second);
    if (auto it = kv.find("kernel.de_a"); it != kv.end()) k.de_a = std::stod(it->second);
    if (auto it = kv.find("kernel.de_b"); it != kv.end()) k.de_b = std::stod(it->second);
    if (auto it = kv.find("kernel.lambda"); it != kv.end()) k.lambdas = parse_doubles(it->second);
    if (auto it = kv.find("kernel.phi"); it != kv.end()) k.phi = it->second;
    if (auto it = kv.find("kernel.scale"); it != kv.end()) k.scale = std::stod(it->second);
}

void get_dist(const KeyValues& kv, DistSpec& d) {
    if (auto it = kv.find("dist"); it != kv.end()) d.name = it->second;
    if (auto it = kv.find("dist.values"); it != kv.end()) d.values = parse_doubles(it->second);
    if (auto it = kv.find("dist.weights"); it != kv.end()) d.weights = parse_doubles(it->second);
}

}  // namespace

KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const SimulateParams& p) {
    KeyValues kv;
    put_common(kv, command, common);
    put_kernel(kv, p.kernel);
    put_dist(kv, p.dist);
    kv["variant"] = p.variant;
    kv["engine"] = p.engine;
    kv["max_exponent"] = std::to_string(p.max_exponent);
    kv["seeds"] = join_u64(p.seeds);
    kv["burn_in"] = std::to_string(p.burn_in);
    return kv;
}

KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const ConditionsParams& p) {
    KeyValues kv;
    put_common(kv, command, common);
    put_kernel(kv, p.kernel);
    put_dist(kv, p.dist);
    kv["probes"] = std::to_string(p.probes);
    kv["mc_samples"] = std::to_string(p.mc_samples);
    kv["operator_m"] = std::to_string(p.operator_m);
    return kv;
}

KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const ChaosNormParams& p) {
    KeyValues kv;
    put_common(kv, command, common);
    kv["matrix"] = p.matrix;
    kv["t"] = fmt_double(p.t);
    kv["restarts"] = std::to_string(p.restarts);
    kv["oracle"] = p.oracle ? "true" : "false";
    kv["grid_step"] = fmt_double(p.grid_step);
    return kv;
}

KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const BoundsParams& p) {
    KeyValues kv;
    put_common(kv, command, common);
    kv["type"] = p.type;
    kv["t"] = fmt_double(p.t);
    if (p.type == "talagrand") {
        kv["u"] = fmt_double(p.u);
        kv["v"] = fmt_double(p.v);
        kv["bigk"] = fmt_double(p.bigk);
        if (p.ez_abs >= 0.0) {
            kv["sigma2"] = fmt_double(p.sigma2);
            kv["ez_abs"] = fmt_double(p.ez_abs);
        }
    } else if (p.type == "prohorov" || p.type == "bernstein") {
        kv["u"] = fmt_double(p.u);
        kv["sigma2"] = fmt_double(p.sigma2);
    } else if (p.type == "latala") {
        kv["matrix"] = p.matrix;
        kv["c"] = fmt_double(p.c);
        kv["mode"] = p.mode;
        kv["samples"] = std::to_string(p.samples);
    }
    return kv;
}

KeyValues manifest_for(const std::string& command, const CommonOpts& common,
                       const LimitSetParams& p) {
    KeyValues kv;
    put_common(kv, command, common);
    put_kernel(kv, p.kernel);
    put_dist(kv, p.dist);
    kv["engine"] = p.engine;
    kv["max_exponent"] = std::to_string(p.max_exponent);
    kv["seeds"] = join_u64(p.seeds);
    kv["burn_in"] = std::to_string(p.burn_in);
    kv["gram_m"] = std::to_string(p.gram_m);
    return kv;
}

std::string manifest_text(const KeyValues& kv) {
    std::ostringstream os;
    for (const auto& [key, value] : kv) os << key << " = " << value << "\n";
    return os.str();
}

void load_common(const KeyValues& kv, CommonOpts& common) {
    if (auto it = kv.find("out"); it != kv.end()) common.out = it->second;
    if (auto it = kv.find("workers"); it != kv.end())
        common.workers = static_cast<unsigned>(std::stoul(it->second));
    if (auto it = kv.find("seed"); it != kv.end()) common.seed = std::stoull(it->second);
}

void load_params(const KeyValues& kv, SimulateParams& p) {
    get_kernel(kv, p.kernel);
    get_dist(kv, p.dist);
    if (auto it = kv.find("variant"); it != kv.end()) p.variant = it->second;
    if (auto it = kv.find("engine"); it != kv.end()) p.engine = it->second;
    if (auto it = kv.find("max_exponent"); it != kv.end()) p.max_exponent = std::stoi(it->second);
    if (auto it = kv.find("seeds"); it != kv.end()) p.seeds = parse_seed_list(it->second);
    if (auto it = kv.find("burn_in"); it != kv.end()) p.burn_in = std::stoi(it->second);
}

void load_params(const KeyValues& kv, ConditionsParams& p) {
    get_kernel(kv, p.kernel);
    get_dist(kv, p.dist);
    if (auto it = kv.find("probes"); it != kv.end()) p.probes = std::stoul(it->second);
    if (auto it = kv.find("mc_samples"); it != kv.end()) p.mc_samples = std::stoul(it->second);
    if (auto it = kv.find("operator_m"); it != kv.end()) p.operator_m = std::stoul(it->second);
}

void load_params(const KeyValues& kv, ChaosNormParams& p) {
    if (auto it = kv.find("matrix"); it != kv.end()) p.matrix = it->second;
    if (auto it = kv.find("t"); it != kv.end()) p.t = std::stod(it->second);
    if (auto it = kv.find("restarts"); it != kv.end()) p.restarts = std::stoi(it->second);
    if (auto it = kv.find("oracle"); it != kv.end()) p.oracle = it->second == "true";
    if (auto it = kv.find("grid_step"); it != kv.end()) p.grid_step = std::stod(it->second);
}

void load_params(const KeyValues& kv, BoundsParams& p) {
    if (auto it = kv.find("type"); it != kv.end()) p.type = it->second;
    if (auto it = kv.find("t"); it != kv.end()) p.t = std::stod(it->second);
    if (auto it = kv.find("u"); it != kv.end()) p.u = std::stod(it->second);
    if (auto it = kv.find("v"); it != kv.end()) p.v = std::stod(it->second);
    if (auto it = kv.find("bigk"); it != kv.end()) p.bigk = std::stod(it->second);
    if (auto it = kv.find("sigma2"); it != kv.end()) p.sigma2 = std::stod(it->second);
    if (auto it = kv.find("ez_abs"); it != kv.end()) p.ez_abs = std::stod(it->second);
    if (auto it = kv.find("matrix"); it != kv.end()) p.matrix = it->second;
    if (auto it = kv.find("c"); it != kv.end()) p.c = std::stod(it->second);
    if (auto it = kv.find("mode"); it != kv.end()) p.mode = it->second;
    if (auto it = kv.find("samples"); it != kv.end()) p.samples = std::stoul(it->second);
}

void load_params(const KeyValues& kv, LimitSetParams& p) {
    get_kernel(kv, p.kernel);
    get_dist(kv, p.dist);
    if (auto it = kv.find("engine"); it != kv.end()) p.engine = it->second;
    if (auto it = kv.find("max_exponent"); it != kv.end()) p.max_exponent = std::stoi(it->second);
    if (auto it = kv.find("seeds"); it != kv.end()) p.seeds = parse_seed_list(it->second);
    if (auto it = kv.find("burn_in"); it != kv.end()) p.burn_in = std::stoi(it->second);
    if (auto it = kv.find("gram_m"); it != kv.end()) p.gram_m = std::stoul(it->second);
}

}  // namespace cli
