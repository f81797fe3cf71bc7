// Reproducible experiment driver. Subcommands:
//   bdpp sample      --config c.cfg [--out dir] [--seeds a..b] [--threads n]
//   bdpp interpolate --config c.cfg ...
//   bdpp variance    --config c.cfg ...
//   bdpp report      [--out dir]
// Exit codes: 0 pass, 2 acceptance failure, 1 error. A fixed config and seed
// base reproduce every experiment CSV byte for byte; wall-clock timings go to
// the manifest only.

#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "experiments.hpp"

namespace {

using namespace bdpp;
using namespace bdpp::exp;

const char* kVersion = "bdpp 1.0.0";

[[noreturn]] void usage(const std::string& msg = "") {
    if (!msg.empty()) std::cerr << "error: " << msg << "\n";
    std::cerr <<
        "usage: bdpp <sample|interpolate|variance|report> [options]\n"
        "  --config <path>   flat key-value experiment config\n"
        "  --out <dir>       output directory (default: $BDPP_OUT or none)\n"
        "  --seeds a..b      override seed range (seed_base=a, n=b-a+1)\n"
        "  --threads n       parallelize sampling across seeds\n";
    std::exit(1);
}

struct CliArgs {
    std::string subcommand;
    std::string config_path;
    RunOptions run;
};

CliArgs parse_args(int argc, char** argv) {
    CliArgs a;
    if (argc < 2) usage();
    a.subcommand = argv[1];
    if (const char* env = std::getenv("BDPP_OUT")) a.run.out_dir = env;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&](const char* what) -> std::string {
            if (i + 1 >= argc) usage(std::string(what) + " needs a value");
            return argv[++i];
        };
        if (arg == "--config") {
            a.config_path = next("--config");
        } else if (arg == "--out") {
            a.run.out_dir = next("--out");
        } else if (arg == "--threads") {
            a.run.threads = std::stoi(next("--threads"));
            if (a.run.threads < 1) usage("--threads must be >= 1");
        } else if (arg == "--seeds") {
            const std::string range = next("--seeds");
            const auto dots = range.find("..");
            if (dots == std::string::npos) usage("--seeds expects a..b");
            const long lo = std::stol(range.substr(0, dots));
            const long hi = std::stol(range.substr(dots + 2));
            if (hi < lo) usage("--seeds range is empty");
            a.run.seed_base = lo;
            a.run.seed_base_set = true;
            a.run.n_override = hi - lo + 1;
        } else {
            usage("unknown option " + arg);
        }
    }
    return a;
}

ConfigMap load_config(const std::string& path) {
    if (path.empty()) usage("--config is required for this subcommand");
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config file " + path);
    return parse_config(is);
}

// FNV-1a over the raw config bytes; identifies the run in the manifest.
std::string config_hash(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::uint64_t h = 1469598103934665603ull;
    char c;
    while (is.get(c)) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void append_manifest(const RunOptions& run, const std::string& hash,
                     const std::string& stage,
                     const std::vector<std::string>& files, double wall_ms) {
    if (run.out_dir.empty()) return;
    const std::string path = run.out_dir + "/manifest.csv";
    const bool fresh = !std::ifstream(path).good();
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("cannot open " + path);
    if (fresh) os << "stage,file,config_hash,version,wall_ms\n";
    for (const std::string& f : files)
        os << stage << "," << f << "," << hash << "," << kVersion << ","
           << fmt17(wall_ms) << "\n";
}

void append_summary(const RunOptions& run, const std::string& experiment,
                    const Metrics& m) {
    if (run.out_dir.empty()) return;
    const std::string path = run.out_dir + "/summary.csv";
    const bool fresh = !std::ifstream(path).good();
    std::ofstream os(path, std::ios::app);
    if (!os) throw std::runtime_error("cannot open " + path);
    if (fresh) os << "experiment,metric,value\n";
    for (const auto& [k, v] : m)
        os << experiment << "," << k << "," << fmt17(v) << "\n";
}

int cmd_sample(const CliArgs& a) {
    const ConfigMap cfg = load_config(a.config_path);
    Metrics m;
    std::vector<std::string> files;
    const auto t0 = std::chrono::steady_clock::now();
    run_sample(cfg, a.run, m, &files);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    append_manifest(a.run, config_hash(a.config_path), "sample", files, ms);
    append_summary(a.run, "sample", m);
    for (const auto& [k, v] : m) std::cout << k << " = " << fmt17(v) << "\n";
    return 0;
}

int cmd_experiment(const CliArgs& a, const char* stage) {
    const ConfigMap cfg = load_config(a.config_path);
    const std::string name = cfg.require_str("experiment");
    const auto& reg = experiment_registry();
    const auto it = reg.find(name);
    if (it == reg.end())
        throw std::runtime_error("unknown experiment '" + name + "' for " + stage);
    Metrics m;
    const auto t0 = std::chrono::steady_clock::now();
    it->second(cfg, a.run, m);
    const double ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    append_manifest(a.run, config_hash(a.config_path), stage, {name + ".csv"}, ms);
    append_summary(a.run, name, m);
    for (const auto& [k, v] : m) std::cout << k << " = " << fmt17(v) << "\n";
    return 0;
}

int cmd_report(const CliArgs& a) {
    if (a.run.out_dir.empty())
        throw std::runtime_error("report needs --out (or $BDPP_OUT) pointing at completed runs");
    Metrics m;
    {
        std::ifstream is(a.run.out_dir + "/summary.csv");
        if (is) {
            std::string line;
            std::getline(is, line);  // header
            while (std::getline(is, line)) {
                const auto c1 = line.find(',');
                const auto c2 = line.find(',', c1 + 1);
                if (c1 == std::string::npos || c2 == std::string::npos) continue;
                m[line.substr(c1 + 1, c2 - c1 - 1)] = std::stod(line.substr(c2 + 1));
            }
        }
    }
    const std::vector<CriterionResult> res = evaluate_criteria(m);
    bool any_fail = false, any_incomplete = false;
    std::ostringstream js;
    js << "{\n  \"criteria\": [\n";
    for (std::size_t i = 0; i < res.size(); ++i) {
        js << "    {\"id\": " << res[i].id << ", \"status\": \"" << res[i].status
           << "\", \"detail\": \"" << res[i].detail << "\"}"
           << (i + 1 < res.size() ? ",\n" : "\n");
        if (res[i].status == "fail") any_fail = true;
        if (res[i].status == "incomplete") any_incomplete = true;
    }
    const char* status =
        any_fail ? "fail" : (any_incomplete ? "incomplete" : "pass");
    js << "  ],\n  \"status\": \"" << status << "\"\n}\n";
    std::cout << js.str();
    std::ofstream os(a.run.out_dir + "/report.json");
    if (os) os << js.str();
    return any_fail ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        const CliArgs a = parse_args(argc, argv);
        if (a.subcommand == "sample") return cmd_sample(a);
        if (a.subcommand == "interpolate") return cmd_experiment(a, "interpolate");
        if (a.subcommand == "variance") return cmd_experiment(a, "variance");
        if (a.subcommand == "report") return cmd_report(a);
        usage("unknown subcommand " + a.subcommand);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
