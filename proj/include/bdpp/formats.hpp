// Text serialization: kernel coefficient tables, configuration archives,
// and flat key-value run configs. All floating-point fields are written with
// 17 significant digits so that read(write(x)) == x in binary64.
#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <bdpp/kernels.hpp>
#include <bdpp/sampler.hpp>

namespace bdpp {

inline std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

namespace detail {

// Header fields are "key=value" tokens separated by spaces.
inline std::map<std::string, std::string> header_fields(const std::string& line,
                                                        const char* what) {
    if (line.size() < 2 || line[0] != '#')
        throw std::runtime_error(std::string(what) + ": missing '#' header line");
    std::map<std::string, std::string> kv;
    std::istringstream iss(line.substr(1));
    std::string tok;
    while (iss >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) continue;  // format tag like "dpp"
        kv[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
    return kv;
}

}  // namespace detail

// Inverse of WeightSpec::id() for the non-custom kinds.
inline WeightSpec weight_spec_from_id(const std::string& id, int d) {
    if (id == "unit") return WeightSpec::unit(d);
    if (id == "critical") return WeightSpec::critical(d);
    const auto colon = id.find(':');
    if (colon != std::string::npos) {
        const std::string head = id.substr(0, colon);
        if (head == "alpha" || head == "supercritical") {
            double v = 0.0;
            try {
                std::size_t used = 0;
                v = std::stod(id.substr(colon + 1), &used);
                if (colon + 1 + used != id.size())
                    throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw std::runtime_error("weight id not reconstructible: " + id);
            }
            return head == "alpha" ? WeightSpec::standard(v, d)
                                   : WeightSpec::supercritical(v, d);
        }
    }
    throw std::runtime_error("weight id not reconstructible: " + id);
}

// --------------------------------------------------------------------------
// Configuration archives.
//   # dpp d=<d> generator=<g> seed=<s> R=<R> N=<N>
//   re_1,im_1[,re_2,im_2,...]

inline void write_configuration(std::ostream& os, const Configuration& cfg) {
    os << "# dpp d=" << cfg.d << " generator=" << cfg.generator
       << " seed=" << cfg.seed << " R=" << fmt17(cfg.window_radius)
       << " N=" << cfg.points.size() << "\n";
    for (const Point& x : cfg.points) {
        for (int j = 0; j < cfg.d; ++j) {
            if (j) os << ",";
            os << fmt17(x.c[j].real()) << "," << fmt17(x.c[j].imag());
        }
        os << "\n";
    }
}

inline Configuration read_configuration(std::istream& is) {
    std::string line;
    if (!std::getline(is, line))
        throw std::runtime_error("read_configuration: empty input");
    const auto kv = detail::header_fields(line, "read_configuration");
    Configuration cfg;
    cfg.d = std::stoi(kv.at("d"));
    cfg.generator = kv.at("generator");
    cfg.seed = std::stoull(kv.at("seed"));
    cfg.window_radius = std::stod(kv.at("R"));
    const std::size_t n = std::stoul(kv.at("N"));
    cfg.points.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(is, line))
            throw std::runtime_error("read_configuration: truncated archive");
        std::vector<cplx> c(cfg.d);
        std::istringstream row(line);
        for (int j = 0; j < cfg.d; ++j) {
            double re = 0.0, im = 0.0;
            char comma = 0;
            if (!(row >> re >> comma >> im) || comma != ',')
                throw std::runtime_error("read_configuration: bad point row '" +
                                         line + "'");
            if (j + 1 < cfg.d && !(row >> comma))
                throw std::runtime_error("read_configuration: bad point row '" +
                                         line + "'");
            c[j] = cplx(re, im);
        }
        cfg.points.emplace_back(std::move(c));
    }
    return cfg;
}

// --------------------------------------------------------------------------
// Flat key-value run configs. Lines are "key = value"; '#' starts a comment;
// blank lines are ignored. Values keep internal spaces (lists are
// comma-separated within one value).

struct ConfigMap {
    std::map<std::string, std::string> kv;

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    std::string get_str(const std::string& key, const std::string& fallback) const {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }
    std::string require_str(const std::string& key) const {
        const auto it = kv.find(key);
        if (it == kv.end())
            throw std::runtime_error("config: missing required key '" + key + "'");
        return it->second;
    }
    long get_int(const std::string& key, long fallback) const {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            std::size_t used = 0;
            const long v = std::stol(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not an integer");
        }
    }
    double get_real(const std::string& key, double fallback) const {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            std::size_t used = 0;
            const double v = std::stod(it->second, &used);
            if (used != it->second.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw std::runtime_error("config: key '" + key + "' is not a number");
        }
    }
    std::vector<double> get_real_list(const std::string& key,
                                      std::vector<double> fallback) const {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        std::vector<double> out;
        std::istringstream iss(it->second);
        std::string tok;
        while (std::getline(iss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    }
};

inline ConfigMap parse_config(std::istream& is) {
    ConfigMap cm;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": empty key");
        cm.kv[key] = val;
    }
    return cm;
}

}  // namespace bdpp
