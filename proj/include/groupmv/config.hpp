#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "groupmv/sim.hpp"
#include "groupmv/synth.hpp"
#include "groupmv/topology.hpp"

namespace groupmv {

// One entry of the `topologies` list: a kind plus explicit dimensions, or
// auto-sized per N (smallest instance with at least N nodes).
struct TopologySpec {
    GraphKind kind = GraphKind::Grid;
    int a = 0;  // rows / cells / ring length
    int b = 0;
    bool autosize = true;

    static TopologySpec parse(const std::string& text);
    CouplingGraph build(int n, std::string* label = nullptr) const;
};

struct ExperimentConfig {
    std::vector<TopologySpec> topologies;
    std::vector<int> n_values;
    int k = 20;
    std::vector<int> l_values{1};
    std::vector<Method> methods;
    NoiseModel noise;
    bool mitigate = true;
    int shots = 10000;
    int repetitions = 10;
    int restarts = 8;
    std::uint64_t master_seed = 1;
    int threads = 0;  // 0 = hardware concurrency

    std::string out_dir = "out";
    bool csv = true;
    bool svg = false;
    bool dump_circuits = false;
    bool dump_plans = false;
    bool run_fidelity = false;
    int fidelity_elements = 200;
    int fidelity_shots = 256;
    bool fidelity_mitigate = true;

    std::vector<std::string> echoes;  // defaults applied during load

    void validate() const;
};

inline TopologySpec TopologySpec::parse(const std::string& text) {
    TopologySpec spec;
    std::string kind = text, dims;
    auto colon = text.find(':');
    if (colon != std::string::npos) {
        kind = text.substr(0, colon);
        dims = text.substr(colon + 1);
    }
    if (kind == "grid") spec.kind = GraphKind::Grid;
    else if (kind == "ring") spec.kind = GraphKind::Ring;
    else if (kind == "heavy_hex") spec.kind = GraphKind::HeavyHex;
    else throw std::invalid_argument("unknown topology kind: " + kind);

    if (!dims.empty() && dims != "auto") {
        spec.autosize = false;
        auto x = dims.find('x');
        if (spec.kind == GraphKind::Ring) {
            if (x != std::string::npos) throw std::invalid_argument("ring takes a single size");
            spec.a = std::stoi(dims);
        } else {
            if (x == std::string::npos)
                throw std::invalid_argument("expected ROWSxCOLS in: " + text);
            spec.a = std::stoi(dims.substr(0, x));
            spec.b = std::stoi(dims.substr(x + 1));
        }
    }
    return spec;
}

inline CouplingGraph TopologySpec::build(int n, std::string* label) const {
    auto named = [&](const std::string& name, CouplingGraph g) {
        if (label) *label = name;
        return g;
    };
    std::ostringstream name;
    switch (kind) {
        case GraphKind::Ring: {
            int size = autosize ? std::max(n, 3) : a;
            name << "ring:" << size;
            return named(name.str(), make_ring(size));
        }
        case GraphKind::Grid: {
            int rows = a, cols = b;
            if (autosize) {
                cols = 1;
                while (cols * cols < n) ++cols;
                rows = (n + cols - 1) / cols;
            }
            name << "grid:" << rows << "x" << cols;
            return named(name.str(), make_grid(rows, cols));
        }
        default: {
            int r = a, c = b;
            if (autosize) {
                r = c = 1;
                while (make_heavy_hex(r, c).node_count() < n) {
                    if (c <= r) ++c;
                    else ++r;
                }
            }
            name << "heavy_hex:" << r << "x" << c;
            return named(name.str(), make_heavy_hex(r, c));
        }
    }
}

inline void ExperimentConfig::validate() const {
    if (topologies.empty()) throw std::invalid_argument("topologies list is empty");
    if (n_values.empty()) throw std::invalid_argument("n_values list is empty");
    if (methods.empty()) throw std::invalid_argument("methods list is empty");
    if (l_values.empty()) throw std::invalid_argument("l_values list is empty");
    for (int l : l_values) {
        if (l == 2) throw std::invalid_argument("L=2 disallowed: votes must never tie");
        if (l < 1 || l % 2 == 0)
            throw std::invalid_argument("l_values entries must be odd and positive");
    }
    for (int n : n_values)
        if (n < 2) throw std::invalid_argument("n_values entries must be at least 2");
    if (k < 2) throw std::invalid_argument("k must be at least 2");
    if (repetitions < 1) throw std::invalid_argument("repetitions must be at least 1");
    if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    if (fidelity_elements < 1 || fidelity_shots < 1)
        throw std::invalid_argument("fidelity settings must be positive");
    noise.check();
    if (noise.p_ro >= 0.5) throw std::invalid_argument("p_ro must be below 0.5");
}

namespace detail {

inline std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(value);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

inline bool parse_bool(const std::string& v, int line_no) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("line " + std::to_string(line_no) + ": expected a boolean, got '" +
                                v + "'");
}

}  // namespace detail

// Flat `key = value` config with bracketed sections and comma-separated
// lists. Unknown keys are hard errors; omitted keys fall back to documented
// defaults, each echoed in cfg.echoes.
inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::string section, line;
    int line_no = 0;
    auto fail = [&](const std::string& msg) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++line_no;
        line = detail::trim(line);
        if (line.empty() || line[0] == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail("unterminated section header");
            section = line.substr(1, line.size() - 2);
            if (section != "experiment" && section != "noise" && section != "output")
                fail("unknown section [" + section + "]");
            continue;
        }
        auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        std::string key = detail::trim(line.substr(0, eq));
        std::string value = detail::trim(line.substr(eq + 1));
        std::string full = section + "." + key;
        if (!seen.insert(full).second) fail("duplicate key " + full);

        try {
            if (full == "experiment.topologies") {
                for (const auto& item : detail::split_list(value))
                    cfg.topologies.push_back(TopologySpec::parse(item));
            } else if (full == "experiment.n_values") {
                for (const auto& item : detail::split_list(value))
                    cfg.n_values.push_back(std::stoi(item));
            } else if (full == "experiment.k") {
                cfg.k = std::stoi(value);
            } else if (full == "experiment.l_values") {
                cfg.l_values.clear();
                for (const auto& item : detail::split_list(value))
                    cfg.l_values.push_back(std::stoi(item));
            } else if (full == "experiment.methods") {
                for (const auto& item : detail::split_list(value)) {
                    if (item == "unitary") cfg.methods.push_back(Method::Unitary);
                    else if (item == "line_dynamic") cfg.methods.push_back(Method::LineDynamic);
                    else if (item == "group_mv") cfg.methods.push_back(Method::GroupMV);
                    else fail("unknown method '" + item + "'");
                }
            } else if (full == "experiment.shots") {
                cfg.shots = std::stoi(value);
            } else if (full == "experiment.repetitions") {
                cfg.repetitions = std::stoi(value);
            } else if (full == "experiment.restarts") {
                cfg.restarts = std::stoi(value);
            } else if (full == "experiment.master_seed") {
                cfg.master_seed = std::stoull(value);
            } else if (full == "experiment.threads") {
                cfg.threads = std::stoi(value);
            } else if (full == "noise.enabled") {
                cfg.noise.enabled = detail::parse_bool(value, line_no);
            } else if (full == "noise.p_1q") {
                cfg.noise.p_1q = std::stod(value);
            } else if (full == "noise.p_2q") {
                cfg.noise.p_2q = std::stod(value);
            } else if (full == "noise.p_ro") {
                cfg.noise.p_ro = std::stod(value);
            } else if (full == "noise.reset_reads_noisy") {
                cfg.noise.reset_reads_noisy = detail::parse_bool(value, line_no);
            } else if (full == "noise.mitigate") {
                cfg.mitigate = detail::parse_bool(value, line_no);
            } else if (full == "output.dir") {
                cfg.out_dir = value;
            } else if (full == "output.csv") {
                cfg.csv = detail::parse_bool(value, line_no);
            } else if (full == "output.svg") {
                cfg.svg = detail::parse_bool(value, line_no);
            } else if (full == "output.dump_circuits") {
                cfg.dump_circuits = detail::parse_bool(value, line_no);
            } else if (full == "output.dump_plans") {
                cfg.dump_plans = detail::parse_bool(value, line_no);
            } else if (full == "output.run_fidelity") {
                cfg.run_fidelity = detail::parse_bool(value, line_no);
            } else if (full == "output.fidelity_elements") {
                cfg.fidelity_elements = std::stoi(value);
            } else if (full == "output.fidelity_shots") {
                cfg.fidelity_shots = std::stoi(value);
            } else if (full == "output.fidelity_mitigate") {
                cfg.fidelity_mitigate = detail::parse_bool(value, line_no);
            } else {
                fail("unknown key '" + full + "'");
            }
        } catch (const std::exception& e) {
            std::string msg = e.what();
            if (msg.rfind("line ", 0) == 0) throw;
            fail("cannot parse value '" + value + "' for " + full + " (" + msg + ")");
        }
    }

    auto echo_default = [&](const std::string& key, const std::string& val) {
        if (!seen.count(key)) cfg.echoes.push_back(key + " defaulted to " + val);
    };
    echo_default("experiment.shots", "10000");
    echo_default("experiment.repetitions", "10");
    echo_default("experiment.restarts", "8");
    echo_default("experiment.k", "20");
    echo_default("experiment.l_values", "1");
    echo_default("experiment.master_seed", "1");

    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace groupmv
