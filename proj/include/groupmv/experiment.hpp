#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "groupmv/analysis.hpp"
#include "groupmv/config.hpp"
#include "groupmv/parallel.hpp"
#include "groupmv/partition.hpp"
#include "groupmv/sim.hpp"
#include "groupmv/synth.hpp"

namespace groupmv {

struct ResultRow {
    std::string topology;
    int n = 0;
    std::string method;
    int l_requested = 1;
    int min_l_eff = 1;
    double w_mean = 0.0;
    double w_std = 0.0;
    std::optional<double> f_mean;
    std::optional<double> f_std;
    int two_qubit_depth = 0;
    int total_depth = 0;
    int cx_count = 0;
    int measure_count = 0;
    bool degraded = false;
    std::uint64_t seed = 0;
    std::string error;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

struct PointSpec {
    TopologySpec topo;
    int n = 0;
    Method method = Method::Unitary;
    int l = 1;

    // Seeds derive from the point's content so dropping one config point
    // never shifts another point's randomness.
    std::string label(const std::string& topo_label) const {
        std::ostringstream out;
        out << topo_label << "|n" << n << "|" << to_string(method) << "|l" << l;
        return out.str();
    }
};

}  // namespace detail

// One sweep point: synthesize once, then repeat the witness (and optional
// fidelity) measurement `repetitions` times with derived seeds.
inline ResultRow run_point(const ExperimentConfig& cfg, const TopologySpec& topo, int n,
                           Method method, int l) {
    std::string topo_label;
    CouplingGraph g = topo.build(n, &topo_label);

    detail::PointSpec point{topo, n, method, l};
    const std::string label = point.label(topo_label);
    const std::uint64_t point_seed = derive_seed(cfg.master_seed, detail::fnv1a(label));

    ResultRow row;
    row.topology = topo_label;
    row.n = n;
    row.method = to_string(method);
    row.l_requested = l;
    row.seed = point_seed;

    try {
        SynthRequest req{&g, n, cfg.k, l, method, cfg.restarts, point_seed};
        auto res = randomized_search(req);
        auto depth = res.circuit.depth();
        row.min_l_eff = res.plan.min_l_eff();
        row.degraded = res.stats.degraded;
        row.two_qubit_depth = depth.two_qubit_depth;
        row.total_depth = depth.total_depth;
        row.cx_count = depth.cx_count;
        row.measure_count = depth.measure_count;

        std::vector<double> w_values(cfg.repetitions);
        std::vector<double> f_values;
        if (cfg.run_fidelity) f_values.resize(cfg.repetitions);
        for (int rep = 0; rep < cfg.repetitions; ++rep) {
            auto z = run_shots(res.circuit, cfg.noise, MeasureBasis::Z, cfg.shots,
                               derive_seed(point_seed, 100 + rep, 0));
            auto x = run_shots(res.circuit, cfg.noise, MeasureBasis::X, cfg.shots,
                               derive_seed(point_seed, 100 + rep, 1));
            w_values[rep] = estimate_witness(z, x, cfg.noise, cfg.mitigate).w;
            if (cfg.run_fidelity)
                f_values[rep] = estimate_fidelity(res.circuit, cfg.noise, cfg.fidelity_elements,
                                                  cfg.fidelity_shots,
                                                  derive_seed(point_seed, 200 + rep),
                                                  cfg.fidelity_mitigate)
                                    .f;
        }
        auto w_agg = aggregate(w_values);
        row.w_mean = w_agg.mean;
        row.w_std = w_agg.std_dev;
        if (cfg.run_fidelity) {
            auto f_agg = aggregate(f_values);
            row.f_mean = f_agg.mean;
            row.f_std = f_agg.std_dev;
        }

        if (cfg.dump_circuits || cfg.dump_plans) {
            std::filesystem::create_directories(cfg.out_dir);
            std::string base = label;
            std::replace(base.begin(), base.end(), '|', '_');
            std::replace(base.begin(), base.end(), ':', '-');
            if (cfg.dump_circuits) {
                std::ofstream out(cfg.out_dir + "/circuit_" + base + ".txt");
                out << res.circuit.to_text();
            }
            if (cfg.dump_plans) {
                std::ofstream out(cfg.out_dir + "/plan_" + base + ".txt");
                out << res.plan.to_text();
            }
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    return row;
}

// Full (topology x N x method x L) sweep. L applies to Group-MV only; the
// baselines run once per (topology, N) with their intrinsic single link.
inline std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    struct Job {
        TopologySpec topo;
        int n;
        Method method;
        int l;
    };
    std::vector<Job> jobs;
    for (const auto& topo : cfg.topologies)
        for (int n : cfg.n_values)
            for (Method method : cfg.methods) {
                if (method == Method::GroupMV)
                    for (int l : cfg.l_values) jobs.push_back({topo, n, method, l});
                else
                    jobs.push_back({topo, n, method, 1});
            }

    std::vector<ResultRow> rows(jobs.size());
    parallel_for(jobs.size(), effective_threads(cfg.threads), [&](std::size_t i) {
        rows[i] = run_point(cfg, jobs[i].topo, jobs[i].n, jobs[i].method, jobs[i].l);
    });
    return rows;
}

inline void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ostringstream out;
    out << "topology,n,method,l_requested,min_l_eff,w_mean,w_std,f_mean,f_std,"
           "two_qubit_depth,total_depth,cx_count,measure_count,degraded,seed,error\n";
    for (const auto& r : rows) {
        std::string error = r.error;
        std::replace(error.begin(), error.end(), ',', ';');
        std::replace(error.begin(), error.end(), '\n', ' ');
        out << r.topology << "," << r.n << "," << r.method << "," << r.l_requested << ","
            << r.min_l_eff << "," << detail::format_double(r.w_mean) << ","
            << detail::format_double(r.w_std) << ","
            << (r.f_mean ? detail::format_double(*r.f_mean) : "") << ","
            << (r.f_std ? detail::format_double(*r.f_std) : "") << "," << r.two_qubit_depth
            << "," << r.total_depth << "," << r.cx_count << "," << r.measure_count << ","
            << (r.degraded ? 1 : 0) << "," << r.seed << "," << error << "\n";
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write CSV file: " + path);
    file << out.str();
    if (!file) throw std::runtime_error("write failed: " + path);
}

namespace detail {

struct Series {
    std::string name;
    std::string color;
    std::vector<std::array<double, 3>> points;  // n, mean, std
};

// Hand-emitted SVG: witness vs N with error bars, one polyline per
// (method, L) series.
inline std::string render_witness_svg(const std::string& topology,
                                      const std::vector<Series>& series) {
    const double width = 640, height = 480;
    const double ml = 70, mr = 190, mt = 40, mb = 60;
    double x_min = 1e300, x_max = -1e300, y_min = 0.0, y_max = 1.0;
    for (const auto& s : series)
        for (const auto& p : s.points) {
            x_min = std::min(x_min, p[0]);
            x_max = std::max(x_max, p[0]);
            y_max = std::max(y_max, p[1] + p[2]);
        }
    if (x_min >= x_max) {
        x_min -= 1;
        x_max += 1;
    }
    y_max = std::max(y_max, 1.0) * 1.05;
    auto sx = [&](double v) { return ml + (v - x_min) / (x_max - x_min) * (width - ml - mr); };
    auto sy = [&](double v) { return height - mb - (v - y_min) / (y_max - y_min) * (height - mt - mb); };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << ml << "\" y=\"24\" font-size=\"16\">GHZ witness, " << topology
        << "</text>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << sy(y_min) << "\" x2=\"" << width - mr
        << "\" y2=\"" << sy(y_min) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << ml << "\" y1=\"" << sy(y_min) << "\" x2=\"" << ml << "\" y2=\""
        << sy(y_max) << "\" stroke=\"black\"/>\n";
    for (double ty = 0.0; ty <= y_max; ty += 0.25) {
        out << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(ty) << "\" x2=\"" << ml << "\" y2=\""
            << sy(ty) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << ml - 10 << "\" y=\"" << sy(ty) + 4
            << "\" font-size=\"11\" text-anchor=\"end\">" << format_double(ty) << "</text>\n";
    }
    // witness certification threshold
    out << "<line x1=\"" << ml << "\" y1=\"" << sy(0.5) << "\" x2=\"" << width - mr
        << "\" y2=\"" << sy(0.5) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";

    std::set<double> xs;
    for (const auto& s : series)
        for (const auto& p : s.points) xs.insert(p[0]);
    for (double tx : xs) {
        out << "<line x1=\"" << sx(tx) << "\" y1=\"" << sy(y_min) << "\" x2=\"" << sx(tx)
            << "\" y2=\"" << sy(y_min) + 4 << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << sx(tx) << "\" y=\"" << sy(y_min) + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << static_cast<int>(tx)
            << "</text>\n";
    }
    out << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 20
        << "\" font-size=\"13\" text-anchor=\"middle\">qubit count N</text>\n";

    double legend_y = mt + 10;
    for (const auto& s : series) {
        std::ostringstream line;
        bool first = true;
        for (const auto& p : s.points) {
            line << (first ? "" : " ") << sx(p[0]) << "," << sy(p[1]);
            first = false;
            out << "<line x1=\"" << sx(p[0]) << "\" y1=\"" << sy(p[1] - p[2]) << "\" x2=\""
                << sx(p[0]) << "\" y2=\"" << sy(p[1] + p[2]) << "\" stroke=\"" << s.color
                << "\"/>\n";
            out << "<circle cx=\"" << sx(p[0]) << "\" cy=\"" << sy(p[1]) << "\" r=\"3\" fill=\""
                << s.color << "\"/>\n";
        }
        out << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << s.color
            << "\" stroke-width=\"1.5\"/>\n";
        out << "<rect x=\"" << width - mr + 12 << "\" y=\"" << legend_y - 9
            << "\" width=\"12\" height=\"12\" fill=\"" << s.color << "\"/>\n";
        out << "<text x=\"" << width - mr + 30 << "\" y=\"" << legend_y + 2
            << "\" font-size=\"12\">" << s.name << "</text>\n";
        legend_y += 20;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace detail

// One SVG per topology under `dir`; returns the written paths.
inline std::vector<std::string> emit_plot(const std::vector<ResultRow>& rows,
                                          const std::string& dir) {
    if (rows.empty()) throw std::invalid_argument("no rows to plot");
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                    "#9467bd", "#8c564b"};
    std::map<std::string, std::map<std::string, detail::Series>> by_topology;
    for (const auto& r : rows) {
        if (!r.error.empty()) continue;
        std::ostringstream name;
        name << r.method;
        if (r.method == "group_mv") name << " L=" << r.l_requested;
        auto& series = by_topology[r.topology][name.str()];
        series.name = name.str();
        series.points.push_back({static_cast<double>(r.n), r.w_mean, r.w_std});
    }
    std::filesystem::create_directories(dir);
    std::vector<std::string> written;
    for (auto& [topo, series_map] : by_topology) {
        std::vector<detail::Series> series;
        int color = 0;
        for (auto& [name, s] : series_map) {
            std::sort(s.points.begin(), s.points.end());
            s.color = palette[color++ % 6];
            series.push_back(s);
        }
        std::string base = topo;
        std::replace(base.begin(), base.end(), ':', '-');
        std::string path = dir + "/witness_" + base + ".svg";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write SVG file: " + path);
        out << detail::render_witness_svg(topo, series);
        written.push_back(path);
    }
    return written;
}

struct PartitionDemoResult {
    std::string topology;
    GroupPlan plan;
    double wall_ms = 0.0;
    int restarts_used = 0;
};

// Partition + link planning without any simulation; exercises the
// scalability path standalone.
inline PartitionDemoResult run_partition_demo(const TopologySpec& topo, int n, int k, int l,
                                              std::uint64_t seed, int restarts = 8) {
    auto t0 = std::chrono::steady_clock::now();
    PartitionDemoResult demo;
    CouplingGraph g = topo.build(n, &demo.topology);
    int center = graph_center(g);
    auto sel = bfs_select(g, center, n);

    std::optional<GroupPlan> best;
    for (int r = 0; r < restarts; ++r) {
        std::uint64_t seed_r = derive_seed(seed, r);
        auto groups = partition_groups(sel, k, derive_seed(seed_r, 1));
        auto plan = plan_links(groups, g, center, l, derive_seed(seed_r, 2));
        demo.restarts_used = r + 1;
        if (!best || plan.min_l_eff() > best->min_l_eff()) best = std::move(plan);
        if (best->min_l_eff() >= l) break;
    }
    demo.plan = std::move(*best);
    demo.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                             t0)
                       .count();
    return demo;
}

}  // namespace groupmv
