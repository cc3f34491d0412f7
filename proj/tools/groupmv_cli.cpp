// Command-line front end: experiment sweeps, the partitioning demo, single
// circuit synthesis, and the simulator self-test.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "groupmv/dense.hpp"
#include "groupmv/experiment.hpp"

using namespace groupmv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitRuntimeError = 2;

int cmd_sweep(const std::string& config_path) {
    ExperimentConfig cfg = load_config(config_path);
    for (const auto& echo : cfg.echoes) std::cout << "config: " << echo << "\n";

    auto t0 = std::chrono::steady_clock::now();
    auto rows = run_sweep(cfg);
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.csv) {
        std::string path = cfg.out_dir + "/results.csv";
        emit_csv(rows, path);
        std::cout << "wrote " << path << "\n";
    }
    if (cfg.svg)
        for (const auto& path : emit_plot(rows, cfg.out_dir)) std::cout << "wrote " << path << "\n";

    int failures = 0;
    for (const auto& r : rows) {
        std::cout << r.topology << " n=" << r.n << " " << r.method << " L=" << r.l_requested
                  << (r.degraded ? " (degraded)" : "");
        if (r.error.empty()) {
            std::cout << " w=" << detail::format_double(r.w_mean) << " +/- "
                      << detail::format_double(r.w_std);
            if (r.f_mean)
                std::cout << " f=" << detail::format_double(*r.f_mean) << " +/- "
                          << detail::format_double(*r.f_std);
        } else {
            std::cout << " ERROR: " << r.error;
            ++failures;
        }
        std::cout << "\n";
    }
    std::cout << rows.size() << " points in " << detail::format_double(secs) << " s, "
              << failures << " failed\n";
    return kExitOk;
}

int cmd_partition_demo(const std::string& topology, int n, int k, int l, std::uint64_t seed,
                       int restarts, const std::string& dump_path) {
    auto spec = TopologySpec::parse(topology);
    auto demo = run_partition_demo(spec, n, k, l, seed, restarts);

    std::cout << "topology " << demo.topology << ", N=" << n << ", K=" << k << ", L=" << l
              << "\n";
    std::cout << "groups " << demo.plan.groups.size() << " sizes:";
    for (const auto& grp : demo.plan.groups) std::cout << " " << grp.size();
    std::cout << "\n";
    for (const auto& e : demo.plan.tree_edges)
        std::cout << "tree edge " << e.first << " -> " << e.second
                  << " l_eff=" << demo.plan.l_eff.at(e) << "\n";
    if (demo.plan.degraded())
        std::cout << "degraded: requested L=" << l << ", supported min l_eff="
                  << demo.plan.min_l_eff() << "\n";
    std::cout << "wall time " << detail::format_double(demo.wall_ms) << " ms over "
              << demo.restarts_used << " restart(s)\n";
    if (!dump_path.empty()) {
        std::ofstream out(dump_path);
        if (!out) throw std::runtime_error("cannot write " + dump_path);
        out << demo.plan.to_text();
        std::cout << "wrote " << dump_path << "\n";
    }
    return kExitOk;
}

int cmd_synth(const std::string& topology, int n, int k, int l, const std::string& method_name,
              std::uint64_t seed, int restarts, const std::string& out_path) {
    auto spec = TopologySpec::parse(topology);
    Method method;
    if (method_name == "unitary") method = Method::Unitary;
    else if (method_name == "line_dynamic") method = Method::LineDynamic;
    else if (method_name == "group_mv") method = Method::GroupMV;
    else throw CLI::ValidationError("--method", "unknown method " + method_name);

    std::string label;
    CouplingGraph g = spec.build(n, &label);
    SynthRequest req{&g, n, k, l, method, restarts, seed};
    auto res = randomized_search(req);
    auto depth = res.circuit.depth();

    std::cout << "topology " << label << ", method " << method_name << ", N=" << n << "\n";
    std::cout << "two_qubit_depth " << depth.two_qubit_depth << ", total_depth "
              << depth.total_depth << ", cx_count " << depth.cx_count << ", measure_count "
              << depth.measure_count << "\n";
    if (res.stats.degraded)
        std::cout << "degraded: min l_eff=" << res.plan.min_l_eff() << "\n";
    if (out_path.empty()) {
        std::cout << res.circuit.to_text();
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << res.circuit.to_text();
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

// Oracle cross-checks runnable in seconds; a quick health check of the
// simulator stack.
int cmd_selftest() {
    int failures = 0;
    auto report = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "PASS" : "FAIL") << " " << name << "\n";
        if (!ok) ++failures;
    };

    {
        bool ok = true;
        std::vector<std::pair<std::string, CouplingGraph>> graphs;
        graphs.emplace_back("grid", make_grid(2, 3));
        graphs.emplace_back("ring", make_ring(6));
        graphs.emplace_back("heavy_hex", make_heavy_hex(1, 1));
        for (auto& [name, g] : graphs)
            for (Method m : {Method::Unitary, Method::LineDynamic, Method::GroupMV}) {
                SynthRequest req{&g, 6, 3, 1, m, 2, 77};
                auto res = randomized_search(req);
                for (const auto& br : DenseOracle::enumerate_branches(res.circuit))
                    ok &= std::abs(DenseOracle::ghz_overlap(br.state) - 1.0) < 1e-10;
            }
        report("exactness: every outcome branch prepares GHZ (n=6)", ok);
    }
    {
        // Tableau histogram vs dense branch probabilities.
        bool ok = true;
        Rng rng = make_rng(123);
        for (int trial = 0; trial < 5; ++trial) {
            DynamicCircuit c;
            c.num_qubits = 4;
            for (int step = 0; step < 12; ++step) {
                int q = uniform_int(rng, 4);
                switch (uniform_int(rng, 5)) {
                    case 0: c.append(Operation::h(q)); break;
                    case 1: c.append(Operation::s(q)); break;
                    case 2: c.append(Operation::x(q)); break;
                    case 3: {
                        int t = uniform_int(rng, 4);
                        if (t != q) c.append(Operation::cx(q, t));
                        break;
                    }
                    default: c.append(Operation::measure(q, c.alloc_clbit())); break;
                }
            }
            auto dense = DenseOracle::distribution(with_final_measurement(c, MeasureBasis::Z));
            NoiseModel nm;
            const int shots = 20000;
            auto records = run_shots(c, nm, MeasureBasis::Z, shots, derive_seed(9, trial));
            std::map<std::string, double> hist;
            for (const auto& rec : records) {
                std::string key;
                for (auto b : rec.mid_bits) key.push_back('0' + b);
                for (auto b : rec.final_bits) key.push_back('0' + b);
                hist[key] += 1.0 / shots;
            }
            double tvd = 0.0;
            for (const auto& [k, p] : dense)
                tvd += std::abs(p - (hist.count(k) ? hist.at(k) : 0.0));
            for (const auto& [k, p] : hist)
                if (!dense.count(k)) tvd += p;
            ok &= tvd / 2.0 < 0.02;
        }
        report("tableau vs dense oracle: TVD < 0.02 on random circuits", ok);
    }
    {
        Histogram counts{{{0}, 9500.0}, {{1}, 500.0}};
        auto quasi = mitigate_readout(counts, 0.05);
        bool ok = std::abs(quasi.at({0}) - 1.0) < 1e-6 && std::abs(quasi.at({1})) < 1e-6;
        report("readout mitigation: exact single-qubit inversion", ok);
    }

    std::cout << (failures == 0 ? "selftest passed" : "selftest FAILED") << "\n";
    return failures == 0 ? kExitOk : kExitRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Group-majority-voting GHZ preparation: synthesis, simulation, evaluation"};
    app.require_subcommand(1);

    std::string config_path;
    auto* sweep = app.add_subcommand("sweep", "run the experiment sweep from a config file");
    sweep->add_option("config", config_path, "config file")->required();

    std::string topology = "heavy_hex";
    int n = 40, k = 20, l = 3, restarts = 8;
    std::uint64_t seed = 1;
    std::string dump_path, out_path, method = "group_mv";

    auto* demo = app.add_subcommand("partition-demo",
                                    "partition and plan links without simulating");
    demo->add_option("--topology", topology, "kind[:dims], e.g. heavy_hex:15x15 or grid:5x8");
    demo->add_option("--n", n, "qubit count")->required();
    demo->add_option("--k", k, "target group size");
    demo->add_option("--l", l, "requested boundary redundancy (odd)");
    demo->add_option("--seed", seed, "master seed");
    demo->add_option("--restarts", restarts, "partition restarts");
    demo->add_option("--dump", dump_path, "write the plan dump to this file");

    auto* synth = app.add_subcommand("synth", "synthesize one circuit and dump it");
    synth->add_option("--topology", topology, "kind[:dims]");
    synth->add_option("--n", n, "qubit count")->required();
    synth->add_option("--k", k, "target group size");
    synth->add_option("--l", l, "requested boundary redundancy (odd)");
    synth->add_option("--method", method, "unitary | line_dynamic | group_mv");
    synth->add_option("--seed", seed, "master seed");
    synth->add_option("--restarts", restarts, "search restarts");
    synth->add_option("--out", out_path, "write the circuit text here instead of stdout");

    auto* selftest = app.add_subcommand("selftest", "run oracle cross-checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(config_path);
        if (demo->parsed()) return cmd_partition_demo(topology, n, k, l, seed, restarts, dump_path);
        if (synth->parsed()) return cmd_synth(topology, n, k, l, method, seed, restarts, out_path);
        if (selftest->parsed()) return cmd_selftest();
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
