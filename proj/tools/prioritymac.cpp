#include "prioritymac/config.hpp"
#include "prioritymac/scenario.hpp"
#include "prioritymac/sweep.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace pmac;

namespace {

int run_simulate(const std::string& protocol, std::uint32_t urgent, std::optional<std::uint32_t> frag,
                 std::uint64_t seed, const std::string& duration, const std::string& out, bool trace,
                 const std::string& config_path, const std::string& preset) {
    SweepConfig cfg = config_path.empty() ? SweepConfig{} : build_sweep_config(load_config_file(config_path));
    apply_entry(cfg, "protocol", protocol);
    apply_entry(cfg, "urgent_nodes", std::to_string(urgent));
    if (frag) {
        apply_entry(cfg, "frag_size", std::to_string(*frag));
    }
    apply_entry(cfg, "duration_s", duration);
    if (preset != "base" && preset != "stress") {
        throw ValidationError("preset", "expected base or stress");
    }
    Scenario s = apply_preset(cfg.base, preset == "stress" ? Preset::Stress : Preset::Base, cfg);

    std::ofstream trace_file;
    if (trace) {
        trace_file.open(out + ".trace", std::ios::binary);
        trace_file << "time_us,seq,target,kind\n";
    }
    const RunOutput run = run_scenario(s, seed, trace ? &trace_file : nullptr);

    std::ofstream csv(out, std::ios::binary);
    if (!csv) {
        throw ConfigError("cannot write '" + out + "'");
    }
    write_csv_header(csv);
    write_csv_rows(csv, run.result);

    std::ofstream manifest(out + ".manifest", std::ios::binary);
    manifest << "command = simulate\npreset = " << preset << "\nseed = " << seed << "\n";
    for (const auto& [k, v] : describe(cfg)) {
        if (k == "seeds" || k == "urgent_points" || k == "frag_points" || k == "threads") {
            continue;
        }
        manifest << k << " = " << v << "\n";
    }
    manifest << "events = " << run.events << "\nconserved = " << (run.conserved ? "true" : "false") << "\n";

    const auto& u = run.result.of(PriorityClass::Urgent);
    const auto& n = run.result.of(PriorityClass::Normal);
    std::cout << run.result.key.scenario_id << " seed " << seed << ": urgent " << u.delivered << "/" << u.generated
              << " delivered, normal " << n.delivered << "/" << n.generated << " delivered, " << run.events
              << " events\n";
    return run.conserved ? 0 : 3;
}

int run_sweep(int figure, const std::string& config_path, const std::string& out_dir) {
    const SweepConfig cfg = build_sweep_config(load_config_file(config_path));
    const FigureResults results = run_figure(figure, cfg);
    for (const auto& path : write_figure(figure, results, cfg, out_dir)) {
        std::cout << path.string() << "\n";
    }
    return 0;
}

int run_validate(const std::string& config_path) {
    const SweepConfig cfg = build_sweep_config(load_config_file(config_path));
    validate(cfg.base);
    for (int figure = 3; figure <= 5; ++figure) {
        plan_figure(figure, Preset::Base, cfg);
        plan_figure(figure, Preset::Stress, cfg);
    }
    for (const auto& [k, v] : describe(cfg)) {
        std::cout << k << " = " << v << "\n";
    }
    std::cout << "OK\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Priority MAC simulator: SS-MAC vs. FROG-MAC on a single-hop star"};
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Run one scenario for one seed");
    std::string protocol;
    std::uint32_t urgent = 0;
    std::optional<std::uint32_t> frag;
    std::uint64_t seed = 1;
    std::string duration = "5000";
    std::string out;
    bool trace = false;
    std::string sim_config;
    std::string preset = "base";
    sim->add_option("--protocol", protocol, "ssmac or frogmac")->required()->check(CLI::IsMember({"ssmac", "frogmac"}));
    sim->add_option("--urgent-nodes", urgent, "Number of urgent-transmitting sensors")->required();
    sim->add_option("--frag-size", frag, "FROG-MAC fragment payload size in bytes");
    sim->add_option("--seed", seed, "RNG seed");
    sim->add_option("--duration-s", duration, "Simulated seconds");
    sim->add_option("--out", out, "CSV output path")->required();
    sim->add_flag("--trace", trace, "Write the event trace to <out>.trace");
    sim->add_option("--config", sim_config, "Optional key = value parameter file");
    sim->add_option("--preset", preset, "base or stress");

    auto* sweep = app.add_subcommand("sweep", "Run a figure sweep");
    int figure = 3;
    std::string sweep_config;
    std::string out_dir;
    sweep->add_option("--figure", figure, "3, 4 or 5")->required()->check(CLI::IsMember({3, 4, 5}));
    sweep->add_option("--config", sweep_config, "key = value parameter file")->required();
    sweep->add_option("--out-dir", out_dir, "Output directory")->required();

    auto* val = app.add_subcommand("validate", "Check a parameter file");
    std::string val_config;
    val->add_option("--config", val_config, "key = value parameter file")->required();

    CLI11_PARSE(app, argc, argv);
    try {
        if (sim->parsed()) {
            return run_simulate(protocol, urgent, frag, seed, duration, out, trace, sim_config, preset);
        }
        if (sweep->parsed()) {
            return run_sweep(figure, sweep_config, out_dir);
        }
        return run_validate(val_config);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const FatalError& e) {
        std::cerr << "fatal: " << e.what() << "\n";
        return 4;
    }
}
