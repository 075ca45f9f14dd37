#pragma once

#include "prioritymac/config.hpp"
#include "prioritymac/svg_plot.hpp"

#include <filesystem>
#include <functional>
#include <span>
#include <vector>

namespace pmac {

enum class Preset { Base, Stress };

std::string_view to_string(Preset p);

Scenario apply_preset(Scenario scenario, Preset preset, const SweepConfig& config);

struct SweepPoint {
    Scenario scenario;
    std::uint64_t seed = 0;
};

/// Every (protocol, n_urgent[, frag_size], seed) point of a figure. fig3 and
/// fig5 use the base frag_size; fig4 crosses frag_points.
std::vector<SweepPoint> plan_figure(int figure, Preset preset, const SweepConfig& config);

using RunObserver = std::function<void(const SweepPoint&, const RunOutput&)>;

/// Runs the points (concurrently when threads != 1) and returns results in
/// scenario key order. The observer is called once per run, serialized.
std::vector<ScenarioResult> run_points(std::span<const SweepPoint> points, unsigned threads,
                                       const RunObserver& observer = {});

bool key_less(const ScenarioKey& a, const ScenarioKey& b);

/// Seed-averaged value of one class metric per (protocol, n_urgent, frag_size).
struct CurvePoint {
    Protocol protocol;
    std::uint32_t n_urgent;
    std::uint32_t frag_size;
    double mean;
    double min;
    double max;
    std::size_t samples;
};

enum class Measure { UrgentMeanDelay, UrgentLossRate, AllLossRate };

std::vector<CurvePoint> summarize(std::span<const ScenarioResult> results, Measure measure);

struct FigureResults {
    std::vector<ScenarioResult> base;
    std::vector<ScenarioResult> stress;
};

FigureResults run_figure(int figure, const SweepConfig& config);

/// figN.csv, figN_stress.csv, figN.svg, figN_stress.svg and manifest.txt.
std::vector<std::filesystem::path> write_figure(int figure, const FigureResults& results, const SweepConfig& config,
                                                const std::filesystem::path& out_dir);

LineChart figure_chart(int figure, Preset preset, std::span<const ScenarioResult> results);

}  // namespace pmac
