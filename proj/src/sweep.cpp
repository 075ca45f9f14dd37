#include "prioritymac/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace pmac {

std::string_view to_string(Preset p) { return p == Preset::Base ? "base" : "stress"; }

Scenario apply_preset(Scenario scenario, Preset preset, const SweepConfig& config) {
    if (preset == Preset::Stress) {
        scenario.traffic.urgent_interval = config.stress_urgent_interval;
        scenario.traffic.urgent_deadline = config.stress_urgent_deadline;
    }
    return scenario;
}

std::vector<SweepPoint> plan_figure(int figure, Preset preset, const SweepConfig& config) {
    if (figure < 3 || figure > 5) {
        throw ConfigError("figure must be 3, 4 or 5");
    }
    const Scenario base = apply_preset(config.base, preset, config);
    const std::vector<std::uint32_t> frags =
        figure == 4 ? config.frag_points : std::vector<std::uint32_t>{base.frog.frag_size};
    std::vector<SweepPoint> points;
    for (Protocol protocol : {Protocol::SsMac, Protocol::FrogMac}) {
        for (std::uint32_t n : config.urgent_points) {
            for (std::uint32_t f : frags) {
                Scenario s = base;
                s.protocol = protocol;
                s.n_urgent = n;
                s.frog.frag_size = f;
                s.id = "fig" + std::to_string(figure) + "-" + std::string(to_string(preset)) + "-" +
                       std::string(to_string(protocol)) + "-u" + std::to_string(n) + "-f" + std::to_string(f);
                validate(s);
                for (std::uint64_t seed : config.seeds) {
                    points.push_back({s, seed});
                }
            }
        }
    }
    return points;
}

bool key_less(const ScenarioKey& a, const ScenarioKey& b) {
    return std::tie(a.protocol, a.n_urgent, a.frag_size, a.seed, a.scenario_id) <
           std::tie(b.protocol, b.n_urgent, b.frag_size, b.seed, b.scenario_id);
}

std::vector<ScenarioResult> run_points(std::span<const SweepPoint> points, unsigned threads,
                                       const RunObserver& observer) {
    std::vector<ScenarioResult> results(points.size());
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(points.size(), 1)));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            try {
                RunOutput run = run_scenario(points[i].scenario, points[i].seed);
                if (observer) {
                    std::lock_guard lock(mutex);
                    observer(points[i], run);
                }
                results[i] = std::move(run.result);
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    std::sort(results.begin(), results.end(),
              [](const ScenarioResult& a, const ScenarioResult& b) { return key_less(a.key, b.key); });
    return results;
}

std::vector<CurvePoint> summarize(std::span<const ScenarioResult> results, Measure measure) {
    std::map<std::tuple<Protocol, std::uint32_t, std::uint32_t>, std::vector<double>> groups;
    for (const ScenarioResult& r : results) {
        double v = 0;
        if (measure == Measure::UrgentMeanDelay) {
            const auto& mean = r.of(PriorityClass::Urgent).mean_delay_us;
            if (!mean) {
                continue;
            }
            v = *mean;
        } else if (measure == Measure::UrgentLossRate) {
            v = r.of(PriorityClass::Urgent).loss_rate();
        } else {
            const auto& u = r.of(PriorityClass::Urgent);
            const auto& n = r.of(PriorityClass::Normal);
            const auto gen = u.generated + n.generated;
            v = gen == 0 ? 0.0 : static_cast<double>(u.dropped() + n.dropped()) / static_cast<double>(gen);
        }
        groups[{r.key.protocol, r.key.n_urgent, r.key.frag_size}].push_back(v);
    }
    std::vector<CurvePoint> out;
    for (const auto& [k, vs] : groups) {
        double sum = 0;
        for (double v : vs) {
            sum += v;
        }
        const auto [lo, hi] = std::minmax_element(vs.begin(), vs.end());
        out.push_back({std::get<0>(k), std::get<1>(k), std::get<2>(k), sum / static_cast<double>(vs.size()), *lo, *hi,
                       vs.size()});
    }
    return out;
}

FigureResults run_figure(int figure, const SweepConfig& config) {
    FigureResults out;
    const auto base = plan_figure(figure, Preset::Base, config);
    const auto stress = plan_figure(figure, Preset::Stress, config);
    out.base = run_points(base, config.threads);
    out.stress = run_points(stress, config.threads);
    return out;
}

LineChart figure_chart(int figure, Preset preset, std::span<const ScenarioResult> results) {
    LineChart chart;
    const std::string suffix = preset == Preset::Stress ? " (stress preset)" : "";
    const Measure measure = figure == 5 ? Measure::UrgentLossRate : Measure::UrgentMeanDelay;
    const auto curve = summarize(results, measure);
    const double scale = measure == Measure::UrgentMeanDelay ? 1e-3 : 1.0;
    if (figure == 3) {
        chart.title = "Urgent delay vs. urgent nodes" + suffix;
    } else if (figure == 4) {
        chart.title = "Urgent delay vs. fragment size" + suffix;
        chart.log_x = true;
    } else {
        chart.title = "Urgent packet loss vs. urgent nodes" + suffix;
    }
    chart.x_label = figure == 4 ? "fragment size (bytes)" : "urgent nodes (count)";
    chart.y_label = measure == Measure::UrgentMeanDelay ? "mean urgent delay (ms)" : "urgent loss rate (fraction)";

    std::map<std::pair<Protocol, std::uint32_t>, PlotSeries> series;
    for (const CurvePoint& p : curve) {
        std::string name(to_string(p.protocol));
        if (figure == 4) {
            name += " n=" + std::to_string(p.n_urgent);
        }
        auto& s = series[{p.protocol, figure == 4 ? p.n_urgent : 0}];
        s.name = name;
        s.dashed = p.protocol == Protocol::FrogMac;
        if (figure == 4) {
            s.color = static_cast<int>(p.n_urgent / 2);
        }
        const double x = figure == 4 ? p.frag_size : p.n_urgent;
        s.points.push_back({x, p.mean * scale, p.min * scale, p.max * scale});
    }
    for (auto& [name, s] : series) {
        std::sort(s.points.begin(), s.points.end(), [](const auto& a, const auto& b) { return a.x < b.x; });
        chart.series.push_back(std::move(s));
    }
    return chart;
}

std::vector<std::filesystem::path> write_figure(int figure, const FigureResults& results, const SweepConfig& config,
                                                const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    const std::string stem = "fig" + std::to_string(figure);
    for (Preset preset : {Preset::Base, Preset::Stress}) {
        const auto& rows = preset == Preset::Base ? results.base : results.stress;
        const std::string name = stem + (preset == Preset::Stress ? "_stress" : "");
        {
            std::ofstream csv(out_dir / (name + ".csv"), std::ios::binary);
            write_csv_header(csv);
            for (const auto& r : rows) {
                write_csv_rows(csv, r);
            }
            written.push_back(out_dir / (name + ".csv"));
        }
        std::ofstream svg(out_dir / (name + ".svg"), std::ios::binary);
        svg << render_svg(figure_chart(figure, preset, rows));
        written.push_back(out_dir / (name + ".svg"));
    }
    std::ofstream manifest(out_dir / "manifest.txt", std::ios::binary);
    manifest << "figure = " << figure << "\n";
    for (const auto& [k, v] : describe(config)) {
        manifest << k << " = " << v << "\n";
    }
    manifest << "runs_base = " << results.base.size() << "\n";
    manifest << "runs_stress = " << results.stress.size() << "\n";
    for (const auto& p : written) {
        manifest << "output = " << p.filename().string() << "\n";
    }
    written.push_back(out_dir / "manifest.txt");
    return written;
}

}  // namespace pmac
