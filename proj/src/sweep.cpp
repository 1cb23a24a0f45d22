#include "aia/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "aia/coordinator.hpp"
#include "json.hpp"

namespace aia {

namespace {

std::string axis_name(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Robots: return "robots";
    case SweepAxis::Landmarks: return "landmarks";
    case SweepAxis::CommPeriod: return "comm_period";
    case SweepAxis::ModeAxis: return "mode";
  }
  return "?";
}

struct UnitResult {
  int terminal_step = 0;
  bool timeout = false;
  double plan_seconds_mean = 0.0;
  double voronoi_seconds_mean = 0.0;
  double wall_seconds = 0.0;
};

double median_of(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

Scenario cell_scenario(const Scenario& base, const SweepSpec& spec, double value,
                       std::uint64_t seed) {
  switch (spec.axis) {
    case SweepAxis::Robots: {
      int n = static_cast<int>(std::lround(value));
      return make_generated_scenario(base, spec.deployment, n,
                                     static_cast<int>(base.landmarks.size()), seed);
    }
    case SweepAxis::Landmarks: {
      int m = static_cast<int>(std::lround(value));
      return make_generated_scenario(base, spec.deployment,
                                     static_cast<int>(base.robots.size()), m, seed);
    }
    case SweepAxis::CommPeriod: {
      Scenario sc = make_generated_scenario(base, spec.deployment,
                                            static_cast<int>(base.robots.size()),
                                            static_cast<int>(base.landmarks.size()), seed);
      sc.comm_period = static_cast<int>(std::lround(value));
      if (sc.comm_period < 1) throw std::invalid_argument("sweep: comm_period must be >= 1");
      return sc;
    }
    case SweepAxis::ModeAxis: {
      Scenario sc = make_generated_scenario(base, spec.deployment,
                                            static_cast<int>(base.robots.size()),
                                            static_cast<int>(base.landmarks.size()), seed);
      sc.mode = value < 0.5 ? Mode::Online : Mode::Offline;
      return sc;
    }
  }
  throw std::invalid_argument("sweep: unknown axis");
}

SweepTable run_sweep(const Scenario& base, const SweepSpec& spec) {
  std::vector<double> values = spec.values;
  if (spec.axis == SweepAxis::ModeAxis && values.empty()) values = {0.0, 1.0};
  if (values.empty()) throw std::invalid_argument("sweep: values must be non-empty");
  if (spec.seeds.empty()) throw std::invalid_argument("sweep: seeds must be non-empty");

  struct Unit {
    std::size_t value_index;
    std::size_t seed_index;
    Scenario scenario;
  };
  std::vector<Unit> units;
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (std::size_t si = 0; si < spec.seeds.size(); ++si) {
      units.push_back(Unit{vi, si, cell_scenario(base, spec, values[vi], spec.seeds[si])});
    }
  }

  unsigned jobs = spec.jobs > 0 ? static_cast<unsigned>(spec.jobs)
                                : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(units.size()));

  std::vector<UnitResult> results(units.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t k = next.fetch_add(1);
      if (k >= units.size()) return;
      Simulation sim(units[k].scenario);
      RunResult run = sim.run();
      UnitResult& r = results[k];
      r.terminal_step = run.terminal_step;
      r.timeout = run.timeout;
      r.plan_seconds_mean = run.trace.summary.plan_seconds_mean;
      r.voronoi_seconds_mean = run.trace.summary.voronoi_seconds_mean;
      r.wall_seconds = run.trace.summary.wall_seconds;
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w + 1 < jobs; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  SweepTable table;
  table.axis = axis_name(spec.axis);
  table.deployment = spec.deployment == Deployment::CornerCluster ? "corner" : "grid";
  table.cells.resize(values.size());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    SweepCell& cell = table.cells[vi];
    if (spec.axis == SweepAxis::ModeAxis) {
      cell.label = values[vi] < 0.5 ? "online" : "offline";
    } else {
      cell.label = std::to_string(static_cast<long long>(std::llround(values[vi])));
    }
    cell.terminal_steps.resize(spec.seeds.size());
    cell.timeouts.resize(spec.seeds.size());
  }
  for (std::size_t k = 0; k < units.size(); ++k) {
    SweepCell& cell = table.cells[units[k].value_index];
    cell.terminal_steps[units[k].seed_index] = results[k].terminal_step;
    cell.timeouts[units[k].seed_index] = results[k].timeout;
    cell.plan_seconds_mean += results[k].plan_seconds_mean;
    cell.voronoi_seconds_mean += results[k].voronoi_seconds_mean;
    cell.wall_seconds_mean += results[k].wall_seconds;
    if (results[k].timeout) ++cell.timeout_count;
  }
  for (SweepCell& cell : table.cells) {
    double n = static_cast<double>(cell.terminal_steps.size());
    double sum = 0.0, sq = 0.0;
    for (int f : cell.terminal_steps) {
      sum += f;
      sq += static_cast<double>(f) * f;
    }
    cell.f_mean = sum / n;
    cell.f_std = std::sqrt(std::max(0.0, sq / n - cell.f_mean * cell.f_mean));
    cell.f_median = median_of(cell.terminal_steps);
    cell.plan_seconds_mean /= n;
    cell.voronoi_seconds_mean /= n;
    cell.wall_seconds_mean /= n;
  }
  return table;
}

void write_sweep_text(std::ostream& out, const SweepTable& table) {
  out << "axis=" << table.axis << " deployment=" << table.deployment << "\n";
  out << std::left << std::setw(10) << "value" << std::setw(8) << "runs" << std::setw(12)
      << "F_mean" << std::setw(12) << "F_std" << std::setw(12) << "F_median" << std::setw(10)
      << "timeouts" << std::setw(14) << "plan_s_mean" << std::setw(14) << "vor_s_mean"
      << "wall_s_mean\n";
  for (const auto& cell : table.cells) {
    out << std::left << std::setw(10) << cell.label << std::setw(8)
        << cell.terminal_steps.size() << std::setw(12) << std::fixed << std::setprecision(2)
        << cell.f_mean << std::setw(12) << cell.f_std << std::setw(12) << cell.f_median
        << std::setw(10) << cell.timeout_count << std::setw(14) << std::setprecision(5)
        << cell.plan_seconds_mean << std::setw(14) << cell.voronoi_seconds_mean
        << std::setprecision(3) << cell.wall_seconds_mean << "\n";
  }
  out.unsetf(std::ios::fixed);
}

void write_sweep_json(std::ostream& out, const SweepTable& table) {
  nlohmann::ordered_json j;
  j["axis"] = table.axis;
  j["deployment"] = table.deployment;
  auto cells = nlohmann::ordered_json::array();
  for (const auto& cell : table.cells) {
    nlohmann::ordered_json c;
    c["value"] = cell.label;
    c["terminal_steps"] = cell.terminal_steps;
    std::vector<int> timeouts(cell.timeouts.begin(), cell.timeouts.end());
    c["timeouts"] = timeouts;
    c["f_mean"] = cell.f_mean;
    c["f_std"] = cell.f_std;
    c["f_median"] = cell.f_median;
    c["plan_seconds_mean"] = cell.plan_seconds_mean;
    c["voronoi_seconds_mean"] = cell.voronoi_seconds_mean;
    c["wall_seconds_mean"] = cell.wall_seconds_mean;
    cells.push_back(std::move(c));
  }
  j["cells"] = std::move(cells);
  out << j.dump(2) << "\n";
}

}  // namespace aia
