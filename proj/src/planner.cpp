#include "jampa/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "jampa/error.hpp"
#include "jampa/parallel.hpp"

namespace jampa {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double fold_flux(double flux_frac) { return std::abs(flux_frac - std::round(flux_frac)); }

std::vector<Interval> merge_cells(const std::vector<Interval>& cells, const std::vector<bool>& take, bool want) {
  std::vector<Interval> out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (take[i] != want) continue;
    if (!out.empty() && out.back().hi == cells[i].lo) {
      out.back().hi = cells[i].hi;
    } else {
      out.push_back(cells[i]);
    }
  }
  return out;
}

double total_width(const std::vector<Interval>& v) {
  double w = 0.0;
  for (const auto& i : v) w += i.width();
  return w;
}

}  // namespace

double CoverageMap::covered_width() const { return total_width(covered); }
double CoverageMap::gap_width() const { return total_width(gaps); }

DeviceModel at_flux(const DeviceModel& device, double flux_frac) {
  DeviceModel out = device;
  out.array.flux_frac = flux_frac;
  return out;
}

FluxSweep flux_sweep(const DeviceModel& device, const std::vector<double>& flux_grid, Interval band,
                     unsigned threads) {
  device.validate();
  FluxSweep sweep;
  sweep.flux = flux_grid;
  sweep.failures.assign(flux_grid.size(), std::string());

  std::vector<std::vector<ModeFrequency>> per_point(flux_grid.size());
  parallel_for(flux_grid.size(), threads, [&](std::size_t i) {
    const double f = fold_flux(flux_grid[i]);
    if (f > 0.5 - kHalfFluxGuard) {
      sweep.failures[i] = "flux inside the half-flux guard";
      return;
    }
    try {
      per_point[i] = mode_frequencies(at_flux(device, f), band.lo, band.hi);
    } catch (const Error& e) {
      sweep.failures[i] = e.what();
    }
  });

  for (const auto& roots : per_point) {
    for (const auto& r : roots) {
      const BranchId id{r.parity, r.level, r.n};
      if (std::find(sweep.branches.begin(), sweep.branches.end(), id) == sweep.branches.end()) {
        sweep.branches.push_back(id);
      }
    }
  }
  std::sort(sweep.branches.begin(), sweep.branches.end(),
            [](const BranchId& x, const BranchId& y) { return x.n < y.n; });

  sweep.omega = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(flux_grid.size()),
                                          static_cast<Eigen::Index>(sweep.branches.size()), kNaN);
  for (std::size_t i = 0; i < per_point.size(); ++i) {
    for (const auto& r : per_point[i]) {
      const BranchId id{r.parity, r.level, r.n};
      const auto it = std::find(sweep.branches.begin(), sweep.branches.end(), id);
      sweep.omega(static_cast<Eigen::Index>(i), it - sweep.branches.begin()) = r.omega;
    }
  }
  return sweep;
}

FluxPlanner::FluxPlanner(const DeviceModel& device, double omega_hi, double max_flux)
    : device_(device), max_flux_(max_flux) {
  device_.validate();
  if (!(max_flux >= 0.0 && max_flux < 0.5)) {
    throw Error(ErrorKind::InvalidInput, "max_flux must lie in [0, 0.5)");
  }
  // Every branch is lowest at max_flux, so all branches that can reach
  // omega_hi show up there, plus the first branch of each parity above it.
  const DeviceModel bottom = at_flux(device_, max_flux_);
  const DerivedParams p = derived_params(bottom.array);
  if (!(omega_hi < p.omega_p)) {
    throw Error(ErrorKind::FrequencyAbovePlasma,
                "planning band reaches the plasma frequency at flux " + std::to_string(max_flux_));
  }
  std::vector<ModeFrequency> roots = mode_frequencies(bottom, 0.0, omega_hi);
  int next_level[2] = {0, 1};  // lowest odd and even levels
  for (const auto& r : roots) {
    int& next = next_level[r.parity == Parity::Odd ? 0 : 1];
    next = std::max(next, r.level + 1);
  }
  std::optional<ModeFrequency> above;
  for (Parity parity : {Parity::Odd, Parity::Even}) {
    const int level = next_level[parity == Parity::Odd ? 0 : 1];
    const double w = branch_frequency(bottom, parity, level);
    if (!above || w < above->omega) above = ModeFrequency{w, parity, static_cast<int>(roots.size()) + 1, level};
  }
  roots.push_back(*above);
  const DeviceModel top = at_flux(device_, 0.0);
  for (const auto& r : roots) {
    Range range;
    range.branch = BranchId{r.parity, r.level, r.n};
    range.omega_bottom = r.omega;
    range.omega_top = branch_frequency(top, r.parity, r.level);
    ranges_.push_back(range);
  }
}

double FluxPlanner::solve_flux(const Range& range, double omega_op) const {
  auto branch_at = [&](double f) {
    return branch_frequency(at_flux(device_, f), range.branch.parity, range.branch.level);
  };
  double lo = 0.0;
  double hi = max_flux_;
  for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (branch_at(mid) > omega_op ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::optional<FluxMatch> FluxPlanner::match(double omega_op, double tolerance) const {
  std::optional<FluxMatch> best;
  double best_miss = std::numeric_limits<double>::infinity();
  for (const auto& range : ranges_) {
    FluxMatch candidate;
    candidate.branch = range.branch;
    double miss = 0.0;
    if (omega_op > range.omega_top) {
      miss = omega_op - range.omega_top;
      candidate.flux_frac = 0.0;
      candidate.omega = range.omega_top;
    } else if (omega_op < range.omega_bottom) {
      miss = range.omega_bottom - omega_op;
      candidate.flux_frac = max_flux_;
      candidate.omega = range.omega_bottom;
    } else {
      candidate.flux_frac = solve_flux(range, omega_op);
      candidate.omega =
          branch_frequency(at_flux(device_, candidate.flux_frac), range.branch.parity, range.branch.level);
    }
    const bool better = miss < best_miss || (miss == best_miss && best && candidate.flux_frac < best->flux_frac);
    if (better) {
      best_miss = miss;
      best = candidate;
    }
  }
  if (!best || best_miss > tolerance) return std::nullopt;
  return best;
}

std::optional<FluxMatch> match_target(const DeviceModel& device, double omega_op, double tolerance) {
  const double reach = std::isfinite(tolerance) ? omega_op + tolerance : omega_op;
  return FluxPlanner(device, reach).match(omega_op, tolerance);
}

CoverageMap coverage_map(const DeviceModel& device, Interval band, double step, double tolerance,
                         unsigned threads) {
  if (!(step > 0.0) || !(band.hi > band.lo) || !(band.lo >= 0.0)) {
    throw Error(ErrorKind::InvalidInput, "coverage map needs step > 0 and a non-empty band");
  }
  const double reach = std::isfinite(tolerance) ? band.hi + tolerance : band.hi;
  const FluxPlanner planner(device, reach);

  CoverageMap map;
  map.band = band;
  map.step = step;
  map.tolerance = tolerance;
  const auto count = static_cast<std::size_t>(std::floor((band.hi - band.lo) / step * (1.0 + 1e-12))) + 1;
  map.entries.resize(count);
  parallel_for(count, threads, [&](std::size_t i) {
    const double target = std::min(band.lo + static_cast<double>(i) * step, band.hi);
    map.entries[i].target = target;
    map.entries[i].match = planner.match(target, tolerance);
  });

  // Each target owns the cell between the midpoints to its neighbours.
  std::vector<Interval> cells(count);
  std::vector<bool> hit(count);
  for (std::size_t i = 0; i < count; ++i) {
    cells[i].lo = i == 0 ? band.lo : 0.5 * (map.entries[i - 1].target + map.entries[i].target);
    cells[i].hi = i + 1 == count ? band.hi : 0.5 * (map.entries[i].target + map.entries[i + 1].target);
    hit[i] = map.entries[i].match.has_value();
  }
  map.covered = merge_cells(cells, hit, true);
  map.gaps = merge_cells(cells, hit, false);
  return map;
}

double estimate_kappa(double Z_S, double mode_spacing, double R) {
  if (!(Z_S > 0.0) || !(mode_spacing > 0.0) || !(R > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "estimate_kappa needs positive inputs");
  }
  return mode_spacing * 2.0 * R / (std::numbers::pi * Z_S);
}

}  // namespace jampa
