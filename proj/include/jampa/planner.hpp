#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jampa/modes.hpp"

namespace jampa {

/// Flux excursions are limited to |flux_frac| <= 0.5 - kHalfFluxGuard.
inline constexpr double kHalfFluxGuard = 0.01;
/// Default match tolerance, 10 MHz expressed in rad/s.
inline constexpr double kDefaultMatchTolerance = 2.0 * 3.14159265358979323846 * 10e6;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// A mode branch, labelled by its dispersion family and level; the labels are
/// invariant along a continuous flux sweep.
struct BranchId {
  Parity parity = Parity::Odd;
  int level = 0;
  int n = 0;  // ordinal counted from zero frequency

  friend bool operator==(const BranchId& x, const BranchId& y) {
    return x.parity == y.parity && x.level == y.level;
  }
};

struct FluxSweep {
  std::vector<double> flux;       // grid as requested
  std::vector<BranchId> branches; // ascending in frequency
  Eigen::MatrixXd omega;          // flux x branch, NaN where outside the band or unsolved
  std::vector<std::string> failures;  // one entry per grid point; empty when solved
};

struct FluxMatch {
  double flux_frac = 0.0;
  BranchId branch;
  double omega = 0.0;
};

struct CoverageEntry {
  double target = 0.0;
  std::optional<FluxMatch> match;
};

struct CoverageMap {
  Interval band;
  double step = 0.0;
  double tolerance = 0.0;
  std::vector<CoverageEntry> entries;
  std::vector<Interval> covered;
  std::vector<Interval> gaps;

  double covered_width() const;
  double gap_width() const;
  double coverage_fraction() const { return covered_width() / band.width(); }
};

/// Copy of the device at another flux bias.
DeviceModel at_flux(const DeviceModel& device, double flux_frac);

/// omega_n(flux) on the given grid for every branch inside the band at some
/// grid point. Flux values are folded onto [0, 0.5] using periodicity and the
/// even symmetry of the spectrum.
FluxSweep flux_sweep(const DeviceModel& device, const std::vector<double>& flux_grid, Interval band,
                     unsigned threads = 1);

/// Precomputed branch tuning ranges for repeated target matching.
class FluxPlanner {
 public:
  FluxPlanner(const DeviceModel& device, double omega_hi, double max_flux = 0.5 - kHalfFluxGuard);

  /// Closest (flux, branch) to omega_op; empty when the best miss exceeds tolerance.
  std::optional<FluxMatch> match(double omega_op, double tolerance) const;

  struct Range {
    BranchId branch;
    double omega_top = 0.0;     // at zero flux
    double omega_bottom = 0.0;  // at max_flux
  };
  const std::vector<Range>& ranges() const { return ranges_; }
  double max_flux() const { return max_flux_; }

 private:
  double solve_flux(const Range& range, double omega_op) const;

  DeviceModel device_;
  double max_flux_;
  std::vector<Range> ranges_;
};

std::optional<FluxMatch> match_target(const DeviceModel& device, double omega_op,
                                      double tolerance = kDefaultMatchTolerance);

CoverageMap coverage_map(const DeviceModel& device, Interval band, double step,
                         double tolerance = kDefaultMatchTolerance, unsigned threads = 1);

/// Coupling rate from mode spacing: Delta omega / kappa = (pi / 2) Z_S / R.
double estimate_kappa(double Z_S, double mode_spacing, double R);

}  // namespace jampa
