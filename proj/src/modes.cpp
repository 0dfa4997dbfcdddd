#include "jampa/modes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "jampa/error.hpp"

namespace jampa {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest phase advance of either wave argument between scan points.
constexpr double kScanStep = kPi / 8.0;

std::string describe_interval(double lo, double hi) {
  std::ostringstream os;
  os.precision(17);
  os << "[" << lo << ", " << hi << "] rad/s";
  return os.str();
}

/// Frequency-dependent quantities entering the dispersion relations.
struct Dispersion {
  double theta = 0.0;   // k_S d0 / 2
  double ratio = 0.0;   // R = (Z_c / Z_line) sqrt(1 - w^2)
  double lead = 0.0;    // k_r d_r
  double shunt = 1.0;   // sqrt(1 - w^2)
};

class DispersionModel {
 public:
  explicit DispersionModel(const DeviceModel& device)
      : device_(device), params_(derived_params(device.array)) {}

  const DerivedParams& params() const { return params_; }

  Dispersion at(double omega) const {
    Dispersion d;
    const double w = std::isfinite(params_.omega_p) ? omega / params_.omega_p : 0.0;
    d.shunt = std::sqrt(1.0 - w * w);
    d.theta = device_.array.M * omega / (2.0 * params_.omega_0 * d.shunt);
    d.ratio = device_.resonator.Z_c / params_.Z_line * d.shunt;
    d.lead = omega * device_.resonator.d_r / device_.resonator.v_r;
    return d;
  }

  // Unwrapped phase equation: the parity's roots are where G(omega) = level * pi.
  double phase(double omega, Parity parity) const {
    const Dispersion d = at(omega);
    if (parity == Parity::Odd) return unwrapped(d.theta, d.ratio) + d.lead - 0.5 * kPi;
    return unwrapped(d.theta, 1.0 / d.ratio) + d.lead;
  }

  // Next scan point: neither theta nor the lead phase advances by more than kScanStep.
  double next(double omega, double omega_max) const {
    const Dispersion d = at(omega);
    double candidate = omega_at_theta(d.theta + kScanStep);
    if (device_.resonator.d_r > 0.0) {
      candidate = std::min(candidate, (d.lead + kScanStep) * device_.resonator.v_r / device_.resonator.d_r);
    }
    return std::min(candidate, omega_max);
  }

  double omega_ceiling() const {
    return std::isfinite(params_.omega_p) ? params_.omega_p : kInf;
  }

 private:
  // Continuous branch of atan(tan(t) / r), equal to t at multiples of pi/2.
  static double unwrapped(double t, double r) {
    const double s = std::sin(t);
    const double c = std::cos(t);
    return t - std::atan((r - 1.0) * s * c / (r * c * c + s * s));
  }

  double omega_at_theta(double theta) const {
    const double M = device_.array.M;
    if (!std::isfinite(params_.omega_p)) return 2.0 * params_.omega_0 * theta / M;
    const double beta = M * params_.omega_p / (2.0 * params_.omega_0);
    return params_.omega_p * theta / std::hypot(beta, theta);
  }

  const DeviceModel& device_;
  DerivedParams params_;
};

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

template <typename F>
double bisect(F&& f, double lo, double hi) {
  double f_lo = f(lo);
  const int s_lo = sign_of(f_lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= 2.0 * std::numeric_limits<double>::epsilon() * hi) {
      return mid;
    }
    const double f_mid = f(mid);
    if (!std::isfinite(f_mid)) {
      throw Error(ErrorKind::SolverFailure, "non-finite dispersion value in " + describe_interval(lo, hi));
    }
    if (sign_of(f_mid) == s_lo) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  throw Error(ErrorKind::SolverFailure, "bracket refinement exhausted in " + describe_interval(lo, hi));
}

// Visits every root (parity, level) crossed by the phase functions on (0, omega_max].
// `visit` returns false to stop the scan early.
template <typename Visit>
void scan_roots(const DispersionModel& model, double omega_max, Visit&& visit) {
  constexpr Parity kParities[] = {Parity::Odd, Parity::Even};
  double lo = 0.0;
  double g_lo[2] = {model.phase(0.0, Parity::Odd), model.phase(0.0, Parity::Even)};
  while (lo < omega_max) {
    const double hi = model.next(lo, omega_max);
    if (!(hi > lo)) {
      throw Error(ErrorKind::SolverFailure, "scan stalled at " + describe_interval(lo, hi));
    }
    for (int p = 0; p < 2; ++p) {
      const Parity parity = kParities[p];
      const double g_hi = model.phase(hi, parity);
      if (!std::isfinite(g_hi)) {
        throw Error(ErrorKind::SolverFailure, "non-finite dispersion value in " + describe_interval(lo, hi));
      }
      const int first = static_cast<int>(std::floor(std::min(g_lo[p], g_hi) / kPi));
      const int last = static_cast<int>(std::ceil(std::max(g_lo[p], g_hi) / kPi));
      for (int level = first; level <= last; ++level) {
        const double target = level * kPi;
        const int s_lo = sign_of(g_lo[p] - target);
        const int s_hi = sign_of(g_hi - target);
        if (s_lo == 0 || s_lo == s_hi) continue;
        double root = hi;
        if (s_hi != 0) {
          root = bisect([&](double w) { return model.phase(w, parity) - target; }, lo, hi);
        }
        if (!visit(ModeFrequency{root, parity, 0, level})) return;
      }
      g_lo[p] = g_hi;
    }
    lo = hi;
  }
}

void check_band_below_plasma(const DerivedParams& params, double omega) {
  if (std::isfinite(params.omega_p) && !(omega < params.omega_p)) {
    std::ostringstream os;
    os << "frequency " << omega << " rad/s is not below the plasma frequency " << params.omega_p << " rad/s";
    throw Error(ErrorKind::FrequencyAbovePlasma, os.str());
  }
}

// max |P cos(k s) + Q sin(k s)| for s in [s0, s1].
double piece_max_abs(double P, double Q, double k, double s0, double s1) {
  const double amp = std::hypot(P, Q);
  if (amp == 0.0 || s1 <= s0) return 0.0;
  const double delta = std::atan2(Q, P);
  const double u0 = k * s0 - delta;
  const double u1 = k * s1 - delta;
  if (std::floor(u1 / kPi) >= std::ceil(u0 / kPi)) return amp;
  return std::max(std::abs(amp * std::cos(u0)), std::abs(amp * std::cos(u1)));
}

struct PieceIntegrals {
  double grad_sq = 0.0;  // integral of (d phi / dx)^2
  double value_sq = 0.0; // integral of phi^2
};

// Lead piece P cos(k s) + Q sin(k s) over s in [0, d].
PieceIntegrals lead_integrals(double P, double Q, double k, double d) {
  PieceIntegrals out;
  if (d <= 0.0) return out;
  const double half_sin = std::sin(2.0 * k * d) / (4.0 * k);
  const double cos_sq = 0.5 * d + half_sin;
  const double sin_sq = 0.5 * d - half_sin;
  const double sin_cos = std::pow(std::sin(k * d), 2) / (2.0 * k);
  out.grad_sq = k * k * (P * P * sin_sq + Q * Q * cos_sq - 2.0 * P * Q * sin_cos);
  out.value_sq = P * P * cos_sq + Q * Q * sin_sq + 2.0 * P * Q * sin_cos;
  return out;
}

// Array piece A cos(k x) + B sin(k x) over x in [-h, h].
PieceIntegrals array_integrals(double A, double B, double k, double h) {
  const double half_sin = std::sin(2.0 * k * h) / (2.0 * k);
  const double cos_sq = h + half_sin;
  const double sin_sq = h - half_sin;
  PieceIntegrals out;
  out.grad_sq = k * k * (A * A * sin_sq + B * B * cos_sq);
  out.value_sq = A * A * cos_sq + B * B * sin_sq;
  return out;
}

}  // namespace

void ArraySpec::validate() const {
  snail.validate();
  if (M < 1) throw Error(ErrorKind::InvalidInput, "array needs M >= 1");
  if (!(a > 0.0) || !(C_0 > 0.0) || !(C_S >= 0.0)) {
    throw Error(ErrorKind::InvalidInput, "array needs a > 0, C_0 > 0, C_S >= 0");
  }
  if (!std::isfinite(flux_frac)) throw Error(ErrorKind::InvalidInput, "flux_frac must be finite");
}

void ResonatorSpec::validate() const {
  if (!(Z_c > 0.0) || !(v_r > 0.0) || !(d_r >= 0.0) || !std::isfinite(d_r)) {
    throw Error(ErrorKind::InvalidInput, "resonator needs Z_c > 0, v_r > 0, d_r >= 0");
  }
}

void DeviceModel::validate() const {
  array.validate();
  resonator.validate();
}

double ModeEnergies::rayleigh_omega() const { return std::sqrt(inv_L() / C()); }

Vector6d ModeSolution::amplitudes() const {
  const Vector6d& e = edge_amplitudes;
  const double c = std::cos(k_r * half_array);
  const double s = std::sin(k_r * half_array);
  Vector6d g;
  g << e[0] * c + e[1] * s, -e[0] * s + e[1] * c, e[2], e[3], e[4] * c - e[5] * s, e[4] * s + e[5] * c;
  return g;
}

double ModeSolution::flux(double x) const {
  const Vector6d& e = edge_amplitudes;
  if (x < -half_array) {
    const double s = x + half_array;
    return e[0] * std::cos(k_r * s) + e[1] * std::sin(k_r * s);
  }
  if (x > half_array) {
    const double s = x - half_array;
    return e[4] * std::cos(k_r * s) + e[5] * std::sin(k_r * s);
  }
  return e[2] * std::cos(k_S * x) + e[3] * std::sin(k_S * x);
}

double ModeSolution::flux_gradient(double x) const {
  const Vector6d& e = edge_amplitudes;
  if (x < -half_array) {
    const double s = x + half_array;
    return k_r * (-e[0] * std::sin(k_r * s) + e[1] * std::cos(k_r * s));
  }
  if (x > half_array) {
    const double s = x - half_array;
    return k_r * (-e[4] * std::sin(k_r * s) + e[5] * std::cos(k_r * s));
  }
  return k_S * (-e[2] * std::sin(k_S * x) + e[3] * std::cos(k_S * x));
}

DerivedParams derived_params(const ArraySpec& array) {
  array.validate();
  DerivedParams p;
  p.L_S = linear_inductance(array.snail, array.flux_frac);
  p.omega_0 = 1.0 / std::sqrt(p.L_S * array.C_0);
  p.Z_line = std::sqrt(p.L_S / array.C_0);
  if (array.C_S > 0.0) {
    p.omega_p = 1.0 / std::sqrt(p.L_S * array.C_S);
    p.Z_S = std::sqrt(p.L_S / array.C_S);
  } else {
    p.omega_p = kInf;
    p.Z_S = 0.0;
  }
  return p;
}

CriticalM critical_M(double omega_op, const ArraySpec& array) {
  const DerivedParams p = derived_params(array);
  check_band_below_plasma(p, omega_op);
  if (!(omega_op > 0.0)) throw Error(ErrorKind::InvalidInput, "operating frequency must be positive");
  const double w = std::isfinite(p.omega_p) ? omega_op / p.omega_p : 0.0;
  CriticalM out;
  out.value = kPi * p.omega_0 / omega_op * std::sqrt(1.0 - w * w);
  out.floor = static_cast<long>(std::floor(out.value));
  return out;
}

double resonator_length_for(double omega_op, const ArraySpec& array, double Z_c, double v_r) {
  DeviceModel device{array, ResonatorSpec{Z_c, v_r, 0.0}};
  device.validate();
  const DispersionModel model(device);
  check_band_below_plasma(model.params(), omega_op);
  if (!(omega_op > 0.0)) throw Error(ErrorKind::InvalidInput, "operating frequency must be positive");
  const Dispersion d = model.at(omega_op);
  if (!(d.theta < 0.5 * kPi)) {
    std::ostringstream os;
    os << "M=" << array.M << " is not below the critical array size " << critical_M(omega_op, array).value;
    throw Error(ErrorKind::NoPositiveLength, os.str());
  }
  return v_r / omega_op * std::atan(d.ratio / std::tan(d.theta));
}

std::vector<ModeFrequency> mode_frequencies(const DeviceModel& device, double omega_min, double omega_max) {
  device.validate();
  if (!(omega_min >= 0.0) || !(omega_max >= omega_min)) {
    throw Error(ErrorKind::InvalidInput, "band must satisfy 0 <= omega_min <= omega_max");
  }
  const DispersionModel model(device);
  check_band_below_plasma(model.params(), omega_max);

  std::vector<ModeFrequency> roots;
  scan_roots(model, omega_max, [&](const ModeFrequency& r) {
    roots.push_back(r);
    return true;
  });
  std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) { return x.omega < y.omega; });
  std::vector<ModeFrequency> out;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    roots[i].n = static_cast<int>(i) + 1;
    if (roots[i].omega >= omega_min) out.push_back(roots[i]);
  }
  return out;
}

double branch_frequency(const DeviceModel& device, Parity parity, int level) {
  device.validate();
  const DispersionModel model(device);
  const double ceiling = model.omega_ceiling();
  // Roots accumulate below omega_p, so any finite level is reached before it.
  const double limit = std::isfinite(ceiling) ? std::nextafter(ceiling, 0.0) : std::numeric_limits<double>::max();
  double found = -1.0;
  scan_roots(model, limit, [&](const ModeFrequency& r) {
    if (r.parity == parity && r.level == level) {
      found = r.omega;
      return false;
    }
    return true;
  });
  if (found < 0.0) {
    throw Error(ErrorKind::SolverFailure, "branch level " + std::to_string(level) + " not found");
  }
  return found;
}

double closed_form_frequency(const ArraySpec& array, int n) {
  if (n < 1) throw Error(ErrorKind::InvalidInput, "mode index must be >= 1");
  const DerivedParams p = derived_params(array);
  const double ratio = array.M / (kPi * n * p.omega_0);
  if (!std::isfinite(p.omega_p)) return 1.0 / ratio;
  return p.omega_p / std::sqrt(1.0 + std::pow(array.M * p.omega_p / (kPi * n * p.omega_0), 2));
}

double dispersion_residual(const DeviceModel& device, double omega, Parity parity) {
  const DispersionModel model(device);
  const Dispersion d = model.at(omega);
  if (parity == Parity::Odd) return std::tan(d.lead) * std::tan(d.theta) - d.ratio;
  return std::tan(d.lead) / std::tan(d.theta) + d.ratio;
}

Matrix6d boundary_matrix(const DeviceModel& device, double omega) {
  const DispersionModel model(device);
  const Dispersion d = model.at(omega);
  const double sl = std::sin(d.lead), cl = std::cos(d.lead);
  const double st = std::sin(d.theta), ct = std::cos(d.theta);
  const double R = d.ratio;
  Matrix6d m;
  // Unknowns: P-, Q-, A_S, B_S, P+, Q+.
  m << sl, cl, 0.0, 0.0, 0.0, 0.0,     // zero current at x = -d1/2
      0.0, 0.0, 0.0, 0.0, -sl, cl,     // zero current at x = +d1/2
      0.0, 1.0, -R * st, -R * ct, 0.0, 0.0,  // current continuity at -d0/2
      0.0, 0.0, R * st, -R * ct, 0.0, 1.0,   // current continuity at +d0/2
      1.0, 0.0, -ct, st, 0.0, 0.0,     // flux continuity at -d0/2
      0.0, 0.0, -ct, -st, 1.0, 0.0;    // flux continuity at +d0/2
  return m;
}

ModeSolution mode_profile(const DeviceModel& device, const ModeFrequency& root) {
  device.validate();
  const DispersionModel model(device);
  check_band_below_plasma(model.params(), root.omega);
  const Matrix6d m = boundary_matrix(device, root.omega);
  const Eigen::JacobiSVD<Matrix6d> svd(m, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();

  constexpr double kNullTol = 1e-7;
  constexpr double kGapTol = 1e-8;
  if (sigma[5] > kNullTol * sigma[0]) {
    std::ostringstream os;
    os.precision(17);
    os << "omega=" << root.omega << " is not an eigenfrequency (sigma_min/sigma_max=" << sigma[5] / sigma[0] << ")";
    throw Error(ErrorKind::SolverFailure, os.str());
  }
  if (sigma[4] <= kGapTol * sigma[0]) {
    std::ostringstream os;
    os.precision(17);
    os << "null space dimension > 1 at omega=" << root.omega << " (condition number " << sigma[0] / sigma[4] << ")";
    throw Error(ErrorKind::DegenerateNullspace, os.str());
  }

  const Dispersion d = model.at(root.omega);
  ModeSolution mode;
  mode.n = root.n;
  mode.parity = root.parity;
  mode.omega = root.omega;
  mode.k_r = root.omega / device.resonator.v_r;
  mode.k_S = 2.0 * d.theta / device.array.length();
  mode.half_array = 0.5 * device.array.length();
  mode.lead_length = device.resonator.d_r;
  mode.edge_amplitudes = svd.matrixV().col(5);

  const Vector6d& e = mode.edge_amplitudes;
  const double h = mode.half_array;
  const double dr = mode.lead_length;
  const double peak = std::max({piece_max_abs(e[0], e[1], mode.k_r, -dr, 0.0),
                                piece_max_abs(e[2], e[3], mode.k_S, -h, h),
                                piece_max_abs(e[4], e[5], mode.k_r, 0.0, dr)});
  mode.edge_amplitudes /= peak;
  // Sign convention: positive flux at the right edge of the array, or positive
  // slope there when the edge is a node.
  const double edge = mode.flux(h);
  const double ref = std::abs(edge) > 1e-9 ? edge : mode.flux_gradient(h);
  if (ref < 0.0) mode.edge_amplitudes = -mode.edge_amplitudes;

  mode.epr = participation(device, mode);
  return mode;
}

ModeSolution mode_profile(const DeviceModel& device, double omega, Parity parity) {
  const auto below = mode_frequencies(device, 0.0, omega * (1.0 - 1e-9));
  ModeFrequency root{omega, parity, static_cast<int>(below.size()) + 1, -1};
  return mode_profile(device, root);
}

ModeEnergies mode_energies(const DeviceModel& device, const ModeSolution& mode) {
  const ArraySpec& arr = device.array;
  const ResonatorSpec& res = device.resonator;
  const DerivedParams p = derived_params(arr);
  const Vector6d& e = mode.edge_amplitudes;

  const PieceIntegrals in_array = array_integrals(e[2], e[3], mode.k_S, mode.half_array);
  // The left lead in s in [-d_r, 0] maps onto [0, d_r] with Q -> -Q.
  const PieceIntegrals left = lead_integrals(e[0], -e[1], mode.k_r, res.d_r);
  const PieceIntegrals right = lead_integrals(e[4], e[5], mode.k_r, res.d_r);

  const double l_S = p.L_S / arr.a;
  const double c_0 = arr.C_0 / arr.a;
  const double c_S = arr.C_S * arr.a;
  const double l_r = res.Z_c / res.v_r;
  const double c_r = 1.0 / (res.Z_c * res.v_r);

  ModeEnergies out;
  out.inv_L_array = in_array.grad_sq / l_S;
  out.inv_L_leads = (left.grad_sq + right.grad_sq) / l_r;
  out.C_array = c_0 * in_array.value_sq + c_S * in_array.grad_sq;
  out.C_leads = c_r * (left.value_sq + right.value_sq);
  return out;
}

double participation(const DeviceModel& device, const ModeSolution& mode) {
  const ModeEnergies e = mode_energies(device, mode);
  return std::clamp(e.inv_L_array / e.inv_L(), 0.0, 1.0);
}

Region classify_region(double epr_per_cell, double p_J, int M, bool leads_vanished) {
  if (leads_vanished) return Region::IV;
  if (epr_per_cell >= 0.9 * p_J) return Region::I;
  if (M * p_J < 1.0) return Region::II;
  return Region::III;
}

}  // namespace jampa
