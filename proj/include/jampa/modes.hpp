#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jampa/snail.hpp"

namespace jampa {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Nonlinear array of M SNAIL unit cells, continuum description.
struct ArraySpec {
  int M = 1;
  double a = 1.0;          // unit-cell length, meters (cancels in every observable)
  double C_0 = 0.0;        // ground capacitance per cell, farads
  double C_S = 0.0;        // shunt capacitance per cell, farads; 0 means no shunt
  SnailSpec snail;
  double flux_frac = 0.0;  // Phi / Phi0

  void validate() const;
  double length() const { return M * a; }
};

/// Two transmission-line arms of length d_r each on either side of the array.
struct ResonatorSpec {
  double Z_c = 50.0;  // ohms
  double v_r = 1e8;   // m/s
  double d_r = 0.0;   // meters, per arm

  void validate() const;
};

struct DeviceModel {
  ArraySpec array;
  ResonatorSpec resonator;

  void validate() const;
};

struct DerivedParams {
  double L_S = 0.0;      // henries
  double omega_p = 0.0;  // 1/sqrt(L_S C_S); +inf without shunt capacitance
  double omega_0 = 0.0;  // 1/sqrt(L_S C_0)
  double Z_S = 0.0;      // sqrt(L_S / C_S); 0 without shunt capacitance
  /// Long-wavelength impedance of the array line, sqrt(L_S / C_0). This is the
  /// impedance that enters the lead/array matching conditions.
  double Z_line = 0.0;
};

enum class Parity { Odd, Even };

constexpr std::string_view to_string(Parity p) { return p == Parity::Odd ? "odd" : "even"; }

/// One eigenfrequency. `level` labels the root within its parity family and
/// is stable under continuous parameter changes; `n` is the 1-based ordinal
/// of the mode counted from zero frequency.
struct ModeFrequency {
  double omega = 0.0;
  Parity parity = Parity::Odd;
  int n = 0;
  int level = 0;
};

/// Linear eigenmode of the array-in-resonator structure. The flux profile is
///   lead:  P cos(k_r s) + Q sin(k_r s), s measured from the nearer array edge
///   array: A_S cos(k_S x) + B_S sin(k_S x), |x| < d0/2
/// and is normalized to max |phi(x)| = 1.
struct ModeSolution {
  int n = 0;
  Parity parity = Parity::Odd;
  double omega = 0.0;
  double k_r = 0.0;
  double k_S = 0.0;
  /// (P-, Q-, A_S, B_S, P+, Q+) with lead coefficients anchored at x = -+d0/2.
  Vector6d edge_amplitudes = Vector6d::Zero();
  double epr = 0.0;
  double half_array = 0.0;  // d0 / 2
  double lead_length = 0.0; // d_r

  double A_S() const { return edge_amplitudes[2]; }
  double B_S() const { return edge_amplitudes[3]; }

  /// (A-, B-, A_S, B_S, A+, B+) in the global coordinate x of the device.
  Vector6d amplitudes() const;
  double flux(double x) const;
  double flux_gradient(double x) const;
};

/// Quadratic-form coefficients of a mode profile:
///   inductive energy  = D^2 / 2 * (inv_L_array + inv_L_leads)
///   capacitive energy = Ddot^2 / 2 * (C_array + C_leads)
struct ModeEnergies {
  double inv_L_array = 0.0;
  double inv_L_leads = 0.0;
  double C_array = 0.0;
  double C_leads = 0.0;

  double inv_L() const { return inv_L_array + inv_L_leads; }
  double C() const { return C_array + C_leads; }
  double rayleigh_omega() const;
};

enum class Region { I, II, III, IV };

constexpr std::string_view to_string(Region r) {
  switch (r) {
    case Region::I: return "I";
    case Region::II: return "II";
    case Region::III: return "III";
    case Region::IV: return "IV";
  }
  return "?";
}

struct CriticalM {
  double value = 0.0;
  long floor = 0;
};

DerivedParams derived_params(const ArraySpec& array);

/// Arm length that puts the fundamental (odd) mode at omega_op.
/// Throws Error(NoPositiveLength) when M >= M_c(omega_op).
double resonator_length_for(double omega_op, const ArraySpec& array, double Z_c, double v_r);

CriticalM critical_M(double omega_op, const ArraySpec& array);

/// All eigenfrequencies in [omega_min, omega_max], ascending.
std::vector<ModeFrequency> mode_frequencies(const DeviceModel& device, double omega_min, double omega_max);

/// Frequency of the root with the given parity and level (for branch tracking).
double branch_frequency(const DeviceModel& device, Parity parity, int level);

/// Zero-lead dispersion omega_n = omega_p / sqrt(1 + (M omega_p / (pi n omega_0))^2).
double closed_form_frequency(const ArraySpec& array, int n);

/// Residual of the tangent-form dispersion relation of the given parity.
double dispersion_residual(const DeviceModel& device, double omega, Parity parity);

/// Dimensionless 6x6 boundary/continuity matrix acting on edge amplitudes.
/// Rows: zero current at both ends, current continuity and flux continuity
/// at both array edges.
Matrix6d boundary_matrix(const DeviceModel& device, double omega);

ModeSolution mode_profile(const DeviceModel& device, const ModeFrequency& root);
ModeSolution mode_profile(const DeviceModel& device, double omega, Parity parity);

ModeEnergies mode_energies(const DeviceModel& device, const ModeSolution& mode);

/// Array share of the mode's inductive energy.
double participation(const DeviceModel& device, const ModeSolution& mode);

/// Advisory region label for a fixed-fundamental sweep point.
Region classify_region(double epr_per_cell, double p_J, int M, bool leads_vanished);

}  // namespace jampa
