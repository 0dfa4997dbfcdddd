#pragma once

namespace jampa {

/// The three ways of arraying M junctions into a single lumped JPA mode.
enum class LumpedVariant {
  ScaledJunctions,   // M junctions of inductance L_J / M; C fixed
  FixedJunctions,    // M junctions of inductance L_J; C rescaled to C / M
  SeriesInductance,  // M junctions of inductance L_J in series with L_stray
};

struct LumpedModel {
  LumpedVariant variant = LumpedVariant::ScaledJunctions;
  int M = 1;
  double L_J = 0.0;      // henries, single-junction reference
  double C = 0.0;        // farads, single-junction reference shunt
  double L_stray = 0.0;  // henries, SeriesInductance only

  void validate() const;
};

struct LumpedKerr {
  double K = 0.0;        // rad/s, signed (negative for junctions)
  double omega = 0.0;    // rad/s
  double Z_mode = 0.0;   // ohms
  double phi_zpf = 0.0;
  /// SeriesInductance only: false once M * L_J / L_stray exceeds 0.1.
  bool regime_valid = true;
};

/// sqrt(Z_a / 2 R_q) with Z_a = sqrt(L_mode / C_mode).
double zero_point_phase(double L_mode, double C_mode);

double lumped_mode_inductance(const LumpedModel& model);
double lumped_mode_capacitance(const LumpedModel& model);

/// Self-Kerr K = 12 g4 of the single lumped mode, where g4 multiplies (a + a^dag)^4.
LumpedKerr lumped_kerr(const LumpedModel& model);

}  // namespace jampa
