#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace jampa {

/// One bias point of a shot-noise tunnel junction sweep.
struct BiasSample {
  double V = 0.0;  // volts
  double P = 0.0;  // watts
};

struct NoiseRecord {
  double omega = 0.0;     // rad/s
  double G_sys = 0.0;     // power gain, linear
  double T_sys = 0.0;     // kelvin
  double residual = 0.0;  // rms fit residual relative to mean power
};

struct RejectedRecord {
  double omega = 0.0;
  std::string reason;
};

struct NoiseCalibration {
  std::vector<NoiseRecord> records;
  std::vector<RejectedRecord> rejected;
  double T = 0.0;  // junction temperature, kelvin
  double B = 0.0;  // resolution bandwidth, hertz
};

struct FrequencySamples {
  double omega = 0.0;
  std::vector<BiasSample> samples;
};

struct SystemNoise {
  double G_sys = 0.0;
  double T_sys = 0.0;
};

/// Standard quantum limit temperature hbar omega / 2 k_B.
double quantum_temperature(double omega);

/// Output noise power of a biased tunnel junction seen through the chain.
double sntj_noise_power(double G_sys, double T_sys, double T, double V, double B, double omega);

/// e V_threshold = 10 max(hbar omega, k_B T): the linear high-bias regime.
double default_bias_threshold(double omega, double T);

/// Linear fit of P vs |V| above the threshold (both bias signs pooled).
/// Throws InsufficientData, NegativeGain, NonphysicalResult.
NoiseRecord fit_system_noise(std::span<const BiasSample> samples, double T, double B, double omega,
                             std::optional<double> V_threshold = std::nullopt);

/// Per-frequency fits; failed or poor fits (residual above max_residual) go to `rejected`.
NoiseCalibration fit_calibration(const std::vector<FrequencySamples>& data, double T, double B,
                                 std::optional<double> V_threshold = std::nullopt, double max_residual = 1e-2);

/// Noise visibility ratio for an amplifier of gain G and added noise T_N.
double noise_visibility_ratio(double T_N, double G, double T_sys, double omega);

/// Inverse of noise_visibility_ratio. Throws NonphysicalResult when T_N < 0.
double nvr_to_noise_temp(double nvr, double G, double T_sys, double omega);

/// Moves the reference plane through a bias tee of transmission eta (0 < eta <= 1).
SystemNoise bias_tee_correction(double G_sys, double T_sys, double eta, double omega);

/// Linear error bar on T_N from fractional systematic errors on T_sys
/// (impedance mismatch and bias-divider miscalibration).
double noise_temp_uncertainty(double nvr, double G, double T_sys, double mismatch_frac, double divider_frac);

}  // namespace jampa
