#include "jampa/noisecal.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "jampa/constants.hpp"
#include "jampa/error.hpp"

namespace jampa {

namespace {

using constants::boltzmann;
using constants::elementary_charge;
using constants::hbar;

// y/(2 k_B) coth(y / (2 k_B T)), continuous through y = 0 where it equals T.
double thermal_term(double y, double T) {
  const double u = y / (2.0 * boltzmann * T);
  if (std::abs(u) < 1e-4) return T * (1.0 + u * u / 3.0);
  return T * u / std::tanh(u);
}

}  // namespace

double quantum_temperature(double omega) { return hbar * omega / (2.0 * boltzmann); }

double sntj_noise_power(double G_sys, double T_sys, double T, double V, double B, double omega) {
  const double eV = elementary_charge * V;
  const double hw = hbar * omega;
  return G_sys * boltzmann * B * (T_sys + 0.5 * thermal_term(eV + hw, T) + 0.5 * thermal_term(eV - hw, T));
}

double default_bias_threshold(double omega, double T) {
  return 10.0 * std::max(hbar * omega, boltzmann * T) / elementary_charge;
}

NoiseRecord fit_system_noise(std::span<const BiasSample> samples, double T, double B, double omega,
                             std::optional<double> V_threshold) {
  if (!(T > 0.0) || !(B > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "junction temperature and bandwidth must be positive");
  }
  const double threshold = V_threshold.value_or(default_bias_threshold(omega, T));

  std::vector<BiasSample> used;
  std::set<double> distinct;
  for (const auto& s : samples) {
    if (std::abs(s.V) >= threshold) {
      used.push_back(s);
      distinct.insert(std::abs(s.V));
    }
  }
  if (distinct.size() < 2) {
    throw Error(ErrorKind::InsufficientData,
                "need at least two distinct |V| >= " + std::to_string(threshold) + " V, got " +
                    std::to_string(distinct.size()));
  }

  const auto n = static_cast<Eigen::Index>(used.size());
  const double v_scale = *distinct.rbegin();
  Eigen::MatrixXd X(n, 2);
  Eigen::VectorXd P(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X(i, 0) = std::abs(used[static_cast<std::size_t>(i)].V) / v_scale;
    X(i, 1) = 1.0;
    P(i) = used[static_cast<std::size_t>(i)].P;
  }
  const double p_scale = P.cwiseAbs().maxCoeff();
  if (!(p_scale > 0.0)) throw Error(ErrorKind::NegativeGain, "no positive noise power above threshold");
  const Eigen::Vector2d beta = X.colPivHouseholderQr().solve(P / p_scale);

  // P = G k_B B T_sys + (G B e / 2) |V|
  const double slope = beta[0] * p_scale / v_scale;
  const double intercept = beta[1] * p_scale;
  NoiseRecord rec;
  rec.omega = omega;
  rec.G_sys = 2.0 * slope / (elementary_charge * B);
  if (!(rec.G_sys > 0.0)) throw Error(ErrorKind::NegativeGain, "fitted slope is not positive");
  rec.T_sys = intercept / (rec.G_sys * boltzmann * B);
  if (!(rec.T_sys > 0.0)) throw Error(ErrorKind::NonphysicalResult, "fitted system temperature is not positive");

  const Eigen::VectorXd fitted = X * beta * p_scale;
  rec.residual = std::sqrt((P - fitted).squaredNorm() / static_cast<double>(n)) / P.mean();
  return rec;
}

NoiseCalibration fit_calibration(const std::vector<FrequencySamples>& data, double T, double B,
                                 std::optional<double> V_threshold, double max_residual) {
  NoiseCalibration cal;
  cal.T = T;
  cal.B = B;
  for (const auto& f : data) {
    try {
      NoiseRecord rec = fit_system_noise(f.samples, T, B, f.omega, V_threshold);
      if (rec.residual > max_residual) {
        cal.rejected.push_back({f.omega, "fit residual " + std::to_string(rec.residual) + " above threshold"});
        continue;
      }
      cal.records.push_back(rec);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::InvalidInput) throw;
      cal.rejected.push_back({f.omega, e.what()});
    }
  }
  return cal;
}

double noise_visibility_ratio(double T_N, double G, double T_sys, double omega) {
  const double T_Q = quantum_temperature(omega);
  return (T_sys + G * (T_Q + T_N)) / (T_sys + T_Q);
}

double nvr_to_noise_temp(double nvr, double G, double T_sys, double omega) {
  if (!(G > 0.0)) throw Error(ErrorKind::InvalidInput, "amplifier gain must be positive");
  const double T_Q = quantum_temperature(omega);
  const double T_N = (nvr * (T_sys + T_Q) - T_sys) / G - T_Q;
  if (T_N < -1e-12 * (T_sys + T_Q)) {
    throw Error(ErrorKind::NonphysicalResult, "negative noise temperature " + std::to_string(T_N) + " K");
  }
  return T_N;
}

SystemNoise bias_tee_correction(double G_sys, double T_sys, double eta, double omega) {
  if (!(eta > 0.0 && eta <= 1.0)) throw Error(ErrorKind::InvalidInput, "bias-tee eta must lie in (0, 1]");
  const double T_Q = quantum_temperature(omega);
  return {eta * G_sys, T_sys / eta + (1.0 - eta) / eta * T_Q};
}

double noise_temp_uncertainty(double nvr, double G, double T_sys, double mismatch_frac, double divider_frac) {
  // dT_N / dT_sys = (NVR - 1) / G
  const double dT_sys = T_sys * (std::abs(mismatch_frac) + std::abs(divider_frac));
  return std::abs(nvr - 1.0) / G * dT_sys;
}

}  // namespace jampa
