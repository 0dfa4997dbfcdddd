#include "jampa/kerr.hpp"

#include <cmath>

#include "jampa/constants.hpp"
#include "jampa/error.hpp"

namespace jampa {

namespace {

SnailExpansion checked_expansion(const ArraySpec& array) {
  SnailExpansion ex = taylor_coefficients(array.snail, array.flux_frac, 4);
  if (!(ex.coefficient(2) > 0.0)) {
    throw Error(ErrorKind::ExpansionFailure, "c_2 must be positive for a stable linear mode");
  }
  return ex;
}

bool integer_flux(double flux_frac) { return flux_frac == std::round(flux_frac); }

}  // namespace

KerrReport self_kerr_closed_form(const ArraySpec& array, int n) {
  const double omega_n = closed_form_frequency(array, n);
  KerrReport out;
  out.mode_index = n;
  out.method = KerrMethod::ClosedForm;
  out.flux_frac = array.flux_frac;
  out.no_c3_correction = !integer_flux(array.flux_frac);
  out.K = closed_form_kerr_at(array, omega_n);
  return out;
}

double closed_form_kerr_at(const ArraySpec& array, double omega_n) {
  const SnailExpansion ex = checked_expansion(array);
  const double phi0 = constants::reduced_flux_quantum;
  return 3.0 / 16.0 * ex.coefficient(4) / ex.coefficient(2) * constants::hbar * omega_n * omega_n * ex.L_S /
         (array.M * phi0 * phi0);
}

double quartic_energy(const DeviceModel& device, const ModeSolution& mode) {
  const ArraySpec& arr = device.array;
  const SnailExpansion ex = checked_expansion(arr);
  const double A = mode.A_S();
  const double B = mode.B_S();
  const double A2 = A * A;
  const double B2 = B * B;
  const double kd = mode.k_S * arr.length();
  const double ak = arr.a * mode.k_S;
  // a^3 times the integral of (d phi / dx)^4 over the array.
  const double gradient_fourth = std::pow(ak, 3) / 16.0 *
                                 (6.0 * (A2 + B2) * (A2 + B2) * kd + 8.0 * (B2 * B2 - A2 * A2) * std::sin(kd) +
                                  (A2 * A2 - 6.0 * A2 * B2 + B2 * B2) * std::sin(2.0 * kd));
  const double phi0 = constants::reduced_flux_quantum;
  return ex.coefficient(4) / (24.0 * arr.snail.L_J * phi0 * phi0) * gradient_fourth;
}

KerrReport self_kerr_numeric(const DeviceModel& device, const ModeSolution& mode) {
  const double U4 = quartic_energy(device, mode);
  const ModeEnergies energies = mode_energies(device, mode);
  // Effective oscillator (C_eff, L_eff): D_zpf^2 = hbar Z_eff / 2, g4 = U4 D_zpf^4.
  const double Z_eff_sq = 1.0 / (energies.inv_L() * energies.C());
  KerrReport out;
  out.mode_index = mode.n;
  out.method = KerrMethod::NumericBBQ;
  out.flux_frac = device.array.flux_frac;
  out.no_c3_correction = !integer_flux(device.array.flux_frac);
  out.K = 3.0 * U4 * constants::hbar * Z_eff_sq;
  return out;
}

}  // namespace jampa
