#pragma once

#include <string_view>

#include "jampa/modes.hpp"

namespace jampa {

enum class KerrMethod { ClosedForm, NumericBBQ };

constexpr std::string_view to_string(KerrMethod m) {
  return m == KerrMethod::ClosedForm ? "closed-form" : "numeric-bbq";
}

struct KerrReport {
  int mode_index = 0;
  double K = 0.0;  // rad/s, signed; coefficient convention H = ... + (K/12)(a + a^dag)^4
  KerrMethod method = KerrMethod::ClosedForm;
  double flux_frac = 0.0;
  /// Set away from integer flux: third-order SNAIL terms also renormalize the
  /// Kerr there and are not included.
  bool no_c3_correction = false;
};

/// Zero-lead self-Kerr K_n = (3/16)(c4/c2) hbar omega_n^2 L_S / (M phi0^2).
KerrReport self_kerr_closed_form(const ArraySpec& array, int n);

/// Same expression with omega_n supplied directly (e.g. a measured mode frequency).
double closed_form_kerr_at(const ArraySpec& array, double omega_n);

/// Quartic array energy of the mode profile per unit amplitude^4, joules.
double quartic_energy(const DeviceModel& device, const ModeSolution& mode);

/// Black-box quantization of one mode: quartic array energy on the linear
/// profile, zero-point amplitude from the mode's effective oscillator.
KerrReport self_kerr_numeric(const DeviceModel& device, const ModeSolution& mode);

}  // namespace jampa
