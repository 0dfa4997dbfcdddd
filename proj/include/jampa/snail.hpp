#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace jampa {

/// Three-large-junction SNAIL: one small junction of relative strength
/// `alpha` in a loop with three junctions of inductance `L_J` each.
struct SnailSpec {
  double alpha = 0.1;
  double L_J = 0.0;  // henries

  /// Throws Error(InvalidInput) unless 0 <= alpha < 1 and L_J > 0.
  void validate() const;
  /// E_J = phi0^2 / L_J, joules.
  double josephson_energy() const;
};

/// Expansion of the SNAIL potential around its minimum at a given flux.
struct SnailExpansion {
  double flux_frac = 0.0;
  double phi_min = 0.0;     // radians
  std::vector<double> c;    // c[0] = c_2, c[1] = c_3, ...
  double L_S = 0.0;         // henries, L_J / c_2

  /// Coefficient c_n for 2 <= n <= max_order.
  double coefficient(int n) const { return c.at(static_cast<std::size_t>(n - 2)); }
  int max_order() const { return static_cast<int>(c.size()) + 1; }
};

/// U_S / E_J = -[alpha cos(phi) + 3 cos((phi_ext - phi) / 3)], phi_ext = 2 pi flux_frac.
template <typename Scalar>
Scalar snail_potential(const SnailSpec& spec, Scalar phi, Scalar flux_frac) {
  using std::cos;
  const Scalar phi_ext = Scalar(2) * std::numbers::pi_v<Scalar> * flux_frac;
  return -(Scalar(spec.alpha) * cos(phi) + Scalar(3) * cos((phi_ext - phi) / Scalar(3)));
}

/// n-th derivative of U_S / E_J with respect to phi (n >= 0), exact.
double snail_potential_derivative(const SnailSpec& spec, double phi, double flux_frac, int order);

/// Location of the potential minimum on the branch continuous in flux with
/// phi_min(0) = 0. Throws Error(NoMinimum) in the multi-well regime.
double find_minimum(const SnailSpec& spec, double flux_frac);

/// c_n = (1/E_J) d^n U_S / d phi^n at phi_min for n = 2..max_order.
SnailExpansion taylor_coefficients(const SnailSpec& spec, double flux_frac, int max_order = 4);

/// L_S(flux) = L_J / c_2(flux).
double linear_inductance(const SnailSpec& spec, double flux_frac);

/// SNAIL whose zero-flux linear inductance equals `L_S_zero_flux`.
SnailSpec snail_from_linear_inductance(double alpha, double L_S_zero_flux);

}  // namespace jampa
