#include "jampa/snail.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "jampa/constants.hpp"
#include "jampa/error.hpp"

namespace jampa {

namespace {

// cos(x + n pi / 2) without rounding the phase shift.
double shifted_cos(double x, int n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return std::cos(x);
    case 1: return -std::sin(x);
    case 2: return -std::cos(x);
    default: return std::sin(x);
  }
}

// Above this alpha the principal branch is not guaranteed to be single-welled
// and the monotonicity of the equilibrium equation is checked explicitly.
const double kSafeAlpha = 1.0 / std::sqrt(10.0);

}  // namespace

void SnailSpec::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(ErrorKind::InvalidInput, "SNAIL alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
  if (!(L_J > 0.0) || !std::isfinite(L_J)) {
    throw Error(ErrorKind::InvalidInput, "SNAIL L_J must be positive");
  }
}

double SnailSpec::josephson_energy() const {
  return constants::reduced_flux_quantum * constants::reduced_flux_quantum / L_J;
}

double snail_potential_derivative(const SnailSpec& spec, double phi, double flux_frac, int order) {
  const double phi_ext = constants::two_pi * flux_frac;
  const double inner = (phi_ext - phi) / 3.0;
  const double chain = std::pow(-1.0 / 3.0, order);
  return -(spec.alpha * shifted_cos(phi, order) + 3.0 * chain * shifted_cos(inner, order));
}

double find_minimum(const SnailSpec& spec, double flux_frac) {
  spec.validate();
  const double alpha = spec.alpha;
  const double phi_ext = constants::two_pi * flux_frac;

  // Work in g = (phi_ext - phi) / 3. The equilibrium condition
  // alpha sin(phi) = sin(g) confines the physical minimum to |sin g| <= alpha,
  // so the principal branch lives in g in [-asin(alpha), asin(alpha)].
  const double g_max = std::asin(alpha);
  auto residual = [&](double g) { return std::sin(g) - alpha * std::sin(phi_ext - 3.0 * g); };
  auto slope = [&](double g) { return std::cos(g) + 3.0 * alpha * std::cos(phi_ext - 3.0 * g); };

  if (alpha >= kSafeAlpha) {
    constexpr int kSamples = 512;
    for (int i = 0; i <= kSamples; ++i) {
      const double g = -g_max + 2.0 * g_max * i / kSamples;
      if (slope(g) <= 0.0) {
        throw Error(ErrorKind::NoMinimum,
                    "multi-well SNAIL potential at alpha=" + std::to_string(alpha) +
                        ", flux_frac=" + std::to_string(flux_frac));
      }
    }
  }

  double lo = -g_max;
  double hi = g_max;
  if (residual(lo) > 0.0 || residual(hi) < 0.0) {
    throw Error(ErrorKind::NoMinimum, "equilibrium not bracketed");
  }
  for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  const double g = 0.5 * (lo + hi);
  const double phi_min = phi_ext - 3.0 * g;

  if (!(snail_potential_derivative(spec, phi_min, flux_frac, 2) > 0.0)) {
    throw Error(ErrorKind::NoMinimum, "non-positive curvature at equilibrium");
  }
  return phi_min;
}

SnailExpansion taylor_coefficients(const SnailSpec& spec, double flux_frac, int max_order) {
  if (max_order < 2) {
    throw Error(ErrorKind::InvalidInput, "max_order must be at least 2");
  }
  SnailExpansion out;
  out.flux_frac = flux_frac;
  out.phi_min = find_minimum(spec, flux_frac);
  out.c.reserve(static_cast<std::size_t>(max_order - 1));
  for (int n = 2; n <= max_order; ++n) {
    out.c.push_back(snail_potential_derivative(spec, out.phi_min, flux_frac, n));
  }
  // At integer flux the minimum sits on the symmetry point; odd terms are exactly zero.
  if (flux_frac == std::round(flux_frac)) {
    for (int n = 3; n <= max_order; n += 2) out.c[static_cast<std::size_t>(n - 2)] = 0.0;
  }
  out.L_S = spec.L_J / out.c.front();
  return out;
}

double linear_inductance(const SnailSpec& spec, double flux_frac) {
  return taylor_coefficients(spec, flux_frac, 2).L_S;
}

SnailSpec snail_from_linear_inductance(double alpha, double L_S_zero_flux) {
  SnailSpec spec{alpha, 1.0};
  spec.validate();
  spec.L_J = L_S_zero_flux * (alpha + 1.0 / 3.0);
  return spec;
}

}  // namespace jampa
