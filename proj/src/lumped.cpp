#include "jampa/lumped.hpp"

#include <cmath>

#include "jampa/constants.hpp"
#include "jampa/error.hpp"

namespace jampa {

void LumpedModel::validate() const {
  if (M < 1) throw Error(ErrorKind::InvalidInput, "lumped model needs M >= 1");
  if (!(L_J > 0.0) || !(C > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "lumped model needs positive L_J and C");
  }
  if (variant == LumpedVariant::SeriesInductance && !(L_stray > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "series-inductance model needs positive L_stray");
  }
}

double zero_point_phase(double L_mode, double C_mode) {
  if (!(L_mode > 0.0) || !(C_mode > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "zero_point_phase needs positive L and C");
  }
  const double Z = std::sqrt(L_mode / C_mode);
  return std::sqrt(Z / (2.0 * constants::resistance_quantum));
}

double lumped_mode_inductance(const LumpedModel& model) {
  switch (model.variant) {
    case LumpedVariant::ScaledJunctions: return model.L_J;
    case LumpedVariant::FixedJunctions: return model.M * model.L_J;
    case LumpedVariant::SeriesInductance: return model.L_stray;
  }
  return 0.0;
}

double lumped_mode_capacitance(const LumpedModel& model) {
  if (model.variant == LumpedVariant::FixedJunctions) return model.C / model.M;
  return model.C;
}

LumpedKerr lumped_kerr(const LumpedModel& model) {
  model.validate();
  const double L = lumped_mode_inductance(model);
  const double C = lumped_mode_capacitance(model);
  const double M = model.M;
  const double E_J = constants::reduced_flux_quantum * constants::reduced_flux_quantum / model.L_J;

  // Coefficient of phi^4 in the junction potential, summed over the array.
  // Each junction contributes -E_j (phase share)^4 / 4!.
  double quartic = 0.0;
  bool valid = true;
  switch (model.variant) {
    case LumpedVariant::ScaledJunctions:
      quartic = -M * (M * E_J) / 24.0 * std::pow(M, -4.0);
      break;
    case LumpedVariant::FixedJunctions:
      quartic = -M * E_J / 24.0 * std::pow(M, -4.0);
      break;
    case LumpedVariant::SeriesInductance: {
      const double p_J = model.L_J / model.L_stray;
      quartic = -M * E_J / 24.0 * std::pow(p_J, 4.0);
      valid = M * p_J <= 0.1;
      break;
    }
  }

  LumpedKerr out;
  out.phi_zpf = zero_point_phase(L, C);
  out.Z_mode = std::sqrt(L / C);
  out.omega = 1.0 / std::sqrt(L * C);
  out.K = 12.0 * quartic * std::pow(out.phi_zpf, 4.0) / constants::hbar;
  out.regime_valid = valid;
  return out;
}

}  // namespace jampa
