#include "levsim/cooling.hpp"

#include <cmath>
#include <limits>

#include "levsim/errors.hpp"

namespace levsim {

using namespace constants;

double spectral_density_sj(const Equilibrium& eq, int mode, double omega,
                           double kappa) {
  if (mode < 0 || mode > 1)
    throw NumericalError("spectral_density_sj: mode must be 0 or 1");
  const double g_quad = eq.g_field[mode] / std::sqrt(2.0);
  const double det = eq.delta_x[mode] - omega;
  return g_quad * g_quad * kappa / (det * det + 0.25 * kappa * kappa);
}

double cooling_rate(const Equilibrium& eq, double kappa) {
  if (!eq.trapping_defined)
    throw NumericalError("cooling_rate: equilibrium has no harmonic trap");
  return spectral_density_sj(eq, 0, eq.omega_m, kappa) +
         spectral_density_sj(eq, 1, eq.omega_m, kappa) -
         spectral_density_sj(eq, 0, -eq.omega_m, kappa) -
         spectral_density_sj(eq, 1, -eq.omega_m, kappa);
}

PhononPT phonon_pt(const Equilibrium& eq, double kappa, double gamma_m,
                   double t_bath) {
  if (!eq.trapping_defined)
    throw NumericalError("phonon_pt: equilibrium has no harmonic trap");
  PhononPT out;
  out.s_up = {spectral_density_sj(eq, 0, eq.omega_m, kappa),
              spectral_density_sj(eq, 1, eq.omega_m, kappa)};
  out.s_down = {spectral_density_sj(eq, 0, -eq.omega_m, kappa),
                spectral_density_sj(eq, 1, -eq.omega_m, kappa)};
  out.s_plus = out.s_up[0] + out.s_up[1];
  out.s_minus = out.s_down[0] + out.s_down[1];
  out.gamma_opt = out.s_plus - out.s_minus;
  out.gamma_m = gamma_m;
  out.n_bath = k_boltzmann * t_bath / (hbar * eq.omega_m);
  out.heating = out.gamma_opt >= 0.0;

  const double inf = std::numeric_limits<double>::infinity();
  out.n_vac = out.heating ? inf : out.s_plus / (out.s_minus - out.s_plus);
  const double denom = gamma_m + std::abs(out.gamma_opt);
  out.n_gas = denom > 0.0 ? (out.n_bath * gamma_m + out.s_plus) / denom : inf;
  out.t_vac = out.heating
                  ? inf
                  : hbar * eq.omega_m * (out.n_vac + 0.5) / k_boltzmann;
  out.t_eq = out.heating
                 ? inf
                 : (gamma_m * t_bath + std::abs(out.gamma_opt) * out.t_vac) /
                       (gamma_m + std::abs(out.gamma_opt));
  return out;
}

}  // namespace levsim
