#pragma once

#include "levsim/equilibrium.hpp"

// Linear-response cooling rates and equilibrium phonon numbers.
//
// The sideband weight of mode j is the Lorentzian
//
//   S_j(w) = G_j^2 kappa / ( (D_j^x - w)^2 + kappa^2/4 ),
//
// where G_j = g_j |alpha_j| / sqrt(2) is the coupling of the quadrature
// pair (a_j + a_j^dag)(b + b^dag) in the linearized Hamiltonian. This
// normalization makes Gamma_opt = sum_j [S_j(w_M) - S_j(-w_M)] the energy
// decay rate of the linearized dynamics (negative = net cooling), which is
// verified against time-domain integration and the drift eigenvalues.
namespace levsim {

double spectral_density_sj(const Equilibrium& eq, int mode, double omega,
                           double kappa);

// Gamma_opt = S1(wM) + S2(wM) - S1(-wM) - S2(-wM); cooling when negative.
double cooling_rate(const Equilibrium& eq, double kappa);

struct PhononPT {
  std::array<double, 2> s_up{};    // S_j(+wM)
  std::array<double, 2> s_down{};  // S_j(-wM)
  double s_plus = 0.0;    // S1(wM) + S2(wM)
  double s_minus = 0.0;   // S1(-wM) + S2(-wM)
  double gamma_opt = 0.0;
  double gamma_m = 0.0;
  double n_bath = 0.0;
  bool heating = false;   // gamma_opt >= 0: no vacuum steady state
  double n_vac = 0.0;     // s_plus / (s_minus - s_plus); inf when heating
  double n_gas = 0.0;     // (n_bath Gamma_M + s_plus) / (Gamma_M + |Gamma_opt|)
  double t_vac = 0.0;     // hbar wM (n_vac + 1/2) / kB
  double t_eq = 0.0;      // (Gamma_M T_B + |Gamma| T_vac) / (Gamma_M + |Gamma|)
};

PhononPT phonon_pt(const Equilibrium& eq, double kappa, double gamma_m,
                   double t_bath);

}  // namespace levsim
