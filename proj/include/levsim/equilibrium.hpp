#pragma once

#include <complex>
#include <vector>

#include "levsim/config.hpp"

// Static self-trapping problem for a particle in two driven standing-wave
// modes with intensity-dependent cavity shifts.
//
// With the field amplitudes following the particle adiabatically, the
// particle moves in the effective potential
//
//   V(x) = -(2 hbar E1^2 / kappa) [ atan(2 D1(x)/kappa)
//                                   + R^2 atan(2 D2(x)/kappa) ],
//   D_j(x) = Delta_j + A cos^2(k x - phi_j),
//
// whose gradient is the optical force
//
//   dV/dx = hbar k A E1^2 [ sin 2(kx-phi_1) / |kappa/2 - i D1(x)|^2
//                           + R^2 sin 2(kx-phi_2) / |kappa/2 - i D2(x)|^2 ].
//
// Both potentials have period pi/k, so all positions are reported in
// [0, pi/k). Stationary points are found by sign-scanning dV/dx on a dense
// grid and bisecting each bracket; stability is classified by the sign of
// V''. The drive amplitude E1 factors out of the root condition, so
// equilibrium positions (and hence bistability) are independent of power.
namespace levsim {

// One operating point of the system, fully resolved.
struct Equilibrium {
  double kx0 = 0.0;  // rad, in [0, pi)
  double x0 = 0.0;   // m
  std::array<std::complex<double>, 2> alpha{};  // -iE_j/(kappa/2 - i D_j^x)
  std::array<double, 2> field{};    // |alpha_j| after phase rotation
  std::array<double, 2> photons{};  // n_j = |alpha_j|^2
  std::array<double, 2> delta_x{};  // D_j^x = Delta_j + A cos^2(kx0-phi_j)
  double omega_m_sq = 0.0;  // (2 hbar A k^2 / m) sum_j n_j cos 2(kx0-phi_j)
  double omega_m = 0.0;     // rad/s; NaN when omega_m_sq <= 0
  double x_zpf = 0.0;       // sqrt(hbar / (2 m omega_m)); NaN likewise
  std::array<double, 2> g{};        // sqrt(2) k A x_zpf sin 2(kx0-phi_j)
  std::array<double, 2> g_field{};  // field-enhanced coupling g_j |alpha_j|
  double potential = 0.0;   // V(x0), J
  double curvature = 0.0;   // V''(x0), J/m^2
  bool stable = false;          // local minimum of V
  bool trapping_defined = true;  // omega_m_sq > 0
};

double effective_potential(double x, const SystemConfig& cfg,
                           const OperatingPoint& op);
double potential_gradient(double x, const SystemConfig& cfg,
                          const OperatingPoint& op);
double potential_curvature(double x, const SystemConfig& cfg,
                           const OperatingPoint& op);

struct EquilibriumOptions {
  int scan_points = 4096;  // dense-grid resolution over one period
};

// All stationary points of V in one period, sorted by kx0.
// No stable point is not an error: the stable subset is simply empty.
std::vector<Equilibrium> find_equilibria(
    const SystemConfig& cfg, const OperatingPoint& op,
    const EquilibriumOptions& options = {});

// Index of the deepest stable minimum, or -1 when none is stable.
int default_branch(const std::vector<Equilibrium>& eqs);

struct Bistability {
  int stable_count = 0;
  int total_count = 0;
  bool bistable = false;
};
Bistability classify_bistability(const SystemConfig& cfg,
                                 const OperatingPoint& op,
                                 const EquilibriumOptions& options = {});

// Resolves an Equilibrium for explicit kx0 (used by scans that track a
// branch across operating points).
Equilibrium resolve_at(const SystemConfig& cfg, const OperatingPoint& op,
                       double kx0);

}  // namespace levsim
