#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "levsim/drift.hpp"

// Displacement noise spectra of the linearized system, in zero-point
// units: S_xx integrates to <x^2> = <n> + 1/2 over the full frequency
// axis.
//
// Orientation: S_xx(w) = (1/2pi) int e^{-i w tau} <x(t+tau) x(t)> dtau, so
// the emission sideband (weight nB+1) sits at negative frequencies and
// near the ground state the positive-frequency (blue) sideband vanishes.
//
// The quantum spectrum is available through two independent routes that
// agree to numerical precision:
//   - a closed form in the optical/mechanical susceptibilities
//       chi_jo(w) = [-i(w + Dj^x) + kappa/2]^-1,
//       chi_M(w)  = [-i(w - wM) + Gamma_M/2]^-1,
//       mu = chi_M(w) - chi_M*(-w),  eta_j = chi_jo(w) - chi_jo*(-w),
//     with back-action denominator M(w) = 1 + mu(w) sum_j G_j^2 eta_j(w);
//   - a direct frequency-domain solve of the 6x6 operator system driven by
//     quantum input correlators.
// MFactorForm::absolute_eta replaces eta_j by |eta_j|^2 (and G_j^2 by the
// field-enhanced 2 G_j^2) in M; it is kept for comparison only and does
// not agree with the operator solve once the coupling matters.
//
// The semiclassical route is S(w) = (1/2pi)(A + iwI)^-1 BB^T (A^T - iwI)^-1
// from the drift model; it equals the symmetrized quantum spectrum.
namespace levsim {

enum class Provenance { quantum, semiclassical };

enum class MFactorForm { complex_eta, absolute_eta };

struct SpectrumResult {
  std::vector<double> omega;  // rad/s, ascending, symmetric about 0
  std::vector<double> s_xx;   // 1/(rad/s)
  // Total quadrature spectra of the optical modes, S_XjXj + S_YjYj;
  // filled by the semiclassical route only.
  std::vector<double> s_opt1, s_opt2;
  Provenance provenance = Provenance::quantum;
  double omega_m = 0.0;
  double n_bath = 0.0;
  bool truncation_warning = false;  // tail estimate > 0.1% of the integral
};

// Point evaluations.
double quantum_sxx(const NoiseModel& m, double omega,
                   MFactorForm form = MFactorForm::complex_eta);
double quantum_sxx_operator(const NoiseModel& m, double omega);
double semiclassical_sxx(const DriftModel& dm, double omega);

// Full 6x6 spectral matrix of the drift model at one frequency
// (Hermitian, positive semidefinite).
Eigen::Matrix<std::complex<double>, 6, 6> spectral_matrix(const DriftModel& dm,
                                                          double omega);

// Symmetric grid, log-densified around +-wM and +-|Dj^x|.
std::vector<double> default_grid(const NoiseModel& m, std::size_t points = 8192);

// Sampled spectra. Both throw NumericalError when the drift is unstable.
SpectrumResult quantum_spectrum(const NoiseModel& m,
                                std::span<const double> grid,
                                MFactorForm form = MFactorForm::complex_eta);
SpectrumResult semiclassical_spectrum(const DriftModel& dm,
                                      std::span<const double> grid);

// Adaptive quadrature of an arbitrary spectrum evaluator over the full
// axis, split at the sideband features of the model.
double integrate_spectrum(const std::function<double(double)>& sxx,
                          const NoiseModel& m, double rel_tol = 1e-7);

// <n> = int S dw - 1/2 by adaptive quadrature.
double phonon_number(const std::function<double(double)>& sxx,
                     const NoiseModel& m, double rel_tol = 1e-7);

// <n> from an already sampled spectrum (trapezoid + power-law tail
// estimate; sets the truncation warning on the result).
double phonon_from_spectrum(SpectrumResult& s);

// Blue/red sideband area ratio: int_{w>0} S dw / int_{w<0} S dw.
double sideband_asymmetry(const SpectrumResult& s);
double sideband_asymmetry(const std::function<double(double)>& sxx,
                          const NoiseModel& m, double rel_tol = 1e-7);

}  // namespace levsim
