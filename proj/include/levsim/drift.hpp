#pragma once

#include <Eigen/Dense>
#include <complex>
#include <span>
#include <vector>

#include "levsim/equilibrium.hpp"

// Linearized 6-dimensional dynamics of (x, p, X1, Y1, X2, Y2) where
// X_j = (a_j + a_j^dag)/sqrt(2), Y_j = (a_j - a_j^dag)/(i sqrt(2)) and
// (x, p) are the mechanical quadratures in zero-point units.
//
// Conventions (verified by the decoupled-limit eigenvalue test and by the
// agreement of the drift spectra with the quantum route):
//   - mechanical amplitude decays at Gamma_M/2, i.e. -Gamma_M/2 appears on
//     both the x and p rows; energy decays at Gamma_M;
//   - the quadrature coupling is 2 G_j with G_j = g_j |alpha_j| / sqrt(2):
//       dx/dt  =  wM p - (Gamma_M/2) x
//       dp/dt  = -wM x - (Gamma_M/2) p + 2 G1 X1 + 2 G2 X2
//       dXj/dt = -Dj^x Yj - (kappa/2) Xj
//       dYj/dt = +Dj^x Xj - (kappa/2) Yj + 2 Gj x
//   - B B^T = diag((nB+1/2)Gamma_M, (nB+1/2)Gamma_M, kappa/2 x4) with
//     nB = kB T / (hbar wM).
namespace levsim {

using Matrix6 = Eigen::Matrix<double, 6, 6>;

// Frozen linearized system at one operating point; the single source of
// conventions shared by the drift matrix and the quantum spectra.
struct NoiseModel {
  double omega_m = 0.0;
  double kappa = 0.0;
  double gamma_m = 0.0;
  double n_bath = 0.0;
  std::array<double, 2> delta_x{};
  std::array<double, 2> g_quad{};  // G_j, signed
};

NoiseModel make_noise_model(const Equilibrium& eq, double kappa,
                            double gamma_m, double t_bath);

struct DriftModel {
  Matrix6 drift = Matrix6::Zero();
  Matrix6 noise = Matrix6::Zero();  // B, diagonal
  NoiseModel model;
};

DriftModel build_drift(const NoiseModel& model);
DriftModel build_drift(const Equilibrium& eq, double kappa, double gamma_m,
                       double t_bath);

struct Eigenmode {
  std::complex<double> value;       // decay = -Re, frequency = Im (rad/s)
  std::array<double, 3> weights{};  // (mech, opt1, opt2), sum = 1
  int dominant = 0;                 // argmax of weights
  bool degenerate = false;
};

// All 6 eigenmodes sorted by |Im|, ties broken by (Im, Re).
std::vector<Eigenmode> eigenmodes(const DriftModel& model);

// True when all eigenvalues have negative real part. max_re receives the
// largest real part if non-null.
bool drift_stable(const DriftModel& model, double* max_re = nullptr);

// Steady-state covariance from A S + S A^T + B B^T = 0.
// Throws NumericalError (naming the offending eigenvalue) when unstable.
Matrix6 steady_state_covariance(const DriftModel& model);

enum class ScanStatus { ok, no_equilibrium, untrapped, unstable };

struct CrossingPoint {
  double delta2 = 0.0;
  ScanStatus status = ScanStatus::ok;
  double kx0 = 0.0;
  double omega_m = 0.0;
  double gamma_opt = 0.0;
  std::array<double, 2> g_field{};
  // The positive-frequency modes sorted by frequency. Fewer than three
  // entries are populated when a pair is overdamped (real eigenvalues).
  std::array<Eigenmode, 3> modes{};
  int positive_modes = 0;
  double min_gap = 0.0;  // nearest separation of adjacent frequencies
};

struct GapMinimum {
  std::size_t index = 0;   // scan index of the local gap minimum
  double delta2 = 0.0;
  int pair = 0;            // adjacent pair (pair, pair+1) in sorted order
  double gap = 0.0;
  bool character_swap = false;  // dominant labels exchanged across the gap
  bool avoided = false;  // swap detected and gap resolved (> kappa / 10)
};

struct CrossingScan {
  std::vector<CrossingPoint> points;
  std::vector<GapMinimum> minima;
};

// Sweeps delta2 at fixed delta1, following the default stable branch with
// nearest-position continuity. Unstable / untrapped points are flagged,
// never dropped. Gap minima are classified as avoided crossings when the
// dominant characters of the two branches exchange across the gap valley
// (sampled where the gap has doubled, without crossing a neighbouring
// minimum) and the residual splitting exceeds kappa/10; zero-frequency
// degeneracies of an overdamped pair never qualify.
CrossingScan crossing_scan(const SystemConfig& cfg, double delta1,
                           std::span<const double> delta2_grid);

}  // namespace levsim
