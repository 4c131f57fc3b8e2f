#include "levsim/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>

#include "levsim/errors.hpp"
#include "levsim/numerics.hpp"

namespace levsim {

using namespace constants;
using cplx = std::complex<double>;

namespace {

cplx chi_mech(const NoiseModel& m, double w) {
  return 1.0 / cplx(0.5 * m.gamma_m, -(w - m.omega_m));
}

cplx chi_opt(const NoiseModel& m, int j, double w) {
  return 1.0 / cplx(0.5 * m.kappa, -(w + m.delta_x[static_cast<std::size_t>(j)]));
}

void require_quantum_inputs(const NoiseModel& m) {
  if (!(m.gamma_m > 0.0))
    throw NumericalError(
        "quantum spectrum: gamma_m must be > 0 (a finite bath sets n_bath "
        "and regularizes the mechanical susceptibility)");
  if (!(m.omega_m > 0.0))
    throw NumericalError("quantum spectrum: omega_m must be > 0");
}

void require_stable(const NoiseModel& m) {
  const DriftModel dm = build_drift(m);
  double worst = 0.0;
  if (!drift_stable(dm, &worst)) {
    std::ostringstream msg;
    msg << "spectrum: linearized dynamics unstable (max Re eigenvalue "
        << worst << " rad/s)";
    throw NumericalError(msg.str());
  }
}

}  // namespace

double quantum_sxx(const NoiseModel& m, double omega, MFactorForm form) {
  require_quantum_inputs(m);
  const double w = omega;
  const cplx cm_p = chi_mech(m, w);
  const cplx cm_m = chi_mech(m, -w);
  const cplx mu = cm_p - std::conj(cm_m);

  cplx back_action(0.0, 0.0);
  double optical = 0.0;
  for (int j = 0; j < 2; ++j) {
    const double g = m.g_quad[static_cast<std::size_t>(j)];
    const cplx co_p = chi_opt(m, j, w);
    const cplx co_m = chi_opt(m, j, -w);
    const cplx eta = co_p - std::conj(co_m);
    if (form == MFactorForm::complex_eta)
      back_action += g * g * eta;
    else
      back_action += 2.0 * g * g * std::norm(eta);
    optical += g * g * std::norm(co_m);
  }
  const cplx big_m = 1.0 + mu * back_action;

  const double mech = m.gamma_m * ((m.n_bath + 1.0) * std::norm(cm_m) +
                                   m.n_bath * std::norm(cm_p));
  const double opt = m.kappa * std::norm(mu) * optical;
  return (mech + opt) / (4.0 * pi * std::norm(big_m));
}

double quantum_sxx_operator(const NoiseModel& m, double omega) {
  require_quantum_inputs(m);
  using Matrix6c = Eigen::Matrix<cplx, 6, 6>;
  // Basis (b, b'), (a1, a1'), (a2, a2') where O' is the transform of the
  // adjoint. Emission weight lands at negative frequencies, so the system
  // is solved at -omega.
  const double w = -omega;
  const cplx iu(0.0, 1.0);
  const double g1 = m.g_quad[0];
  const double g2 = m.g_quad[1];

  Matrix6c sys = Matrix6c::Zero();
  sys(0, 0) = -(iu * m.omega_m + 0.5 * m.gamma_m);
  sys(0, 2) = sys(0, 3) = iu * g1;
  sys(0, 4) = sys(0, 5) = iu * g2;
  sys(1, 1) = iu * m.omega_m - 0.5 * m.gamma_m;
  sys(1, 2) = sys(1, 3) = -iu * g1;
  sys(1, 4) = sys(1, 5) = -iu * g2;
  sys(2, 2) = iu * m.delta_x[0] - 0.5 * m.kappa;
  sys(2, 0) = sys(2, 1) = iu * g1;
  sys(3, 3) = -iu * m.delta_x[0] - 0.5 * m.kappa;
  sys(3, 0) = sys(3, 1) = -iu * g1;
  sys(4, 4) = iu * m.delta_x[1] - 0.5 * m.kappa;
  sys(4, 0) = sys(4, 1) = iu * g2;
  sys(5, 5) = -iu * m.delta_x[1] - 0.5 * m.kappa;
  sys(5, 0) = sys(5, 1) = -iu * g2;

  Matrix6c d = -iu * w * Matrix6c::Identity() - sys;
  Eigen::Matrix<cplx, 6, 1> inputs;
  const double root_gm = std::sqrt(m.gamma_m);
  const double root_k = std::sqrt(m.kappa);
  inputs << root_gm, root_gm, root_k, root_k, root_k, root_k;

  const Matrix6c transfer = d.partialPivLu().solve(
      Eigen::Matrix<cplx, 6, 6>(inputs.asDiagonal()));
  Eigen::Matrix<cplx, 1, 6> t =
      (transfer.row(0) + transfer.row(1)) / std::sqrt(2.0);

  // <x(w) x(w')> with correlators <b_in b_in'> = nB+1, <b_in' b_in> = nB,
  // <a_in a_in'> = 1, <a_in' a_in> = 0.
  return ((m.n_bath + 1.0) * std::norm(t(0)) + m.n_bath * std::norm(t(1)) +
          std::norm(t(2)) + std::norm(t(4))) /
         (2.0 * pi);
}

Eigen::Matrix<cplx, 6, 6> spectral_matrix(const DriftModel& dm, double omega) {
  using Matrix6c = Eigen::Matrix<cplx, 6, 6>;
  Matrix6c lhs = dm.drift.cast<cplx>();
  lhs += cplx(0.0, omega) * Matrix6c::Identity();
  const Matrix6c k = lhs.partialPivLu().solve(dm.noise.cast<cplx>());
  return k * k.adjoint() / (2.0 * pi);
}

double semiclassical_sxx(const DriftModel& dm, double omega) {
  return spectral_matrix(dm, omega)(0, 0).real();
}

std::vector<double> default_grid(const NoiseModel& m, std::size_t points) {
  if (points < 64) points = 64;
  const double gmax =
      std::max(std::abs(m.g_quad[0]), std::abs(m.g_quad[1])) * std::sqrt(2.0);
  const double broad = std::max({m.kappa, m.gamma_m, gmax});
  const double span = m.omega_m + 25.0 * broad;

  std::set<double> grid;
  // Linear backbone on the positive axis.
  const std::size_t backbone = points / 4;
  for (std::size_t i = 0; i <= backbone; ++i)
    grid.insert(span * static_cast<double>(i) / static_cast<double>(backbone));
  // Log-densified clusters around each feature.
  const double res = std::max(m.gamma_m, 1e-6 * m.omega_m) / 50.0;
  std::vector<double> features = {0.0, m.omega_m, std::abs(m.delta_x[0]),
                                  std::abs(m.delta_x[1])};
  const std::size_t per_side = points / (8 * features.size());
  for (double f : features) {
    const double widest = 5.0 * broad;
    for (std::size_t i = 0; i <= per_side; ++i) {
      const double offset =
          res * std::pow(widest / res, static_cast<double>(i) /
                                            static_cast<double>(per_side));
      if (f + offset <= span) grid.insert(f + offset);
      if (f - offset >= 0.0) grid.insert(f - offset);
    }
    if (f <= span) grid.insert(f);
  }

  std::vector<double> out;
  out.reserve(2 * grid.size() + 1);
  for (auto it = grid.rbegin(); it != grid.rend(); ++it)
    if (*it > 0.0) out.push_back(-*it);
  for (double v : grid)
    if (v >= 0.0) out.push_back(v);
  return out;
}

SpectrumResult quantum_spectrum(const NoiseModel& m,
                                std::span<const double> grid,
                                MFactorForm form) {
  require_quantum_inputs(m);
  require_stable(m);
  SpectrumResult out;
  out.provenance = Provenance::quantum;
  out.omega_m = m.omega_m;
  out.n_bath = m.n_bath;
  out.omega.assign(grid.begin(), grid.end());
  out.s_xx.resize(out.omega.size());
  for (std::size_t i = 0; i < out.omega.size(); ++i)
    out.s_xx[i] = quantum_sxx(m, out.omega[i], form);
  return out;
}

SpectrumResult semiclassical_spectrum(const DriftModel& dm,
                                      std::span<const double> grid) {
  double worst = 0.0;
  if (!drift_stable(dm, &worst)) {
    std::ostringstream msg;
    msg << "semiclassical_spectrum: drift unstable (max Re eigenvalue "
        << worst << " rad/s)";
    throw NumericalError(msg.str());
  }
  SpectrumResult out;
  out.provenance = Provenance::semiclassical;
  out.omega_m = dm.model.omega_m;
  out.n_bath = dm.model.n_bath;
  out.omega.assign(grid.begin(), grid.end());
  out.s_xx.resize(out.omega.size());
  out.s_opt1.resize(out.omega.size());
  out.s_opt2.resize(out.omega.size());
  for (std::size_t i = 0; i < out.omega.size(); ++i) {
    const auto s = spectral_matrix(dm, out.omega[i]);
    out.s_xx[i] = s(0, 0).real();
    out.s_opt1[i] = s(2, 2).real() + s(3, 3).real();
    out.s_opt2[i] = s(4, 4).real() + s(5, 5).real();
  }
  return out;
}

namespace {

std::vector<double> integration_breakpoints(const NoiseModel& m, double sign) {
  const double gmax =
      std::max(std::abs(m.g_quad[0]), std::abs(m.g_quad[1])) * std::sqrt(2.0);
  const double broad = std::max({m.kappa, m.gamma_m, gmax});
  const double span = m.omega_m + 25.0 * broad;
  std::set<double> pts = {0.0, span};
  auto add_feature = [&](double f) {
    if (f <= 0.0 || f >= span) return;
    pts.insert(f);
    for (double off : {0.5 * m.gamma_m, 5.0 * m.gamma_m, 0.5 * m.kappa,
                       5.0 * m.kappa}) {
      if (f - off > 0.0) pts.insert(f - off);
      if (f + off < span) pts.insert(f + off);
    }
  };
  add_feature(m.omega_m);
  add_feature(std::abs(m.delta_x[0]));
  add_feature(std::abs(m.delta_x[1]));
  std::vector<double> out(pts.begin(), pts.end());
  if (sign < 0.0) {
    std::vector<double> neg;
    for (auto it = out.rbegin(); it != out.rend(); ++it) neg.push_back(-*it);
    return neg;
  }
  return out;
}

}  // namespace

double integrate_spectrum(const std::function<double(double)>& sxx,
                          const NoiseModel& m, double rel_tol) {
  const auto pos = integration_breakpoints(m, +1.0);
  const auto neg = integration_breakpoints(m, -1.0);
  const double body = num::integrate_segments(sxx, neg, rel_tol) +
                      num::integrate_segments(sxx, pos, rel_tol);
  // Beyond the span every line contributes a Lorentzian 1/w^2 tail, so
  // int_W^inf S dw = S(W) W up to O((width/W)^2).
  const double span = pos.back();
  const double tails = sxx(span) * span + sxx(-span) * span;
  return body + tails;
}

double phonon_number(const std::function<double(double)>& sxx,
                     const NoiseModel& m, double rel_tol) {
  return integrate_spectrum(sxx, m, rel_tol) - 0.5;
}

double phonon_from_spectrum(SpectrumResult& s) {
  if (s.omega.size() < 8)
    throw NumericalError("phonon_from_spectrum: grid too small");
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < s.omega.size(); ++i)
    integral += 0.5 * (s.s_xx[i] + s.s_xx[i + 1]) * (s.omega[i + 1] - s.omega[i]);
  // 1/w^2 tail estimate on both sides.
  const double tail = s.s_xx.front() * std::abs(s.omega.front()) +
                      s.s_xx.back() * std::abs(s.omega.back());
  s.truncation_warning = tail > 1e-3 * std::abs(integral);
  return integral - 0.5;
}

double sideband_asymmetry(const SpectrumResult& s) {
  double blue = 0.0, red = 0.0;
  for (std::size_t i = 0; i + 1 < s.omega.size(); ++i) {
    const double seg =
        0.5 * (s.s_xx[i] + s.s_xx[i + 1]) * (s.omega[i + 1] - s.omega[i]);
    const double mid = 0.5 * (s.omega[i] + s.omega[i + 1]);
    if (mid > 0.0)
      blue += seg;
    else
      red += seg;
  }
  return blue / red;
}

double sideband_asymmetry(const std::function<double(double)>& sxx,
                          const NoiseModel& m, double rel_tol) {
  const double blue =
      num::integrate_segments(sxx, integration_breakpoints(m, +1.0), rel_tol);
  const double red =
      num::integrate_segments(sxx, integration_breakpoints(m, -1.0), rel_tol);
  return blue / red;
}

}  // namespace levsim
