#include "levsim/drift.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "levsim/cooling.hpp"
#include "levsim/errors.hpp"
#include "levsim/numerics.hpp"

namespace levsim {

using namespace constants;

NoiseModel make_noise_model(const Equilibrium& eq, double kappa,
                            double gamma_m, double t_bath) {
  if (!eq.trapping_defined)
    throw NumericalError("make_noise_model: equilibrium has no harmonic trap");
  NoiseModel m;
  m.omega_m = eq.omega_m;
  m.kappa = kappa;
  m.gamma_m = gamma_m;
  m.n_bath = k_boltzmann * t_bath / (hbar * eq.omega_m);
  m.delta_x = eq.delta_x;
  m.g_quad = {eq.g_field[0] / std::sqrt(2.0), eq.g_field[1] / std::sqrt(2.0)};
  return m;
}

DriftModel build_drift(const NoiseModel& model) {
  DriftModel dm;
  dm.model = model;
  Matrix6& a = dm.drift;
  const double wm = model.omega_m;
  const double hg = 0.5 * model.gamma_m;
  const double hk = 0.5 * model.kappa;
  const double g1 = model.g_quad[0];
  const double g2 = model.g_quad[1];

  a(0, 0) = -hg;
  a(0, 1) = wm;
  a(1, 0) = -wm;
  a(1, 1) = -hg;
  a(1, 2) = 2.0 * g1;
  a(1, 4) = 2.0 * g2;

  a(2, 2) = -hk;
  a(2, 3) = -model.delta_x[0];
  a(3, 2) = model.delta_x[0];
  a(3, 3) = -hk;
  a(3, 0) = 2.0 * g1;

  a(4, 4) = -hk;
  a(4, 5) = -model.delta_x[1];
  a(5, 4) = model.delta_x[1];
  a(5, 5) = -hk;
  a(5, 0) = 2.0 * g2;

  const double mech = std::sqrt((model.n_bath + 0.5) * model.gamma_m);
  const double opt = std::sqrt(0.5 * model.kappa);
  dm.noise.diagonal() << mech, mech, opt, opt, opt, opt;
  return dm;
}

DriftModel build_drift(const Equilibrium& eq, double kappa, double gamma_m,
                       double t_bath) {
  return build_drift(make_noise_model(eq, kappa, gamma_m, t_bath));
}

std::vector<Eigenmode> eigenmodes(const DriftModel& model) {
  Eigen::EigenSolver<Matrix6> solver(model.drift);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenmodes: eigensolver failed");

  std::vector<Eigenmode> out(6);
  const auto& values = solver.eigenvalues();
  const auto& vectors = solver.eigenvectors();
  const double scale = values.cwiseAbs().maxCoeff();
  for (int i = 0; i < 6; ++i) {
    Eigenmode m;
    m.value = values(i);
    double w0 = std::norm(vectors(0, i)) + std::norm(vectors(1, i));
    double w1 = std::norm(vectors(2, i)) + std::norm(vectors(3, i));
    double w2 = std::norm(vectors(4, i)) + std::norm(vectors(5, i));
    const double total = w0 + w1 + w2;
    m.weights = {w0 / total, w1 / total, w2 / total};
    m.dominant = static_cast<int>(
        std::max_element(m.weights.begin(), m.weights.end()) -
        m.weights.begin());
    for (int jj = 0; jj < 6; ++jj)
      if (jj != i && std::abs(values(jj) - values(i)) <= 1e-12 * scale)
        m.degenerate = true;
    out[static_cast<std::size_t>(i)] = m;
  }
  std::sort(out.begin(), out.end(), [](const Eigenmode& a, const Eigenmode& b) {
    const double ia = std::abs(a.value.imag());
    const double ib = std::abs(b.value.imag());
    if (ia != ib) return ia < ib;
    if (a.value.imag() != b.value.imag())
      return a.value.imag() < b.value.imag();
    return a.value.real() < b.value.real();
  });
  return out;
}

bool drift_stable(const DriftModel& model, double* max_re) {
  const auto values =
      Eigen::EigenSolver<Matrix6>(model.drift, false).eigenvalues();
  double worst = values(0).real();
  for (int i = 1; i < 6; ++i) worst = std::max(worst, values(i).real());
  if (max_re) *max_re = worst;
  return worst < 0.0;
}

Matrix6 steady_state_covariance(const DriftModel& model) {
  const auto values =
      Eigen::EigenSolver<Matrix6>(model.drift, false).eigenvalues();
  for (int i = 0; i < 6; ++i) {
    if (values(i).real() >= 0.0) {
      std::ostringstream msg;
      msg << "steady_state_covariance: drift unstable, eigenvalue "
          << values(i).real() << " + " << values(i).imag() << "i";
      throw NumericalError(msg.str());
    }
  }
  const Matrix6 q = model.noise * model.noise.transpose();
  return num::solve_lyapunov(model.drift, q);
}

CrossingScan crossing_scan(const SystemConfig& cfg, double delta1,
                           std::span<const double> delta2_grid) {
  CrossingScan scan;
  scan.points.resize(delta2_grid.size());
  const double gamma_m = gas_damping(cfg.sphere, cfg.gas);

  double prev_kx0 = -1.0;
  for (std::size_t i = 0; i < delta2_grid.size(); ++i) {
    CrossingPoint& pt = scan.points[i];
    pt.delta2 = delta2_grid[i];
    const OperatingPoint op{delta1, delta2_grid[i]};
    const auto eqs = find_equilibria(cfg, op);

    // Branch continuity: nearest stable position to the previous point,
    // deepest minimum at the start of the sweep.
    int branch = -1;
    if (prev_kx0 >= 0.0) {
      double best = 1e300;
      for (std::size_t b = 0; b < eqs.size(); ++b) {
        if (!eqs[b].stable) continue;
        double d = std::abs(eqs[b].kx0 - prev_kx0);
        d = std::min(d, pi - d);
        if (d < best) {
          best = d;
          branch = static_cast<int>(b);
        }
      }
    } else {
      branch = default_branch(eqs);
    }
    if (branch < 0) {
      pt.status = ScanStatus::no_equilibrium;
      continue;
    }
    const Equilibrium& eq = eqs[static_cast<std::size_t>(branch)];
    prev_kx0 = eq.kx0;
    pt.kx0 = eq.kx0;
    if (!eq.trapping_defined) {
      pt.status = ScanStatus::untrapped;
      continue;
    }
    pt.omega_m = eq.omega_m;
    pt.g_field = eq.g_field;
    pt.gamma_opt = cooling_rate(eq, cfg.cavity.kappa);

    const DriftModel dm =
        build_drift(eq, cfg.cavity.kappa, gamma_m, cfg.gas.temperature);
    if (!drift_stable(dm)) pt.status = ScanStatus::unstable;

    const auto modes = eigenmodes(dm);
    std::array<Eigenmode, 3> positive{};
    std::size_t np = 0;
    for (const auto& m : modes)
      if (m.value.imag() > 0.0 && np < 3) positive[np++] = m;
    std::sort(positive.begin(), positive.begin() + static_cast<long>(np),
              [](const Eigenmode& a, const Eigenmode& b) {
                return a.value.imag() < b.value.imag();
              });
    pt.modes = positive;
    pt.positive_modes = static_cast<int>(np);
    double gap = 1e300;
    for (std::size_t m = 0; m + 1 < np; ++m)
      gap = std::min(gap,
                     positive[m + 1].value.imag() - positive[m].value.imag());
    pt.min_gap = np == 3 ? gap : 0.0;
  }

  // Local minima of each adjacent-pair separation.
  const auto& pts = scan.points;
  auto usable = [&](std::size_t idx) {
    return (pts[idx].status == ScanStatus::ok ||
            pts[idx].status == ScanStatus::unstable) &&
           pts[idx].positive_modes == 3;
  };
  for (int pair = 0; pair < 2; ++pair) {
    auto gap_at = [&](std::size_t idx) {
      return pts[idx].modes[static_cast<std::size_t>(pair) + 1].value.imag() -
             pts[idx].modes[static_cast<std::size_t>(pair)].value.imag();
    };
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      if (!usable(i - 1) || !usable(i) || !usable(i + 1)) continue;
      const double g1 = gap_at(i);
      if (!(g1 <= gap_at(i - 1) && g1 < gap_at(i + 1))) continue;
      GapMinimum gm;
      gm.index = i;
      gm.delta2 = pts[i].delta2;
      gm.pair = pair;
      gm.gap = g1;
      scan.minima.push_back(gm);
    }
  }
  std::sort(scan.minima.begin(), scan.minima.end(),
            [](const GapMinimum& a, const GapMinimum& b) {
              return a.index < b.index;
            });

  // Character swap across each minimum: compare the dominant labels of the
  // two branches where the gap has doubled, staying clear of neighbouring
  // minima so the labels are not scrambled by another crossing.
  for (std::size_t m = 0; m < scan.minima.size(); ++m) {
    GapMinimum& gm = scan.minima[m];
    auto gap_at = [&](std::size_t idx) {
      return pts[idx].modes[static_cast<std::size_t>(gm.pair) + 1]
                 .value.imag() -
             pts[idx].modes[static_cast<std::size_t>(gm.pair)].value.imag();
    };
    std::size_t lo_cap = 0;
    if (m > 0) lo_cap = (scan.minima[m - 1].index + gm.index + 1) / 2;
    std::size_t hi_cap = pts.size() - 1;
    if (m + 1 < scan.minima.size())
      hi_cap = (gm.index + scan.minima[m + 1].index) / 2;

    std::size_t lo = gm.index;
    while (lo > lo_cap && usable(lo - 1) && gap_at(lo - 1) >= gap_at(lo) &&
           gap_at(lo) < 2.0 * gm.gap)
      --lo;
    std::size_t hi = gm.index;
    while (hi < hi_cap && usable(hi + 1) && gap_at(hi + 1) >= gap_at(hi) &&
           gap_at(hi) < 2.0 * gm.gap)
      ++hi;

    const auto& a = pts[lo].modes;
    const auto& b = pts[hi].modes;
    const auto p = static_cast<std::size_t>(gm.pair);
    gm.character_swap = a[p].dominant == b[p + 1].dominant &&
                        a[p + 1].dominant == b[p].dominant &&
                        a[p].dominant != a[p + 1].dominant;
    gm.avoided = gm.character_swap && gm.gap > 0.1 * cfg.cavity.kappa;
  }
  return scan;
}

}  // namespace levsim
