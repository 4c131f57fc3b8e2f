#include "levsim/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levsim/errors.hpp"
#include "levsim/numerics.hpp"

namespace levsim {

using namespace constants;

namespace {

// Dimensionless reduced problem in u = kx over one period [0, pi).
// W(u) is the gradient shape: dV/dx = hbar k A E1^2 W(u).
struct Reduced {
  double a = 0.0;
  double kappa = 0.0;
  double r2 = 0.0;  // R^2
  double phi1 = 0.0;
  double phi2 = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;

  Reduced(const SystemConfig& cfg, const OperatingPoint& op)
      : a(cfg.coupling()),
        kappa(cfg.cavity.kappa),
        r2(cfg.drive.ratio * cfg.drive.ratio),
        phi1(cfg.drive.phi1),
        phi2(cfg.drive.phi2),
        d1(op.delta1),
        d2(op.delta2) {}

  double shifted1(double u) const {
    const double c = std::cos(u - phi1);
    return d1 + a * c * c;
  }
  double shifted2(double u) const {
    const double c = std::cos(u - phi2);
    return d2 + a * c * c;
  }
  double lorentz1(double u) const {
    const double d = shifted1(u);
    return 1.0 / (0.25 * kappa * kappa + d * d);
  }
  double lorentz2(double u) const {
    const double d = shifted2(u);
    return 1.0 / (0.25 * kappa * kappa + d * d);
  }

  double w(double u) const {
    return std::sin(2.0 * (u - phi1)) * lorentz1(u) +
           r2 * std::sin(2.0 * (u - phi2)) * lorentz2(u);
  }

  double wprime(double u) const {
    const double s1 = std::sin(2.0 * (u - phi1));
    const double s2 = std::sin(2.0 * (u - phi2));
    const double c1 = std::cos(2.0 * (u - phi1));
    const double c2 = std::cos(2.0 * (u - phi2));
    const double w1 = lorentz1(u);
    const double w2 = lorentz2(u);
    const double w1p = 2.0 * a * shifted1(u) * s1 * w1 * w1;
    const double w2p = 2.0 * a * shifted2(u) * s2 * w2 * w2;
    return 2.0 * c1 * w1 + s1 * w1p + r2 * (2.0 * c2 * w2 + s2 * w2p);
  }

  // Potential shape: V = hbar E1^2 * vshape(u).
  double vshape(double u) const {
    return -(2.0 / kappa) * (std::atan(2.0 * shifted1(u) / kappa) +
                             r2 * std::atan(2.0 * shifted2(u) / kappa));
  }
};

Equilibrium build_equilibrium(const SystemConfig& cfg, const Reduced& red,
                              double u) {
  Equilibrium eq;
  const double k = cfg.cavity.wavenumber();
  const double a = red.a;
  const double e1 = cfg.drive_amplitude1();
  const double e2 = cfg.drive.ratio * e1;
  const double mass = cfg.sphere.mass();

  eq.kx0 = u;
  eq.x0 = u / k;
  eq.delta_x = {red.shifted1(u), red.shifted2(u)};
  const std::complex<double> i_unit(0.0, 1.0);
  eq.alpha[0] = -i_unit * e1 /
                std::complex<double>(0.5 * red.kappa, -eq.delta_x[0]);
  eq.alpha[1] = -i_unit * e2 /
                std::complex<double>(0.5 * red.kappa, -eq.delta_x[1]);
  eq.field = {std::abs(eq.alpha[0]), std::abs(eq.alpha[1])};
  eq.photons = {eq.field[0] * eq.field[0], eq.field[1] * eq.field[1]};

  const double c1 = std::cos(2.0 * (u - red.phi1));
  const double c2 = std::cos(2.0 * (u - red.phi2));
  const double s1 = std::sin(2.0 * (u - red.phi1));
  const double s2 = std::sin(2.0 * (u - red.phi2));
  eq.omega_m_sq = 2.0 * hbar * a * k * k / mass *
                  (eq.photons[0] * c1 + eq.photons[1] * c2);
  eq.trapping_defined = eq.omega_m_sq > 0.0;
  if (eq.trapping_defined) {
    eq.omega_m = std::sqrt(eq.omega_m_sq);
    eq.x_zpf = std::sqrt(hbar / (2.0 * mass * eq.omega_m));
    const double scale = std::sqrt(2.0) * k * a * eq.x_zpf;
    eq.g = {scale * s1, scale * s2};
    eq.g_field = {eq.g[0] * eq.field[0], eq.g[1] * eq.field[1]};
  } else {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    eq.omega_m = nan;
    eq.x_zpf = nan;
    eq.g = {nan, nan};
    eq.g_field = {nan, nan};
  }

  eq.potential = hbar * e1 * e1 * red.vshape(u);
  eq.curvature = hbar * k * k * a * e1 * e1 * red.wprime(u);
  eq.stable = red.wprime(u) > 0.0;
  return eq;
}

}  // namespace

double effective_potential(double x, const SystemConfig& cfg,
                           const OperatingPoint& op) {
  const Reduced red(cfg, op);
  const double e1 = cfg.drive_amplitude1();
  return hbar * e1 * e1 * red.vshape(cfg.cavity.wavenumber() * x);
}

double potential_gradient(double x, const SystemConfig& cfg,
                          const OperatingPoint& op) {
  const Reduced red(cfg, op);
  const double k = cfg.cavity.wavenumber();
  const double e1 = cfg.drive_amplitude1();
  return hbar * k * red.a * e1 * e1 * red.w(k * x);
}

double potential_curvature(double x, const SystemConfig& cfg,
                           const OperatingPoint& op) {
  const Reduced red(cfg, op);
  const double k = cfg.cavity.wavenumber();
  const double e1 = cfg.drive_amplitude1();
  return hbar * k * k * red.a * e1 * e1 * red.wprime(k * x);
}

std::vector<Equilibrium> find_equilibria(const SystemConfig& cfg,
                                         const OperatingPoint& op,
                                         const EquilibriumOptions& options) {
  cfg.validate();
  std::vector<Equilibrium> out;
  const Reduced red(cfg, op);
  if (red.a == 0.0) return out;  // flat potential, no trapping

  const int n = std::max(options.scan_points, 2048);
  std::vector<double> us(n + 1), ws(n + 1);
  for (int i = 0; i <= n; ++i) {
    us[i] = pi * static_cast<double>(i) / n;
    ws[i] = red.w(us[i]);
  }

  std::vector<double> roots;
  auto wfun = [&red](double u) { return red.w(u); };
  for (int i = 0; i < n; ++i) {
    if (ws[i] == 0.0) {
      roots.push_back(us[i]);
    } else if (ws[i + 1] != 0.0 && (ws[i] > 0.0) != (ws[i + 1] > 0.0)) {
      roots.push_back(num::bisect(wfun, us[i], us[i + 1], ws[i], ws[i + 1]));
    }
  }
  // The scan covers [0, pi]; a root sitting exactly on pi aliases u = 0.
  for (double& r : roots)
    if (r >= pi - 1e-12) r -= pi;

  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return b - a < 1e-9; }),
              roots.end());

  // Newton polish; bisection already leaves ~1e-15, this cleans the rest.
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const double wp = red.wprime(r);
      if (wp == 0.0) break;
      const double step = red.w(r) / wp;
      const double next = r - step;
      if (!std::isfinite(next) || std::abs(step) > pi / n) break;
      r = next;
    }
    if (r < 0.0) r += pi;
    if (r >= pi) r -= pi;
  }

  out.reserve(roots.size());
  for (double r : roots) out.push_back(build_equilibrium(cfg, red, r));
  return out;
}

int default_branch(const std::vector<Equilibrium>& eqs) {
  int best = -1;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    if (!eqs[i].stable) continue;
    if (best < 0 || eqs[i].potential < eqs[best].potential)
      best = static_cast<int>(i);
  }
  return best;
}

Bistability classify_bistability(const SystemConfig& cfg,
                                 const OperatingPoint& op,
                                 const EquilibriumOptions& options) {
  const auto eqs = find_equilibria(cfg, op, options);
  Bistability b;
  b.total_count = static_cast<int>(eqs.size());
  for (const auto& e : eqs)
    if (e.stable) ++b.stable_count;
  b.bistable = b.stable_count >= 2;
  return b;
}

Equilibrium resolve_at(const SystemConfig& cfg, const OperatingPoint& op,
                       double kx0) {
  const Reduced red(cfg, op);
  return build_equilibrium(cfg, red, kx0);
}

}  // namespace levsim
