#include "levsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "levsim/cooling.hpp"
#include "levsim/errors.hpp"
#include "levsim/numerics.hpp"

namespace levsim {

using namespace constants;

namespace {

constexpr double nan_value = std::numeric_limits<double>::quiet_NaN();

void fill_cell(MapResult& map, std::size_t idx, const SystemConfig& cfg,
               double gamma_m, const std::vector<Equilibrium>& eqs) {
  int stable = 0;
  for (const auto& e : eqs)
    if (e.stable) ++stable;
  map.stable_count[idx] = stable;

  const int branch = default_branch(eqs);
  if (branch < 0) {
    map.status[idx] = CellStatus::no_equilibrium;
    map.gamma_opt[idx] = 0.0;
    map.n_pt[idx] = nan_value;
    map.omega_m[idx] = nan_value;
    map.ng1[idx] = 0.0;
    map.ng2[idx] = 0.0;
    map.kx0[idx] = nan_value;
    map.res1[idx] = nan_value;
    map.res2[idx] = nan_value;
    map.drift_ok[idx] = 0;
    return;
  }
  const Equilibrium& eq = eqs[static_cast<std::size_t>(branch)];
  map.kx0[idx] = eq.kx0;
  if (!eq.trapping_defined) {
    map.status[idx] = CellStatus::untrapped;
    map.gamma_opt[idx] = nan_value;
    map.n_pt[idx] = nan_value;
    map.omega_m[idx] = nan_value;
    map.ng1[idx] = nan_value;
    map.ng2[idx] = nan_value;
    map.res1[idx] = nan_value;
    map.res2[idx] = nan_value;
    map.drift_ok[idx] = 0;
    return;
  }
  map.status[idx] = CellStatus::ok;
  map.omega_m[idx] = eq.omega_m;
  map.ng1[idx] = eq.g_field[0];
  map.ng2[idx] = eq.g_field[1];
  map.res1[idx] = -eq.delta_x[0] - eq.omega_m;
  map.res2[idx] = -eq.delta_x[1] - eq.omega_m;
  const auto pt = phonon_pt(eq, cfg.cavity.kappa, gamma_m, cfg.gas.temperature);
  map.gamma_opt[idx] = pt.gamma_opt;
  map.n_pt[idx] = pt.n_gas;
  const DriftModel dm =
      build_drift(eq, cfg.cavity.kappa, gamma_m, cfg.gas.temperature);
  map.drift_ok[idx] = drift_stable(dm) ? 1 : 0;
}

}  // namespace

MapResult cooling_map(const SystemConfig& cfg, const Axis& delta1,
                      const Axis& delta2, int threads) {
  if (delta1.points < 16 || delta2.points < 16)
    throw ConfigError("cooling_map: resolution must be at least 16x16");
  cfg.validate();
  MapResult map;
  map.delta1 = delta1;
  map.delta2 = delta2;
  const std::size_t cells = static_cast<std::size_t>(delta1.points) *
                            static_cast<std::size_t>(delta2.points);
  map.gamma_opt.resize(cells);
  map.n_pt.resize(cells);
  map.omega_m.resize(cells);
  map.ng1.resize(cells);
  map.ng2.resize(cells);
  map.kx0.resize(cells);
  map.res1.resize(cells);
  map.res2.resize(cells);
  map.stable_count.resize(cells);
  map.drift_ok.resize(cells);
  map.status.resize(cells);

  const double gamma_m = gas_damping(cfg.sphere, cfg.gas);
  num::parallel_for(static_cast<std::size_t>(delta2.points), threads,
                    [&](std::size_t i2) {
                      for (int i1 = 0; i1 < delta1.points; ++i1) {
                        const OperatingPoint op{delta1.at(i1),
                                                delta2.at(static_cast<int>(i2))};
                        const auto eqs = find_equilibria(cfg, op);
                        fill_cell(map, map.index(i1, static_cast<int>(i2)),
                                  cfg, gamma_m, eqs);
                      }
                    });
  return map;
}

namespace {

// Marching squares. Crossing points live on grid edges, identified by a
// global edge id so that chains connect exactly across cells.
struct EdgeCrossing {
  long id = -1;
  double x = 0.0;
  double y = 0.0;
};

class ContourBuilder {
 public:
  ContourBuilder(const Axis& ax, const Axis& ay,
                 const std::vector<double>& field, double level)
      : ax_(ax), ay_(ay), field_(field), level_(level) {}

  std::vector<Polyline> run() {
    segments_.clear();
    for (int j = 0; j + 1 < ay_.points; ++j)
      for (int i = 0; i + 1 < ax_.points; ++i) cell(i, j);
    return chain();
  }

 private:
  double value(int i, int j) const {
    return field_[static_cast<std::size_t>(j) *
                      static_cast<std::size_t>(ax_.points) +
                  static_cast<std::size_t>(i)];
  }

  // Edge ids: horizontal edge (i,j)-(i+1,j) -> 2*(j*nx+i), vertical edge
  // (i,j)-(i,j+1) -> 2*(j*nx+i)+1.
  EdgeCrossing horizontal(int i, int j) const {
    const double a = value(i, j);
    const double b = value(i + 1, j);
    const double t = (level_ - a) / (b - a);
    return {2L * (static_cast<long>(j) * ax_.points + i),
            ax_.at(i) + t * (ax_.at(i + 1) - ax_.at(i)), ay_.at(j)};
  }
  EdgeCrossing vertical(int i, int j) const {
    const double a = value(i, j);
    const double b = value(i, j + 1);
    const double t = (level_ - a) / (b - a);
    return {2L * (static_cast<long>(j) * ax_.points + i) + 1, ax_.at(i),
            ay_.at(j) + t * (ay_.at(j + 1) - ay_.at(j))};
  }

  void cell(int i, int j) {
    const double v00 = value(i, j);
    const double v10 = value(i + 1, j);
    const double v01 = value(i, j + 1);
    const double v11 = value(i + 1, j + 1);
    if (std::isnan(v00) || std::isnan(v10) || std::isnan(v01) ||
        std::isnan(v11))
      return;
    std::vector<EdgeCrossing> pts;
    if ((v00 > level_) != (v10 > level_)) pts.push_back(horizontal(i, j));
    if ((v01 > level_) != (v11 > level_)) pts.push_back(horizontal(i, j + 1));
    if ((v00 > level_) != (v01 > level_)) pts.push_back(vertical(i, j));
    if ((v10 > level_) != (v11 > level_)) pts.push_back(vertical(i + 1, j));
    if (pts.size() == 2) {
      segments_.push_back({pts[0], pts[1]});
    } else if (pts.size() == 4) {
      // Saddle: resolve with the cell-centre value.
      const double centre = 0.25 * (v00 + v10 + v01 + v11);
      // pts order: bottom, top, left, right.
      if ((centre > level_) == (v00 > level_)) {
        segments_.push_back({pts[0], pts[3]});
        segments_.push_back({pts[1], pts[2]});
      } else {
        segments_.push_back({pts[0], pts[2]});
        segments_.push_back({pts[1], pts[3]});
      }
    }
  }

  std::vector<Polyline> chain() {
    std::multimap<long, std::size_t> by_edge;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      by_edge.insert({segments_[s][0].id, s});
      by_edge.insert({segments_[s][1].id, s});
    }
    std::vector<bool> used(segments_.size(), false);
    std::vector<Polyline> out;
    for (std::size_t s = 0; s < segments_.size(); ++s) {
      if (used[s]) continue;
      // Walk both directions from this seed segment.
      std::vector<EdgeCrossing> pts = {segments_[s][0], segments_[s][1]};
      used[s] = true;
      for (int dir = 0; dir < 2; ++dir) {
        while (true) {
          const long tip = dir == 0 ? pts.back().id : pts.front().id;
          std::size_t next = segments_.size();
          auto range = by_edge.equal_range(tip);
          for (auto it = range.first; it != range.second; ++it)
            if (!used[it->second]) {
              next = it->second;
              break;
            }
          if (next == segments_.size()) break;
          used[next] = true;
          const auto& seg = segments_[next];
          const EdgeCrossing& add = seg[0].id == tip ? seg[1] : seg[0];
          if (dir == 0)
            pts.push_back(add);
          else
            pts.insert(pts.begin(), add);
        }
      }
      Polyline line;
      line.points.reserve(pts.size());
      for (const auto& p : pts) line.points.push_back({p.x, p.y});
      out.push_back(std::move(line));
    }
    return out;
  }

  const Axis& ax_;
  const Axis& ay_;
  const std::vector<double>& field_;
  double level_;
  std::vector<std::array<EdgeCrossing, 2>> segments_;
};

}  // namespace

std::vector<Polyline> resonance_loci(const MapResult& map, int which) {
  const auto& field = which == 0 ? map.res1 : map.res2;
  return ContourBuilder(map.delta1, map.delta2, field, 0.0).run();
}

std::vector<Polyline> bistability_locus(const MapResult& map) {
  std::vector<double> field(map.stable_count.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    field[i] = static_cast<double>(map.stable_count[i]);
  return ContourBuilder(map.delta1, map.delta2, field, 1.5).run();
}

std::vector<Polyline> bistability_locus(const SystemConfig& cfg,
                                        const Axis& delta1, const Axis& delta2,
                                        int threads) {
  if (delta1.points < 16 || delta2.points < 16)
    throw ConfigError("bistability_locus: resolution must be at least 16x16");
  cfg.validate();
  std::vector<double> field(static_cast<std::size_t>(delta1.points) *
                            static_cast<std::size_t>(delta2.points));
  num::parallel_for(
      static_cast<std::size_t>(delta2.points), threads, [&](std::size_t i2) {
        for (int i1 = 0; i1 < delta1.points; ++i1) {
          const OperatingPoint op{delta1.at(i1), delta2.at(static_cast<int>(i2))};
          const auto b = classify_bistability(cfg, op);
          field[i2 * static_cast<std::size_t>(delta1.points) +
                static_cast<std::size_t>(i1)] =
              static_cast<double>(b.stable_count);
        }
      });
  return ContourBuilder(delta1, delta2, field, 1.5).run();
}

SpectrumStack spectrum_sweep(const SystemConfig& cfg, double delta1,
                             std::span<const double> delta2,
                             std::span<const double> omega,
                             Provenance provenance, int threads) {
  cfg.validate();
  SpectrumStack stack;
  stack.delta1 = delta1;
  stack.delta2.assign(delta2.begin(), delta2.end());
  stack.omega.assign(omega.begin(), omega.end());
  stack.provenance = provenance;
  const std::size_t rows = delta2.size();
  const std::size_t cols = omega.size();
  stack.s_xx.assign(rows * cols, nan_value);
  stack.status.assign(rows, CellStatus::ok);
  stack.kx0.assign(rows, nan_value);
  stack.drift_ok.assign(rows, 0);

  const double gamma_m = gas_damping(cfg.sphere, cfg.gas);

  // Serial branch-tracking pass; the spectra themselves run in parallel.
  std::vector<NoiseModel> models(rows);
  double prev_kx0 = -1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const OperatingPoint op{delta1, delta2[r]};
    const auto eqs = find_equilibria(cfg, op);
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
      stack.status[r] = CellStatus::no_equilibrium;
      continue;
    }
    const Equilibrium& eq = eqs[static_cast<std::size_t>(branch)];
    if (prev_kx0 >= 0.0) {
      double d = std::abs(eq.kx0 - prev_kx0);
      d = std::min(d, pi - d);
      if (d > 0.02 * pi) stack.branch_jumps.push_back(r);
    }
    prev_kx0 = eq.kx0;
    stack.kx0[r] = eq.kx0;
    if (!eq.trapping_defined) {
      stack.status[r] = CellStatus::untrapped;
      continue;
    }
    models[r] = make_noise_model(eq, cfg.cavity.kappa, gamma_m,
                                 cfg.gas.temperature);
  }

  num::parallel_for(rows, threads, [&](std::size_t r) {
    if (stack.status[r] != CellStatus::ok) return;
    const DriftModel dm = build_drift(models[r]);
    if (!drift_stable(dm)) return;  // row stays masked (NaN)
    stack.drift_ok[r] = 1;
    if (provenance == Provenance::semiclassical) {
      for (std::size_t c = 0; c < cols; ++c)
        stack.s_xx[r * cols + c] = semiclassical_sxx(dm, stack.omega[c]);
    } else {
      for (std::size_t c = 0; c < cols; ++c)
        stack.s_xx[r * cols + c] = quantum_sxx(models[r], stack.omega[c]);
    }
  });
  return stack;
}

std::vector<PressurePoint> pressure_sweep(const SystemConfig& cfg,
                                          const OperatingPoint& op,
                                          std::span<const double> pressures_pa) {
  cfg.validate();
  const auto eqs = find_equilibria(cfg, op);
  const int branch = default_branch(eqs);
  if (branch < 0)
    throw NumericalError("pressure_sweep: no stable equilibrium at this point");
  const Equilibrium& eq = eqs[static_cast<std::size_t>(branch)];
  if (!eq.trapping_defined)
    throw NumericalError("pressure_sweep: equilibrium has no harmonic trap");

  std::vector<PressurePoint> out(pressures_pa.size());
  for (std::size_t i = 0; i < pressures_pa.size(); ++i) {
    PressurePoint& p = out[i];
    p.pressure = pressures_pa[i];
    GasParams gas = cfg.gas;
    gas.pressure = pressures_pa[i];
    p.gamma_m = gas_damping(cfg.sphere, gas);

    const NoiseModel model =
        make_noise_model(eq, cfg.cavity.kappa, p.gamma_m, gas.temperature);
    const DriftModel dm = build_drift(model);
    p.n_semiclassical = steady_state_covariance(dm)(0, 0) - 0.5;
    p.n_quantum = phonon_number(
        [&model](double w) { return quantum_sxx(model, w); }, model, 1e-7);
    p.n_pt = phonon_pt(eq, cfg.cavity.kappa, p.gamma_m, gas.temperature).n_gas;
  }
  return out;
}

std::vector<SphereCurvePoint> sphere_curve(const SystemConfig& cfg,
                                           std::span<const double> radii,
                                           double photons_mode1) {
  if (cfg.drive.ratio != 1.0)
    throw ConfigError("sphere_curve: requires symmetric driving (ratio = 1)");
  if (!(photons_mode1 > 0.0))
    throw ConfigError("sphere_curve: photon number must be > 0");
  cfg.cavity.validate(true);

  const double k = cfg.cavity.wavenumber();
  // Symmetric stable point: midway between the two potential phases.
  const double u = 0.5 * (cfg.drive.phi1 + cfg.drive.phi2);
  const double c1 = std::cos(2.0 * (u - cfg.drive.phi1));
  const double c2 = std::cos(2.0 * (u - cfg.drive.phi2));
  const double s1 = std::sin(2.0 * (u - cfg.drive.phi1));

  std::vector<SphereCurvePoint> out(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    SphereCurvePoint& pt = out[i];
    SphereParams sphere = cfg.sphere;
    sphere.radius = radii[i];
    pt.radius = radii[i];
    pt.a0 = coupling_a0(sphere, cfg.cavity);
    const auto fs = cfg.finite_size(radii[i], k);
    pt.f = fs.f;
    pt.node_trapped = fs.node_trapped;
    pt.a = pt.a0 * fs.f * fs.f;

    const double mass = sphere.mass();
    const double n = photons_mode1;
    auto coupling_at = [&](double a_value) {
      const double wm_sq =
          2.0 * hbar * a_value * k * k / mass * n * (c1 + c2);
      if (!(wm_sq > 0.0)) return std::array<double, 2>{0.0, 0.0};
      const double wm = std::sqrt(wm_sq);
      const double x_zpf = std::sqrt(hbar / (2.0 * mass * wm));
      const double ng = std::sqrt(2.0) * k * a_value * x_zpf * s1 * std::sqrt(n);
      return std::array<double, 2>{wm, ng};
    };
    const auto full = coupling_at(pt.a);
    pt.omega_m = full[0];
    pt.ng1 = full[1];
    const auto ideal = coupling_at(pt.a0);
    pt.ng1_modulated = ideal[1] * fs.f;
  }
  return out;
}

}  // namespace levsim
