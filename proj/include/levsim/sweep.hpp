#pragma once

#include <span>
#include <vector>

#include "levsim/spectra.hpp"

// Grid sweeps over the detuning plane and 1-D parameter sweeps. Cells are
// computed independently (parallel across rows), each carrying a status;
// branch selection follows the deepest stable minimum per cell, and the
// 1-D sweeps track a branch continuously via nearest-position matching.
namespace levsim {

struct Axis {
  double min = 0.0;
  double max = 0.0;
  int points = 0;
  double at(int i) const {
    return points > 1
               ? min + (max - min) * static_cast<double>(i) /
                     static_cast<double>(points - 1)
               : min;
  }
};

enum class CellStatus : int { ok = 0, no_equilibrium = 1, untrapped = 2 };

struct MapResult {
  Axis delta1, delta2;
  // Row-major over (i2, i1): index = i2 * delta1.points + i1.
  std::vector<double> gamma_opt;
  std::vector<double> n_pt;        // gas-limited PT phonon number
  std::vector<double> omega_m;
  std::vector<double> ng1, ng2;    // field-enhanced couplings
  std::vector<double> kx0;
  std::vector<double> res1, res2;  // -Dj^x - wM (zero on resonance locus)
  std::vector<int> stable_count;
  std::vector<uint8_t> drift_ok;
  std::vector<CellStatus> status;
  std::size_t index(int i1, int i2) const {
    return static_cast<std::size_t>(i2) *
               static_cast<std::size_t>(delta1.points) +
           static_cast<std::size_t>(i1);
  }
};

MapResult cooling_map(const SystemConfig& cfg, const Axis& delta1,
                      const Axis& delta2, int threads = 0);

struct Polyline {
  std::vector<std::array<double, 2>> points;  // (delta1, delta2)
};

// Zero contours of the single-field resonance conditions -Dj^x = wM.
std::vector<Polyline> resonance_loci(const MapResult& map, int which);

// Boundary of the bistable region (stable-equilibria count crossing 1<->2).
std::vector<Polyline> bistability_locus(const SystemConfig& cfg,
                                        const Axis& delta1, const Axis& delta2,
                                        int threads = 0);
std::vector<Polyline> bistability_locus(const MapResult& map);

struct SpectrumStack {
  double delta1 = 0.0;
  std::vector<double> delta2;
  std::vector<double> omega;
  // Row-major: s[i_delta2 * omega.size() + i_omega].
  std::vector<double> s_xx;
  std::vector<CellStatus> status;
  std::vector<double> kx0;
  std::vector<uint8_t> drift_ok;
  Provenance provenance = Provenance::semiclassical;
  // Indices where the tracked branch jumped discontinuously.
  std::vector<std::size_t> branch_jumps;
};

SpectrumStack spectrum_sweep(const SystemConfig& cfg, double delta1,
                             std::span<const double> delta2,
                             std::span<const double> omega,
                             Provenance provenance, int threads = 0);

// Phonon-number comparison along a pressure sweep (quantum integral,
// Lyapunov covariance, perturbation theory).
struct PressurePoint {
  double pressure = 0.0;  // Pa
  double gamma_m = 0.0;
  double n_quantum = 0.0;
  double n_semiclassical = 0.0;
  double n_pt = 0.0;
};
std::vector<PressurePoint> pressure_sweep(const SystemConfig& cfg,
                                          const OperatingPoint& op,
                                          std::span<const double> pressures_pa);

// Sphere-size dependence at fixed intracavity photon number, evaluated at
// the symmetric operating point. Two coupling curves are reported:
//   ng1           - self-consistent value from the f^2-corrected coupling
//                   (the trap softening feeds back into x_zpf);
//   ng1_modulated - point-dipole value times a single factor f(r).
struct SphereCurvePoint {
  double radius = 0.0;
  double f = 1.0;
  bool node_trapped = false;
  double a0 = 0.0;
  double a = 0.0;
  double omega_m = 0.0;
  double ng1 = 0.0;
  double ng1_modulated = 0.0;
};
std::vector<SphereCurvePoint> sphere_curve(const SystemConfig& cfg,
                                           std::span<const double> radii,
                                           double photons_mode1);

}  // namespace levsim
