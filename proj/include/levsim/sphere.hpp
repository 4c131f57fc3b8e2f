#pragma once

#include <array>
#include <string>
#include <vector>

#include "levsim/constants.hpp"

// Nanosphere, cavity and gas parameters plus every quantity that depends
// only on them: the dispersive coupling scale A, the finite-size correction
// f(r), kinetic-theory gas damping and standing-wave trap frequencies.
//
// All rates and angular frequencies are stored in rad/s, all lengths in
// metres. Conversions from user-facing units happen at the config layer.
namespace levsim {

struct SphereParams {
  double radius = 0.0;               // m
  double density = 2000.0;           // kg / m^3 (fused silica)
  double refractive_index = 1.45;

  double volume() const;             // (4/3) pi r^3
  double mass() const;               // volume * density
  double epsilon_r() const;          // n^2
  void validate() const;
};

struct CavityParams {
  double length = 0.0;      // m; 0 means "not specified"
  double waist = 0.0;       // m; 0 means "not specified"
  double wavelength = 0.0;  // m
  double kappa = 0.0;       // rad/s, total field decay of each mode

  double wavenumber() const;   // 2 pi / lambda
  double omega_laser() const;  // 2 pi c / lambda
  double mode_volume() const;  // pi (w/2)^2 L
  bool has_geometry() const { return length > 0.0 && waist > 0.0; }
  void validate(bool need_geometry) const;
};

struct GasParams {
  double pressure = 0.0;          // Pa
  double temperature = 300.0;     // K
  double molecular_mass = 28.97 * constants::amu;  // air

  double number_density() const;  // P / (kB T)
  double mean_speed() const;      // sqrt(8 kB T / (pi m_g))
  void validate() const;
};

// Fringe-visibility factor of a sphere in a standing wave: the volume
// average of cos(2kx) over the sphere, G(q) = 3 (sin q - q cos q) / q^3
// with q = 2 k r. G -> 1 for small spheres and first crosses zero at
// q = 4.4934... (tan q = q).
double fringe_average(double q);

// Finite-size correction f(r) applied to the trap frequency, with
// A(r) = A0(r) f^2(r). The analytic variant is f = sqrt(|G(2kr)|); where
// G < 0 the stable trap sits at a field node and the value is flagged.
// The tabulated variant interpolates a measured (r, f) table linearly and
// clamps outside its range.
class FiniteSizeModel {
 public:
  enum class Kind { analytic, tabulated, unity };

  struct Value {
    double f = 1.0;
    bool node_trapped = false;
  };

  FiniteSizeModel() : kind_(Kind::analytic) {}
  static FiniteSizeModel analytic();
  static FiniteSizeModel unity();
  // Table rows are (radius [m], f), radii strictly increasing.
  static FiniteSizeModel tabulated(std::vector<std::array<double, 2>> table);
  // CSV with header "r_nm,f".
  static FiniteSizeModel from_csv(const std::string& path);

  Value operator()(double radius, double wavenumber) const;
  Kind kind() const { return kind_; }
  const std::vector<std::array<double, 2>>& table() const { return table_; }

 private:
  Kind kind_;
  std::vector<std::array<double, 2>> table_;
};

// Point-dipole dispersive coupling A0 = (3/2) (eps-1)/(eps+2) (Vs/Vc) wL.
// The Clausius-Mossotti factor matches the polarizability below.
double coupling_a0(const SphereParams& sphere, const CavityParams& cavity);

// alpha = 4 pi eps0 r^3 (n^2 - 1) / (n^2 + 2)
double polarizability(const SphereParams& sphere);

// Kinetic-theory damping Gamma_M = (8/3) pi (m_g/m_s) r^2 n_g vbar_g.
double gas_damping(const SphereParams& sphere, const GasParams& gas);

struct BeamParams {
  double power = 0.0;       // W per beam
  double waist = 0.0;       // m (focused spot radius)
  double wavelength = 0.0;  // m
};

struct TrapFrequencies {
  double axial = 0.0;       // rad/s, includes finite-size correction
  double transverse = 0.0;  // rad/s
  double ratio = 0.0;       // axial / transverse
  bool node_trapped = false;
};

// Standing-wave trap frequencies for a counter-propagating beam pair:
//   omega_a = sqrt(4 alpha k^2 I0 / (m eps0 c)) * f(r)
//   omega_t = sqrt(8 alpha I0 / (m eps0 c w^2))
// with the intensity scale I0 = P / (pi w^2); the factor 4 in the axial
// formula carries the standing-wave field enhancement.
TrapFrequencies trap_frequencies(const SphereParams& sphere,
                                 const BeamParams& beam,
                                 const FiniteSizeModel& finite_size =
                                     FiniteSizeModel::analytic());

}  // namespace levsim
