#include "levsim/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levsim/errors.hpp"

namespace levsim {

using namespace constants;

double SphereParams::volume() const {
  return 4.0 / 3.0 * pi * radius * radius * radius;
}

double SphereParams::mass() const { return volume() * density; }

double SphereParams::epsilon_r() const {
  return refractive_index * refractive_index;
}

void SphereParams::validate() const {
  if (!(radius > 0.0)) throw ConfigError("sphere: radius must be > 0");
  if (!(density > 0.0)) throw ConfigError("sphere: density must be > 0");
  if (!(refractive_index > 1.0))
    throw ConfigError("sphere: refractive_index must be > 1");
}

double CavityParams::wavenumber() const { return 2.0 * pi / wavelength; }

double CavityParams::omega_laser() const {
  return 2.0 * pi * c_light / wavelength;
}

double CavityParams::mode_volume() const {
  if (!has_geometry())
    throw ConfigError("cavity: length and waist required for mode volume");
  return pi * (waist / 2.0) * (waist / 2.0) * length;
}

void CavityParams::validate(bool need_geometry) const {
  if (!(wavelength > 0.0)) throw ConfigError("cavity: wavelength must be > 0");
  if (!(kappa > 0.0)) throw ConfigError("cavity: kappa must be > 0");
  if (need_geometry && !has_geometry())
    throw ConfigError("cavity: length and waist must be > 0 for geometric coupling");
  if (length < 0.0 || waist < 0.0)
    throw ConfigError("cavity: lengths must be >= 0");
}

double GasParams::number_density() const {
  return pressure / (k_boltzmann * temperature);
}

double GasParams::mean_speed() const {
  return std::sqrt(8.0 * k_boltzmann * temperature / (pi * molecular_mass));
}

void GasParams::validate() const {
  if (pressure < 0.0) throw ConfigError("gas: pressure must be >= 0");
  if (!(temperature > 0.0)) throw ConfigError("gas: temperature must be > 0");
  if (!(molecular_mass > 0.0))
    throw ConfigError("gas: molecular_mass must be > 0");
}

double fringe_average(double q) {
  if (std::abs(q) < 1e-4) {
    const double q2 = q * q;
    return 1.0 - q2 / 10.0 + q2 * q2 / 280.0;
  }
  return 3.0 * (std::sin(q) - q * std::cos(q)) / (q * q * q);
}

FiniteSizeModel FiniteSizeModel::analytic() {
  FiniteSizeModel m;
  m.kind_ = Kind::analytic;
  return m;
}

FiniteSizeModel FiniteSizeModel::unity() {
  FiniteSizeModel m;
  m.kind_ = Kind::unity;
  return m;
}

FiniteSizeModel FiniteSizeModel::tabulated(
    std::vector<std::array<double, 2>> table) {
  if (table.empty())
    throw ConfigError("finite_size: tabulated model needs a non-empty table");
  for (std::size_t i = 0; i + 1 < table.size(); ++i)
    if (!(table[i][0] < table[i + 1][0]))
      throw ConfigError("finite_size: table radii must be strictly increasing");
  for (const auto& row : table)
    if (row[1] < 0.0 || row[1] > 1.5)
      throw ConfigError("finite_size: table f values must lie in [0, 1.5]");
  FiniteSizeModel m;
  m.kind_ = Kind::tabulated;
  m.table_ = std::move(table);
  return m;
}

FiniteSizeModel FiniteSizeModel::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("finite_size: cannot open table " + path);
  std::string line;
  if (!std::getline(in, line))
    throw ConfigError("finite_size: empty table " + path);
  // Tolerate trailing CR from DOS files.
  while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
    line.pop_back();
  if (line != "r_nm,f")
    throw ConfigError("finite_size: expected header 'r_nm,f' in " + path);
  std::vector<std::array<double, 2>> table;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double r_nm = 0.0, f = 0.0;
    char comma = 0;
    if (!(ss >> r_nm >> comma >> f) || comma != ',')
      throw ConfigError("finite_size: bad row at line " +
                        std::to_string(lineno) + " of " + path);
    table.push_back({r_nm * 1e-9, f});
  }
  return tabulated(std::move(table));
}

FiniteSizeModel::Value FiniteSizeModel::operator()(double radius,
                                                   double wavenumber) const {
  if (!(radius > 0.0))
    throw ConfigError("finite_size: radius must be > 0");
  Value out;
  switch (kind_) {
    case Kind::unity:
      return out;
    case Kind::analytic: {
      const double g = fringe_average(2.0 * wavenumber * radius);
      out.node_trapped = g < 0.0;
      out.f = std::sqrt(std::abs(g));
      return out;
    }
    case Kind::tabulated: {
      if (table_.empty())
        throw ConfigError("finite_size: tabulated model has empty table");
      if (radius <= table_.front()[0]) {
        out.f = table_.front()[1];
      } else if (radius >= table_.back()[0]) {
        out.f = table_.back()[1];
      } else {
        auto hi = std::upper_bound(
            table_.begin(), table_.end(), radius,
            [](double r, const std::array<double, 2>& row) { return r < row[0]; });
        auto lo = hi - 1;
        const double t = (radius - (*lo)[0]) / ((*hi)[0] - (*lo)[0]);
        out.f = (*lo)[1] + t * ((*hi)[1] - (*lo)[1]);
      }
      return out;
    }
  }
  return out;
}

double coupling_a0(const SphereParams& sphere, const CavityParams& cavity) {
  sphere.validate();
  cavity.validate(true);
  const double eps = sphere.epsilon_r();
  return 1.5 * (eps - 1.0) / (eps + 2.0) * sphere.volume() /
         cavity.mode_volume() * cavity.omega_laser();
}

double polarizability(const SphereParams& sphere) {
  const double n2 = sphere.epsilon_r();
  return 4.0 * pi * epsilon0 * std::pow(sphere.radius, 3) * (n2 - 1.0) /
         (n2 + 2.0);
}

double gas_damping(const SphereParams& sphere, const GasParams& gas) {
  sphere.validate();
  gas.validate();
  return 8.0 / 3.0 * pi * (gas.molecular_mass / sphere.mass()) *
         sphere.radius * sphere.radius * gas.number_density() *
         gas.mean_speed();
}

TrapFrequencies trap_frequencies(const SphereParams& sphere,
                                 const BeamParams& beam,
                                 const FiniteSizeModel& finite_size) {
  sphere.validate();
  if (beam.power < 0.0) throw ConfigError("beam: power must be >= 0");
  if (!(beam.waist > 0.0)) throw ConfigError("beam: waist must be > 0");
  if (!(beam.wavelength > 0.0))
    throw ConfigError("beam: wavelength must be > 0");

  const double k = 2.0 * pi / beam.wavelength;
  const double intensity = beam.power / (pi * beam.waist * beam.waist);
  const double alpha_over_m = polarizability(sphere) / sphere.mass();
  const double axial_sq =
      4.0 * alpha_over_m * k * k * intensity / (epsilon0 * c_light);
  const double transverse_sq = 8.0 * alpha_over_m * intensity /
                               (epsilon0 * c_light * beam.waist * beam.waist);

  const auto fs = finite_size(sphere.radius, k);
  TrapFrequencies out;
  out.axial = std::sqrt(axial_sq) * fs.f;
  out.transverse = std::sqrt(transverse_sq);
  out.ratio = out.transverse > 0.0 ? out.axial / out.transverse : 0.0;
  out.node_trapped = fs.node_trapped;
  return out;
}

}  // namespace levsim
