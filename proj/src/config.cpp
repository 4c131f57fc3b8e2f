#include "levsim/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "levsim/errors.hpp"

namespace levsim {

using nlohmann::json;
using namespace constants;

void DriveParams::validate() const {
  if (power1 < 0.0) throw ConfigError("drive: power1 must be >= 0");
  if (ratio < 0.0 || ratio > 1.0)
    throw ConfigError("drive: ratio must lie in [0, 1]");
  if (!std::isfinite(phi1) || !std::isfinite(phi2))
    throw ConfigError("drive: phases must be finite");
}

double SystemConfig::coupling() const {
  if (coupling_mode == CouplingMode::explicit_value) return coupling_value;
  const double a0 = coupling_a0(sphere, cavity);
  const double f = finite_size(sphere.radius, cavity.wavenumber()).f;
  return a0 * f * f;
}

double SystemConfig::drive_amplitude1() const {
  // Input coupling through one mirror at rate kappa/2:
  // E1 = sqrt(kappa_in P1 / (hbar omega_L)) with kappa_in = kappa / 2.
  return std::sqrt(0.5 * cavity.kappa * drive.power1 /
                   (hbar * cavity.omega_laser()));
}

double SystemConfig::bath_occupancy(double omega_m) const {
  return k_boltzmann * gas.temperature / (hbar * omega_m);
}

void SystemConfig::validate() const {
  sphere.validate();
  cavity.validate(coupling_mode == CouplingMode::geometric);
  drive.validate();
  gas.validate();
  if (coupling_mode == CouplingMode::explicit_value && coupling_value < 0.0)
    throw ConfigError("coupling: a must be >= 0");
}

namespace {

void check_keys(const json& j, const std::string& path,
                const std::set<std::string>& allowed) {
  if (!j.is_object())
    throw ConfigError("config: '" + path + "' must be an object");
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key()))
      throw ConfigError("config: unknown key '" + path + "." + item.key() +
                        "'");
  }
}

double require_number(const json& j, const std::string& path,
                      const std::string& key) {
  if (!j.contains(key))
    throw ConfigError("config: missing key '" + path + "." + key + "'");
  if (!j.at(key).is_number())
    throw ConfigError("config: '" + path + "." + key + "' must be a number");
  return j.at(key).get<double>();
}

double optional_number(const json& j, const std::string& path,
                       const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError("config: '" + path + "." + key + "' must be a number");
  return j.at(key).get<double>();
}

// One rate in rad/s from key_rad_s | key_hz | key_mhz (exactly one).
std::optional<double> read_rate(const json& j, const std::string& path,
                                const std::string& base) {
  const std::string k_rad = base + "_rad_s";
  const std::string k_hz = base + "_hz";
  const std::string k_mhz = base + "_mhz";
  int present = j.contains(k_rad) + j.contains(k_hz) + j.contains(k_mhz);
  if (present == 0) return std::nullopt;
  if (present > 1)
    throw ConfigError("config: give only one of '" + path + "." + k_rad +
                      "', '" + k_hz + "', '" + k_mhz + "'");
  if (j.contains(k_rad)) return require_number(j, path, k_rad);
  if (j.contains(k_hz)) return 2.0 * pi * require_number(j, path, k_hz);
  return 2.0 * pi * 1e6 * require_number(j, path, k_mhz);
}

double require_rate(const json& j, const std::string& path,
                    const std::string& base) {
  auto v = read_rate(j, path, base);
  if (!v)
    throw ConfigError("config: missing key '" + path + "." + base +
                      "_rad_s' (or _hz / _mhz)");
  return *v;
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  check_keys(j, "", {"schema_version", "sphere", "cavity", "coupling", "drive",
                     "gas", "operating_point"});
  if (j.contains("schema_version")) {
    if (!j.at("schema_version").is_number_integer())
      throw ConfigError("config: 'schema_version' must be an integer");
    cfg.schema_version = j.at("schema_version").get<int>();
    if (cfg.schema_version != 1)
      throw ConfigError("config: unsupported schema_version " +
                        std::to_string(cfg.schema_version));
  }

  if (!j.contains("sphere")) throw ConfigError("config: missing 'sphere'");
  {
    const json& s = j.at("sphere");
    check_keys(s, "sphere",
               {"radius_nm", "radius_m", "density_kg_m3", "refractive_index"});
    if (s.contains("radius_nm") && s.contains("radius_m"))
      throw ConfigError("config: give only one of 'sphere.radius_nm', 'sphere.radius_m'");
    if (s.contains("radius_m"))
      cfg.system.sphere.radius = require_number(s, "sphere", "radius_m");
    else
      cfg.system.sphere.radius = require_number(s, "sphere", "radius_nm") * 1e-9;
    cfg.system.sphere.density =
        optional_number(s, "sphere", "density_kg_m3", 2000.0);
    cfg.system.sphere.refractive_index =
        optional_number(s, "sphere", "refractive_index", 1.45);
  }

  if (!j.contains("cavity")) throw ConfigError("config: missing 'cavity'");
  {
    const json& c = j.at("cavity");
    check_keys(c, "cavity",
               {"wavelength_nm", "wavelength_m", "kappa_rad_s", "kappa_hz",
                "kappa_mhz", "length_cm", "length_m", "waist_um", "waist_m"});
    if (c.contains("wavelength_nm") && c.contains("wavelength_m"))
      throw ConfigError("config: give only one of 'cavity.wavelength_nm', 'cavity.wavelength_m'");
    if (c.contains("wavelength_m"))
      cfg.system.cavity.wavelength = require_number(c, "cavity", "wavelength_m");
    else
      cfg.system.cavity.wavelength =
          require_number(c, "cavity", "wavelength_nm") * 1e-9;
    cfg.system.cavity.kappa = require_rate(c, "cavity", "kappa");
    if (c.contains("length_cm") && c.contains("length_m"))
      throw ConfigError("config: give only one of 'cavity.length_cm', 'cavity.length_m'");
    if (c.contains("length_cm"))
      cfg.system.cavity.length = require_number(c, "cavity", "length_cm") * 1e-2;
    else if (c.contains("length_m"))
      cfg.system.cavity.length = require_number(c, "cavity", "length_m");
    if (c.contains("waist_um") && c.contains("waist_m"))
      throw ConfigError("config: give only one of 'cavity.waist_um', 'cavity.waist_m'");
    if (c.contains("waist_um"))
      cfg.system.cavity.waist = require_number(c, "cavity", "waist_um") * 1e-6;
    else if (c.contains("waist_m"))
      cfg.system.cavity.waist = require_number(c, "cavity", "waist_m");
  }

  if (!j.contains("coupling")) throw ConfigError("config: missing 'coupling'");
  {
    const json& c = j.at("coupling");
    check_keys(c, "coupling",
               {"mode", "a_rad_s", "a_hz", "a_mhz", "finite_size"});
    std::string mode = "explicit";
    if (c.contains("mode")) {
      if (!c.at("mode").is_string())
        throw ConfigError("config: 'coupling.mode' must be a string");
      mode = c.at("mode").get<std::string>();
    }
    if (mode == "explicit") {
      cfg.system.coupling_mode = CouplingMode::explicit_value;
      cfg.system.coupling_value = require_rate(c, "coupling", "a");
    } else if (mode == "geometric") {
      cfg.system.coupling_mode = CouplingMode::geometric;
      if (read_rate(c, "coupling", "a"))
        throw ConfigError("config: 'coupling.a_*' not allowed in geometric mode");
    } else {
      throw ConfigError("config: 'coupling.mode' must be 'explicit' or 'geometric'");
    }
    if (c.contains("finite_size")) {
      const json& f = c.at("finite_size");
      check_keys(f, "coupling.finite_size", {"model", "table_csv"});
      std::string model = "analytic";
      if (f.contains("model")) {
        if (!f.at("model").is_string())
          throw ConfigError("config: 'coupling.finite_size.model' must be a string");
        model = f.at("model").get<std::string>();
      }
      if (model == "analytic") {
        cfg.system.finite_size = FiniteSizeModel::analytic();
      } else if (model == "unity") {
        cfg.system.finite_size = FiniteSizeModel::unity();
      } else if (model == "tabulated") {
        if (!f.contains("table_csv") || !f.at("table_csv").is_string())
          throw ConfigError(
              "config: tabulated finite_size needs 'coupling.finite_size.table_csv'");
        cfg.finite_size_table = f.at("table_csv").get<std::string>();
        cfg.system.finite_size = FiniteSizeModel::from_csv(cfg.finite_size_table);
      } else {
        throw ConfigError(
            "config: 'coupling.finite_size.model' must be analytic, tabulated or unity");
      }
    }
  }

  if (!j.contains("drive")) throw ConfigError("config: missing 'drive'");
  {
    const json& d = j.at("drive");
    check_keys(d, "drive",
               {"power1_mw", "power1_w", "ratio", "phi1_rad", "phi2_rad"});
    if (d.contains("power1_mw") && d.contains("power1_w"))
      throw ConfigError("config: give only one of 'drive.power1_mw', 'drive.power1_w'");
    if (d.contains("power1_mw"))
      cfg.system.drive.power1 = require_number(d, "drive", "power1_mw") * 1e-3;
    else
      cfg.system.drive.power1 = require_number(d, "drive", "power1_w");
    cfg.system.drive.ratio = require_number(d, "drive", "ratio");
    cfg.system.drive.phi1 = optional_number(d, "drive", "phi1_rad", 0.0);
    cfg.system.drive.phi2 = optional_number(d, "drive", "phi2_rad", pi / 4.0);
  }

  if (j.contains("gas")) {
    const json& g = j.at("gas");
    check_keys(g, "gas",
               {"pressure_mbar", "pressure_pa", "temperature_k",
                "molecular_mass_amu", "molecular_mass_kg"});
    if (g.contains("molecular_mass_amu") && g.contains("molecular_mass_kg"))
      throw ConfigError("config: give only one of 'gas.molecular_mass_amu', 'gas.molecular_mass_kg'");
    if (g.contains("pressure_mbar") && g.contains("pressure_pa"))
      throw ConfigError("config: give only one of 'gas.pressure_mbar', 'gas.pressure_pa'");
    if (g.contains("pressure_mbar"))
      cfg.system.gas.pressure =
          require_number(g, "gas", "pressure_mbar") * mbar_to_pa;
    else if (g.contains("pressure_pa"))
      cfg.system.gas.pressure = require_number(g, "gas", "pressure_pa");
    cfg.system.gas.temperature = optional_number(g, "gas", "temperature_k", 300.0);
    if (g.contains("molecular_mass_kg"))
      cfg.system.gas.molecular_mass = require_number(g, "gas", "molecular_mass_kg");
    else
      cfg.system.gas.molecular_mass =
          optional_number(g, "gas", "molecular_mass_amu", 28.97) * amu;
  }

  if (j.contains("operating_point")) {
    const json& o = j.at("operating_point");
    check_keys(o, "operating_point",
               {"delta1_rad_s", "delta1_hz", "delta1_mhz", "delta2_rad_s",
                "delta2_hz", "delta2_mhz"});
    OperatingPoint op;
    op.delta1 = require_rate(o, "operating_point", "delta1");
    op.delta2 = require_rate(o, "operating_point", "delta2");
    cfg.operating_point = op;
  }

  cfg.system.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config: JSON parse error in " + path + ": " + e.what());
  }
  return parse_config(j);
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = cfg.schema_version;
  j["sphere"] = {{"radius_m", cfg.system.sphere.radius},
                 {"density_kg_m3", cfg.system.sphere.density},
                 {"refractive_index", cfg.system.sphere.refractive_index}};
  json c = {{"wavelength_m", cfg.system.cavity.wavelength},
            {"kappa_rad_s", cfg.system.cavity.kappa}};
  if (cfg.system.cavity.length > 0.0) c["length_m"] = cfg.system.cavity.length;
  if (cfg.system.cavity.waist > 0.0) c["waist_m"] = cfg.system.cavity.waist;
  j["cavity"] = c;
  json coup;
  if (cfg.system.coupling_mode == CouplingMode::explicit_value) {
    coup["mode"] = "explicit";
    coup["a_rad_s"] = cfg.system.coupling_value;
  } else {
    coup["mode"] = "geometric";
  }
  switch (cfg.system.finite_size.kind()) {
    case FiniteSizeModel::Kind::analytic:
      coup["finite_size"] = {{"model", "analytic"}};
      break;
    case FiniteSizeModel::Kind::unity:
      coup["finite_size"] = {{"model", "unity"}};
      break;
    case FiniteSizeModel::Kind::tabulated:
      coup["finite_size"] = {{"model", "tabulated"},
                             {"table_csv", cfg.finite_size_table}};
      break;
  }
  j["coupling"] = coup;
  j["drive"] = {{"power1_w", cfg.system.drive.power1},
                {"ratio", cfg.system.drive.ratio},
                {"phi1_rad", cfg.system.drive.phi1},
                {"phi2_rad", cfg.system.drive.phi2}};
  j["gas"] = {{"pressure_pa", cfg.system.gas.pressure},
              {"temperature_k", cfg.system.gas.temperature},
              {"molecular_mass_kg", cfg.system.gas.molecular_mass}};
  if (cfg.operating_point) {
    j["operating_point"] = {{"delta1_rad_s", cfg.operating_point->delta1},
                            {"delta2_rad_s", cfg.operating_point->delta2}};
  }
  return j;
}

}  // namespace levsim
