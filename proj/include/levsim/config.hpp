#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "levsim/sphere.hpp"

namespace levsim {

struct DriveParams {
  double power1 = 0.0;                 // W into mode 1
  double ratio = 0.0;                  // R = E2 / E1, in [0, 1]
  double phi1 = 0.0;                   // rad
  double phi2 = constants::pi / 4.0;   // rad
  void validate() const;
};

struct OperatingPoint {
  double delta1 = 0.0;  // rad/s
  double delta2 = 0.0;  // rad/s
};

enum class CouplingMode { geometric, explicit_value };

// Full physical description of the system. The dispersive coupling A is
// either specified directly (the usual way to pin a working point) or
// derived from the cavity geometry as A0(r) f^2(r).
struct SystemConfig {
  SphereParams sphere;
  CavityParams cavity;
  DriveParams drive;
  GasParams gas;
  FiniteSizeModel finite_size = FiniteSizeModel::analytic();
  CouplingMode coupling_mode = CouplingMode::explicit_value;
  double coupling_value = 0.0;  // A in rad/s when explicit

  double coupling() const;          // A(r), rad/s
  // E1 = sqrt((kappa/2) P1 / (hbar omega_L)): one input mirror at kappa/2.
  double drive_amplitude1() const;
  double bath_occupancy(double omega_m) const;  // kB T / (hbar omega_m)
  void validate() const;
};

struct RunConfig {
  int schema_version = 1;
  SystemConfig system;
  std::optional<OperatingPoint> operating_point;
  // Path of the finite-size table if one was loaded (echoed to sidecars).
  std::string finite_size_table;
};

// Strict JSON parsing: unknown keys are rejected with their full path.
// Frequency-like quantities accept one of the suffixes _rad_s, _hz or
// _mhz per key (exactly one spelling may be present).
RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Canonical JSON echo (rad/s, nm, mW, mbar keys). Feeding the result back
// through parse_config reproduces the same RunConfig.
nlohmann::json config_to_json(const RunConfig& cfg);

}  // namespace levsim
