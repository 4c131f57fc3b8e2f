// levsim: levitated-nanosphere cavity optomechanics simulator.
//
// Subcommands: equilibrium | map | spectrum | sweep | bistability |
// fitpsd | sphere. Every file-producing command writes its outputs
// atomically together with a <prefix>_meta.json sidecar that echoes the
// fully resolved configuration; the sidecar's "config" object can be fed
// back as a config file to reproduce the run.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "levsim/cooling.hpp"
#include "levsim/errors.hpp"
#include "levsim/io.hpp"
#include "levsim/numerics.hpp"
#include "levsim/sweep.hpp"

using namespace levsim;
using nlohmann::json;

namespace {

struct CommonOpts {
  std::string config_path;
  std::string output_prefix = "levsim_out";
  int threads = 0;
};

RunConfig load(const CommonOpts& opts) {
  if (opts.config_path.empty())
    throw ConfigError("missing --config (see --help)");
  return load_config(opts.config_path);
}

OperatingPoint require_op(const RunConfig& cfg) {
  if (!cfg.operating_point)
    throw ConfigError(
        "config: this command needs an 'operating_point' section");
  return *cfg.operating_point;
}

void write_meta(const std::string& prefix, const std::string& command,
                const RunConfig& cfg, const json& options,
                const std::vector<std::string>& outputs) {
  json meta;
  meta["tool"] = "levsim";
  meta["command"] = command;
  meta["config"] = config_to_json(cfg);
  meta["options"] = options;
  meta["outputs"] = outputs;
  io::atomic_write(prefix + "_meta.json", meta.dump(2) + "\n");
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] =
        n > 1 ? lo + (hi - lo) * static_cast<double>(i) /
                    static_cast<double>(n - 1)
              : lo;
  return out;
}

std::vector<double> logspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  const double llo = std::log10(lo);
  const double lhi = std::log10(hi);
  for (int i = 0; i < n; ++i)
    out[static_cast<std::size_t>(i)] = std::pow(
        10.0, n > 1 ? llo + (lhi - llo) * static_cast<double>(i) /
                          static_cast<double>(n - 1)
                    : llo);
  return out;
}

int run_equilibrium(const CommonOpts& opts, const std::string& out_path,
                    bool pretty) {
  const RunConfig cfg = load(opts);
  const OperatingPoint op = require_op(cfg);
  const auto eqs = find_equilibria(cfg.system, op);
  json report;
  report["operating_point"] = {{"delta1_rad_s", op.delta1},
                               {"delta2_rad_s", op.delta2}};
  report["equilibria"] = io::equilibria_json(eqs);
  report["default_branch"] = default_branch(eqs);
  int stable = 0;
  for (const auto& e : eqs)
    if (e.stable) ++stable;
  report["stable_count"] = stable;
  report["bistable"] = stable >= 2;

  if (pretty) {
    std::printf("equilibria in one period [0, pi/k):\n");
    for (std::size_t i = 0; i < eqs.size(); ++i) {
      const auto& e = eqs[i];
      std::printf(
          "  branch %zu: kx0 = %.9f rad  (%s)\n"
          "    n = (%.4g, %.4g)  Delta^x = (%.6g, %.6g) rad/s\n",
          i, e.kx0, e.stable ? "stable" : "unstable", e.photons[0],
          e.photons[1], e.delta_x[0], e.delta_x[1]);
      if (e.trapping_defined)
        std::printf(
            "    omega_m = %.6g rad/s (%.6g Hz)  ng = (%.6g, %.6g) rad/s  "
            "V = %.6g J\n",
            e.omega_m, e.omega_m / (2 * constants::pi), e.g_field[0],
            e.g_field[1], e.potential);
      else
        std::printf("    no harmonic trap at this point (omega_m^2 <= 0)\n");
    }
    if (stable == 0) std::printf("  no stable equilibrium\n");
  } else {
    std::printf("%s\n", report.dump(2).c_str());
  }
  if (!out_path.empty()) io::atomic_write(out_path, report.dump(2) + "\n");
  return 0;
}

int run_map(const CommonOpts& opts, double d1_min, double d1_max,
            double d2_min, double d2_max, int resolution) {
  const RunConfig cfg = load(opts);
  const Axis a1{d1_min, d1_max, resolution};
  const Axis a2{d2_min, d2_max, resolution};
  const MapResult map = cooling_map(cfg.system, a1, a2, opts.threads);
  io::atomic_write(opts.output_prefix + "_map.csv", io::map_csv(map));
  json loci;
  loci["resonance_mode1"] = io::polylines_json(resonance_loci(map, 0));
  loci["resonance_mode2"] = io::polylines_json(resonance_loci(map, 1));
  loci["bistability"] = io::polylines_json(bistability_locus(map));
  io::atomic_write(opts.output_prefix + "_loci.json", loci.dump(2) + "\n");
  write_meta(opts.output_prefix, "map", cfg,
             {{"delta1_min_rad_s", d1_min},
              {"delta1_max_rad_s", d1_max},
              {"delta2_min_rad_s", d2_min},
              {"delta2_max_rad_s", d2_max},
              {"resolution", resolution}},
             {opts.output_prefix + "_map.csv", opts.output_prefix + "_loci.json"});
  return 0;
}

int run_spectrum(const CommonOpts& opts, const std::string& method,
                 int points) {
  const RunConfig cfg = load(opts);
  const OperatingPoint op = require_op(cfg);
  const auto eqs = find_equilibria(cfg.system, op);
  const int branch = default_branch(eqs);
  if (branch < 0)
    throw NumericalError("spectrum: no stable equilibrium at this point");
  const auto& eq = eqs[static_cast<std::size_t>(branch)];
  const double gamma_m = gas_damping(cfg.system.sphere, cfg.system.gas);
  const NoiseModel model = make_noise_model(
      eq, cfg.system.cavity.kappa, gamma_m, cfg.system.gas.temperature);
  const auto grid = default_grid(model, static_cast<std::size_t>(points));

  std::vector<std::string> outputs;
  if (method == "quantum" || method == "both") {
    auto s = quantum_spectrum(model, grid);
    const std::string path = opts.output_prefix + "_quantum.csv";
    io::atomic_write(path, io::spectrum_csv(s));
    outputs.push_back(path);
  }
  if (method == "semiclassical" || method == "both") {
    auto s = semiclassical_spectrum(build_drift(model), grid);
    const std::string path = opts.output_prefix + "_semiclassical.csv";
    io::atomic_write(path, io::spectrum_csv(s));
    outputs.push_back(path);
  }
  json options = {{"method", method},
                  {"points", points},
                  {"branch", branch},
                  {"kx0_rad", eq.kx0},
                  {"omega_m_rad_s", eq.omega_m},
                  {"gamma_m_rad_s", gamma_m}};
  write_meta(opts.output_prefix, "spectrum", cfg, options, outputs);
  return 0;
}

int run_sweep(const CommonOpts& opts, const std::string& along,
              const std::string& emit, double d2_min, double d2_max,
              int d2_points, double omega_max, int omega_points,
              const std::string& method, double p_min_mbar, double p_max_mbar,
              int p_points, bool binary) {
  const RunConfig cfg = load(opts);
  std::vector<std::string> outputs;
  json options = {{"along", along}, {"emit", emit}};

  if (along == "pressure") {
    const OperatingPoint op = require_op(cfg);
    const auto pressures = logspace(p_min_mbar * constants::mbar_to_pa,
                                    p_max_mbar * constants::mbar_to_pa,
                                    p_points);
    const auto pts = pressure_sweep(cfg.system, op, pressures);
    const std::string path = opts.output_prefix + "_phonons.csv";
    io::atomic_write(path, io::pressure_csv(pts));
    outputs.push_back(path);
    options["pressure_min_mbar"] = p_min_mbar;
    options["pressure_max_mbar"] = p_max_mbar;
    options["points"] = p_points;
  } else if (along == "delta2") {
    const OperatingPoint op = require_op(cfg);
    const auto d2 = linspace(d2_min, d2_max, d2_points);
    options["delta1_rad_s"] = op.delta1;
    options["delta2_min_rad_s"] = d2_min;
    options["delta2_max_rad_s"] = d2_max;
    options["delta2_points"] = d2_points;
    if (emit == "eigen") {
      const auto scan = crossing_scan(cfg.system, op.delta1, d2);
      const std::string path = opts.output_prefix + "_eigen.csv";
      io::atomic_write(path, io::crossing_csv(scan));
      outputs.push_back(path);
      json minima = json::array();
      for (const auto& gm : scan.minima)
        minima.push_back({{"delta2_rad_s", gm.delta2},
                          {"pair", gm.pair},
                          {"gap_rad_s", gm.gap},
                          {"character_swap", gm.character_swap}});
      io::atomic_write(opts.output_prefix + "_gaps.json",
                       minima.dump(2) + "\n");
      outputs.push_back(opts.output_prefix + "_gaps.json");
    } else if (emit == "spectra") {
      const auto omega = linspace(-omega_max, omega_max, omega_points);
      const Provenance prov = method == "quantum" ? Provenance::quantum
                                                  : Provenance::semiclassical;
      const auto stack =
          spectrum_sweep(cfg.system, op.delta1, d2, omega, prov, opts.threads);
      options["omega_max_rad_s"] = omega_max;
      options["omega_points"] = omega_points;
      options["method"] = method;
      json jumps = json::array();
      for (auto r : stack.branch_jumps) jumps.push_back(stack.delta2[r]);
      options["branch_jumps_delta2_rad_s"] = jumps;
      if (binary) {
        const std::string path = opts.output_prefix + "_stack.bin";
        io::atomic_write(path, io::stack_binary(stack));
        outputs.push_back(path);
      } else {
        const std::string path = opts.output_prefix + "_stack.csv";
        io::atomic_write(path, io::stack_csv(stack));
        outputs.push_back(path);
      }
    } else {
      throw ConfigError("sweep: --emit must be 'spectra' or 'eigen' for --along delta2");
    }
  } else {
    throw ConfigError("sweep: --along must be 'delta2' or 'pressure'");
  }
  write_meta(opts.output_prefix, "sweep", cfg, options, outputs);
  return 0;
}

int run_bistability(const CommonOpts& opts, double d1_min, double d1_max,
                    double d2_min, double d2_max, int resolution) {
  const RunConfig cfg = load(opts);
  const Axis a1{d1_min, d1_max, resolution};
  const Axis a2{d2_min, d2_max, resolution};
  std::vector<int> counts(
      static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution));
  num::parallel_for(
      static_cast<std::size_t>(resolution), opts.threads, [&](std::size_t i2) {
        for (int i1 = 0; i1 < resolution; ++i1) {
          const OperatingPoint op{a1.at(i1), a2.at(static_cast<int>(i2))};
          counts[i2 * static_cast<std::size_t>(resolution) +
                 static_cast<std::size_t>(i1)] =
              classify_bistability(cfg.system, op).stable_count;
        }
      });
  std::string csv = "delta1_rad_s,delta2_rad_s,stable_count\n";
  for (int i2 = 0; i2 < resolution; ++i2)
    for (int i1 = 0; i1 < resolution; ++i1) {
      csv += io::format_double(a1.at(i1));
      csv += ',';
      csv += io::format_double(a2.at(i2));
      csv += ',';
      csv += std::to_string(counts[static_cast<std::size_t>(i2) *
                                       static_cast<std::size_t>(resolution) +
                                   static_cast<std::size_t>(i1)]);
      csv += '\n';
    }
  io::atomic_write(opts.output_prefix + "_count.csv", csv);
  const auto locus = bistability_locus(cfg.system, a1, a2, opts.threads);
  json j;
  j["locus"] = io::polylines_json(locus);
  io::atomic_write(opts.output_prefix + "_locus.json", j.dump(2) + "\n");
  write_meta(opts.output_prefix, "bistability", cfg,
             {{"delta1_min_rad_s", d1_min},
              {"delta1_max_rad_s", d1_max},
              {"delta2_min_rad_s", d2_min},
              {"delta2_max_rad_s", d2_max},
              {"resolution", resolution}},
             {opts.output_prefix + "_count.csv",
              opts.output_prefix + "_locus.json"});
  return 0;
}

int run_fitpsd(const std::string& input, int segments,
               const std::string& out_path) {
  const TimeSeries ts = load_timeseries_csv(input);
  const Psd psd = welch_psd(ts, segments);
  const PsdFit fit = fit_thermal_lorentzian(psd);
  const json report = io::fit_json(fit);
  std::printf("%s\n", report.dump(2).c_str());
  if (!out_path.empty()) io::atomic_write(out_path, report.dump(2) + "\n");
  return 0;
}

int run_sphere(const CommonOpts& opts, double r_min_nm, double r_max_nm,
               int points, double photons) {
  const RunConfig cfg = load(opts);
  if (!(r_min_nm > 0.0) || !(r_max_nm > r_min_nm) || points < 2)
    throw ConfigError("sphere: need 0 < r-min-nm < r-max-nm and points >= 2");
  const auto radii = linspace(r_min_nm * 1e-9, r_max_nm * 1e-9, points);
  const auto curve = sphere_curve(cfg.system, radii, photons);
  const std::string path = opts.output_prefix + "_sphere.csv";
  io::atomic_write(path, io::sphere_csv(curve));
  write_meta(opts.output_prefix, "sphere", cfg,
             {{"r_min_nm", r_min_nm},
              {"r_max_nm", r_max_nm},
              {"points", points},
              {"photons_mode1", photons}},
             {path});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levsim: self-trapped levitated-nanosphere cavity dynamics"};
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("-c,--config", common.config_path,
                 "JSON configuration file")
      ->expected(1);
  app.add_option("-o,--output", common.output_prefix,
                 "output path prefix (or file for single-output commands)");
  app.add_option("--threads", common.threads,
                 "worker threads (0 = all cores)");

  auto* cmd_eq = app.add_subcommand("equilibrium",
                                    "solve and print the equilibria");
  bool eq_pretty = true;
  cmd_eq->add_flag("!--json", eq_pretty, "print raw JSON instead of text");

  auto* cmd_map = app.add_subcommand("map", "cooling-rate map over (Delta1, Delta2)");
  double d1_min = -2.4e6, d1_max = 0.0, d2_min = -2.4e6, d2_max = 0.0;
  int resolution = 256;
  cmd_map->add_option("--d1-min", d1_min, "Delta1 minimum (rad/s)");
  cmd_map->add_option("--d1-max", d1_max, "Delta1 maximum (rad/s)");
  cmd_map->add_option("--d2-min", d2_min, "Delta2 minimum (rad/s)");
  cmd_map->add_option("--d2-max", d2_max, "Delta2 maximum (rad/s)");
  cmd_map->add_option("--resolution", resolution, "grid points per axis");

  auto* cmd_spec = app.add_subcommand("spectrum", "displacement noise spectrum");
  std::string method = "both";
  int spec_points = 8192;
  cmd_spec->add_option("--method", method, "quantum | semiclassical | both")
      ->check(CLI::IsMember({"quantum", "semiclassical", "both"}));
  cmd_spec->add_option("--points", spec_points, "frequency grid points");

  auto* cmd_sweep = app.add_subcommand("sweep", "1-D sweeps (delta2 or pressure)");
  std::string along = "delta2", emit = "spectra", sweep_method = "semiclassical";
  double sd2_min = -1.6e6, sd2_max = 0.0;
  int sd2_points = 512;
  double omega_max = 2.5e6;
  int omega_points = 4096;
  double p_min_mbar = 1e-6, p_max_mbar = 1.0;
  int p_points = 25;
  bool binary = false;
  cmd_sweep->add_option("--along", along, "delta2 | pressure")
      ->check(CLI::IsMember({"delta2", "pressure"}));
  cmd_sweep->add_option("--emit", emit, "spectra | eigen (delta2) / phonons (pressure)")
      ->check(CLI::IsMember({"spectra", "eigen", "phonons"}));
  cmd_sweep->add_option("--method", sweep_method, "quantum | semiclassical")
      ->check(CLI::IsMember({"quantum", "semiclassical"}));
  cmd_sweep->add_option("--d2-min", sd2_min, "Delta2 minimum (rad/s)");
  cmd_sweep->add_option("--d2-max", sd2_max, "Delta2 maximum (rad/s)");
  cmd_sweep->add_option("--d2-points", sd2_points, "Delta2 grid points");
  cmd_sweep->add_option("--omega-max", omega_max, "spectrum half-span (rad/s)");
  cmd_sweep->add_option("--omega-points", omega_points, "spectrum grid points");
  cmd_sweep->add_option("--p-min-mbar", p_min_mbar, "lowest pressure (mbar)");
  cmd_sweep->add_option("--p-max-mbar", p_max_mbar, "highest pressure (mbar)");
  cmd_sweep->add_option("--p-points", p_points, "pressure points (log-spaced)");
  cmd_sweep->add_flag("--binary", binary, "write the spectral stack as flat binary");

  auto* cmd_bi = app.add_subcommand("bistability", "stable-count map and locus");
  double b1_min = -2.0e6, b1_max = 0.5e6, b2_min = -2.0e6, b2_max = 0.5e6;
  int b_res = 128;
  cmd_bi->add_option("--d1-min", b1_min, "Delta1 minimum (rad/s)");
  cmd_bi->add_option("--d1-max", b1_max, "Delta1 maximum (rad/s)");
  cmd_bi->add_option("--d2-min", b2_min, "Delta2 minimum (rad/s)");
  cmd_bi->add_option("--d2-max", b2_max, "Delta2 maximum (rad/s)");
  cmd_bi->add_option("--resolution", b_res, "grid points per axis");

  auto* cmd_fit = app.add_subcommand("fitpsd", "fit a thermal Lorentzian to a time series");
  std::string fit_input;
  int segments = 8;
  cmd_fit->add_option("--input", fit_input, "CSV time series (t_s,position)")
      ->required();
  cmd_fit->add_option("--segments", segments, "Welch segments");

  auto* cmd_sphere = app.add_subcommand("sphere", "size-dependence curves");
  double r_min_nm = 20.0, r_max_nm = 510.0;
  int r_points = 491;
  double photons = 1e9;
  cmd_sphere->add_option("--r-min-nm", r_min_nm, "smallest radius (nm)");
  cmd_sphere->add_option("--r-max-nm", r_max_nm, "largest radius (nm)");
  cmd_sphere->add_option("--points", r_points, "radius grid points");
  cmd_sphere->add_option("--photons", photons, "intracavity photons in mode 1");

  // Let -c / -o / --threads be given after the subcommand name.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (cmd_eq->parsed()) {
      const std::string out =
          common.output_prefix == "levsim_out" ? "" : common.output_prefix;
      return run_equilibrium(common, out, eq_pretty);
    }
    if (cmd_map->parsed())
      return run_map(common, d1_min, d1_max, d2_min, d2_max, resolution);
    if (cmd_spec->parsed()) return run_spectrum(common, method, spec_points);
    if (cmd_sweep->parsed())
      return run_sweep(common, along, emit, sd2_min, sd2_max, sd2_points,
                       omega_max, omega_points, sweep_method, p_min_mbar,
                       p_max_mbar, p_points, binary);
    if (cmd_bi->parsed())
      return run_bistability(common, b1_min, b1_max, b2_min, b2_max, b_res);
    if (cmd_fit->parsed()) {
      const std::string out =
          common.output_prefix == "levsim_out" ? "" : common.output_prefix;
      return run_fitpsd(fit_input, segments, out);
    }
    if (cmd_sphere->parsed())
      return run_sphere(common, r_min_nm, r_max_nm, r_points, photons);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
