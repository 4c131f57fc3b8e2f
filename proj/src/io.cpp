#include "levsim/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "levsim/errors.hpp"

namespace levsim::io {

using nlohmann::json;

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("io: cannot write " + tmp.string());
    out << content;
    if (!out) throw ConfigError("io: short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

const char* status_name(CellStatus s) {
  switch (s) {
    case CellStatus::ok: return "ok";
    case CellStatus::no_equilibrium: return "no-equilibrium";
    case CellStatus::untrapped: return "untrapped";
  }
  return "unknown";
}

}  // namespace

std::string spectrum_csv(const SpectrumResult& s) {
  std::string out = "omega_rad_s,S_xx\n";
  for (std::size_t i = 0; i < s.omega.size(); ++i) {
    out += format_double(s.omega[i]);
    out += ',';
    out += format_double(s.s_xx[i]);
    out += '\n';
  }
  return out;
}

std::string map_csv(const MapResult& m) {
  std::string out = "delta1_rad_s,delta2_rad_s,field,value\n";
  auto emit = [&](const char* name, auto getter) {
    for (int i2 = 0; i2 < m.delta2.points; ++i2)
      for (int i1 = 0; i1 < m.delta1.points; ++i1) {
        out += format_double(m.delta1.at(i1));
        out += ',';
        out += format_double(m.delta2.at(i2));
        out += ',';
        out += name;
        out += ',';
        out += getter(m.index(i1, i2));
        out += '\n';
      }
  };
  emit("gamma_opt", [&](std::size_t i) { return format_double(m.gamma_opt[i]); });
  emit("n_pt", [&](std::size_t i) { return format_double(m.n_pt[i]); });
  emit("omega_m", [&](std::size_t i) { return format_double(m.omega_m[i]); });
  emit("ng1", [&](std::size_t i) { return format_double(m.ng1[i]); });
  emit("ng2", [&](std::size_t i) { return format_double(m.ng2[i]); });
  emit("kx0", [&](std::size_t i) { return format_double(m.kx0[i]); });
  emit("stable_count",
       [&](std::size_t i) { return std::to_string(m.stable_count[i]); });
  emit("drift_stable",
       [&](std::size_t i) { return std::to_string(int(m.drift_ok[i])); });
  emit("status",
       [&](std::size_t i) { return std::string(status_name(m.status[i])); });
  return out;
}

std::string stack_csv(const SpectrumStack& s) {
  std::string out = "delta2_rad_s,omega_rad_s,S_xx\n";
  const std::size_t cols = s.omega.size();
  for (std::size_t r = 0; r < s.delta2.size(); ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      out += format_double(s.delta2[r]);
      out += ',';
      out += format_double(s.omega[c]);
      out += ',';
      out += format_double(s.s_xx[r * cols + c]);
      out += '\n';
    }
  return out;
}

std::string sphere_csv(const std::vector<SphereCurvePoint>& pts) {
  std::string out =
      "r_nm,f,node_trapped,a0_rad_s,a_rad_s,omega_m_rad_s,ng1_rad_s,"
      "ng1_modulated_rad_s\n";
  for (const auto& p : pts) {
    out += format_double(p.radius * 1e9);
    out += ',';
    out += format_double(p.f);
    out += ',';
    out += std::to_string(int(p.node_trapped));
    out += ',';
    out += format_double(p.a0);
    out += ',';
    out += format_double(p.a);
    out += ',';
    out += format_double(p.omega_m);
    out += ',';
    out += format_double(p.ng1);
    out += ',';
    out += format_double(p.ng1_modulated);
    out += '\n';
  }
  return out;
}

std::string pressure_csv(const std::vector<PressurePoint>& pts) {
  std::string out = "pressure_mbar,gamma_m_rad_s,n_quantum,n_semiclassical,n_pt\n";
  for (const auto& p : pts)
    append_row(out, {p.pressure / constants::mbar_to_pa, p.gamma_m, p.n_quantum,
                     p.n_semiclassical, p.n_pt});
  return out;
}

std::string crossing_csv(const CrossingScan& scan) {
  std::string out =
      "delta2_rad_s,status,kx0,omega_m_rad_s,gamma_opt_rad_s,"
      "freq1_rad_s,decay1_rad_s,w1_mech,w1_opt1,w1_opt2,"
      "freq2_rad_s,decay2_rad_s,w2_mech,w2_opt1,w2_opt2,"
      "freq3_rad_s,decay3_rad_s,w3_mech,w3_opt1,w3_opt2,min_gap_rad_s\n";
  for (const auto& p : scan.points) {
    out += format_double(p.delta2);
    out += ',';
    switch (p.status) {
      case ScanStatus::ok: out += "ok"; break;
      case ScanStatus::no_equilibrium: out += "no-equilibrium"; break;
      case ScanStatus::untrapped: out += "untrapped"; break;
      case ScanStatus::unstable: out += "unstable"; break;
    }
    out += ',';
    out += format_double(p.kx0);
    out += ',';
    out += format_double(p.omega_m);
    out += ',';
    out += format_double(p.gamma_opt);
    for (const auto& m : p.modes) {
      out += ',';
      out += format_double(m.value.imag());
      out += ',';
      out += format_double(-m.value.real());
      out += ',';
      out += format_double(m.weights[0]);
      out += ',';
      out += format_double(m.weights[1]);
      out += ',';
      out += format_double(m.weights[2]);
    }
    out += ',';
    out += format_double(p.min_gap);
    out += '\n';
  }
  return out;
}

json polylines_json(const std::vector<Polyline>& lines) {
  json arr = json::array();
  for (const auto& line : lines) {
    json pts = json::array();
    for (const auto& p : line.points) pts.push_back({p[0], p[1]});
    arr.push_back(pts);
  }
  return arr;
}

json equilibria_json(const std::vector<Equilibrium>& eqs) {
  json arr = json::array();
  for (const auto& e : eqs) {
    json j;
    j["kx0_rad"] = e.kx0;
    j["x0_m"] = e.x0;
    j["stable"] = e.stable;
    j["trapping_defined"] = e.trapping_defined;
    j["photons"] = {e.photons[0], e.photons[1]};
    j["delta_x_rad_s"] = {e.delta_x[0], e.delta_x[1]};
    j["omega_m_rad_s"] = e.omega_m;
    j["omega_m_hz"] = e.omega_m / (2.0 * constants::pi);
    j["x_zpf_m"] = e.x_zpf;
    j["g_rad_s"] = {e.g[0], e.g[1]};
    j["ng_rad_s"] = {e.g_field[0], e.g_field[1]};
    j["potential_j"] = e.potential;
    j["curvature_j_m2"] = e.curvature;
    arr.push_back(j);
  }
  return arr;
}

json fit_json(const PsdFit& fit) {
  json j;
  j["f_Hz"] = fit.f0_hz();
  j["gamma_Hz"] = fit.gamma0_hz();
  j["omega0_rad_s"] = fit.omega0;
  j["gamma0_rad_s"] = fit.gamma0;
  j["amplitude"] = fit.amplitude;
  j["floor"] = fit.floor_level;
  j["ci"] = {{"f_Hz_sigma", fit.omega0_sigma / (2.0 * constants::pi)},
             {"gamma_Hz_sigma", fit.gamma0_sigma / (2.0 * constants::pi)}};
  j["residual"] = fit.residual;
  j["iterations"] = fit.iterations;
  j["excluded_bins"] = fit.excluded_bins;
  return j;
}

std::string stack_binary(const SpectrumStack& s) {
  json header;
  header["delta1_rad_s"] = s.delta1;
  header["n_delta2"] = s.delta2.size();
  header["n_omega"] = s.omega.size();
  header["provenance"] =
      s.provenance == Provenance::quantum ? "quantum" : "semiclassical";
  std::string out = "LEVSTACK1\n";
  out += header.dump();
  out += '\n';
  auto append_block = [&out](const std::vector<double>& block) {
    const std::size_t bytes = block.size() * sizeof(double);
    const std::size_t at = out.size();
    out.resize(at + bytes);
    std::memcpy(out.data() + at, block.data(), bytes);
  };
  append_block(s.delta2);
  append_block(s.omega);
  append_block(s.s_xx);
  return out;
}

}  // namespace levsim::io
