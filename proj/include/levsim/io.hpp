#pragma once

#include <string>

#include <json.hpp>

#include "levsim/psd.hpp"
#include "levsim/sweep.hpp"

// Deterministic output writers. Numbers are printed with 17 significant
// digits so identical inputs give bit-identical files; all writes go
// through a temp-file + rename so partial results never land on disk.
namespace levsim::io {

void atomic_write(const std::string& path, const std::string& content);
std::string format_double(double v);

std::string spectrum_csv(const SpectrumResult& s);
std::string map_csv(const MapResult& m);  // long format: delta1,delta2,field,value
std::string stack_csv(const SpectrumStack& s);
std::string sphere_csv(const std::vector<SphereCurvePoint>& pts);
std::string pressure_csv(const std::vector<PressurePoint>& pts);
std::string crossing_csv(const CrossingScan& scan);

nlohmann::json polylines_json(const std::vector<Polyline>& lines);
nlohmann::json equilibria_json(const std::vector<Equilibrium>& eqs);
nlohmann::json fit_json(const PsdFit& fit);

// Flat binary stack: magic "LEVSTACK1\n", a JSON header line with the axis
// sizes, then row-major float64 data.
std::string stack_binary(const SpectrumStack& s);

}  // namespace levsim::io
