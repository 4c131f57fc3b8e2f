#pragma once

#include <string>
#include <vector>

namespace levsim {

struct TimeSeries {
  double sample_rate = 0.0;  // Hz
  std::vector<double> samples;
  std::string label = "axial";
};

// CSV with header "t_s,position" and uniform time steps.
TimeSeries load_timeseries_csv(const std::string& path);

struct Psd {
  std::vector<double> frequency;  // Hz, one-sided
  std::vector<double> power;      // units^2 / Hz
  double df = 0.0;
  double variance = 0.0;  // variance of the analysed samples
  int segments = 0;
};

// Welch estimate: `segments` half-overlapping Hann-windowed segments,
// segment means removed. Sum(power) * df reproduces the signal variance.
Psd welch_psd(const TimeSeries& ts, int segments);

struct LorentzianFitOptions {
  double peak_to_median_min = 3.0;  // required peak prominence
  int max_iterations = 200;
  double mad_cut = 6.0;             // outlier exclusion threshold
};

// Damped-oscillator thermal model fitted to a PSD:
//   S(w) = amplitude * gamma0 / ((omega0^2 - w^2)^2 + w^2 gamma0^2) + floor
// with w = 2 pi f. Relative residuals are minimized, so the recovered
// omega0 and gamma0 are invariant under rescaling of the input data.
struct PsdFit {
  double omega0 = 0.0;     // rad/s
  double gamma0 = 0.0;     // rad/s
  double amplitude = 0.0;  // 2 kB T / m for a thermal series
  double floor_level = 0.0;
  double omega0_sigma = 0.0;
  double gamma0_sigma = 0.0;
  double residual = 0.0;  // rms relative residual over fitted bins
  int iterations = 0;
  std::size_t excluded_bins = 0;

  double f0_hz() const;
  double gamma0_hz() const;  // gamma0 / 2 pi
};

PsdFit fit_thermal_lorentzian(const Psd& psd,
                              const LorentzianFitOptions& options = {});

}  // namespace levsim
