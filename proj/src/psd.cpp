#include "levsim/psd.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "levsim/constants.hpp"
#include "levsim/errors.hpp"

namespace levsim {

using namespace constants;

TimeSeries load_timeseries_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("timeseries: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("timeseries: empty " + path);
  while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
    line.pop_back();
  if (line != "t_s,position")
    throw ConfigError("timeseries: expected header 't_s,position' in " + path);

  std::vector<double> t, x;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ss(line);
    double ti = 0.0, xi = 0.0;
    char comma = 0;
    if (!(ss >> ti >> comma >> xi) || comma != ',')
      throw ConfigError("timeseries: bad row at line " +
                        std::to_string(lineno) + " of " + path);
    t.push_back(ti);
    x.push_back(xi);
  }
  if (t.size() < 2) throw ConfigError("timeseries: need at least two samples");
  const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(dt > 0.0)) throw ConfigError("timeseries: non-increasing time column");
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double step = t[i] - t[i - 1];
    if (std::abs(step - dt) > 1e-6 * dt + 1e-12)
      throw ConfigError("timeseries: non-uniform sampling at line " +
                        std::to_string(i + 2));
  }
  TimeSeries ts;
  ts.sample_rate = 1.0 / dt;
  ts.samples = std::move(x);
  return ts;
}

Psd welch_psd(const TimeSeries& ts, int segments) {
  if (segments < 1) throw ConfigError("welch: segments must be >= 1");
  if (!(ts.sample_rate > 0.0))
    throw ConfigError("welch: sample_rate must be > 0");
  const std::size_t n = ts.samples.size();
  if (n < 4096)
    throw ConfigError("welch: need at least 4096 samples, got " +
                      std::to_string(n));
  // Half-overlapping segments: length L with (segments+1) * L/2 <= n.
  std::size_t seg_len =
      2 * (n / (static_cast<std::size_t>(segments) + 1));
  if (seg_len < 16) throw ConfigError("welch: too many segments for series");
  const std::size_t hop = seg_len / 2;
  const std::size_t bins = seg_len / 2 + 1;

  std::vector<double> window(seg_len);
  double wsum2 = 0.0;
  for (std::size_t i = 0; i < seg_len; ++i) {
    window[i] =
        0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                              static_cast<double>(seg_len)));
    wsum2 += window[i] * window[i];
  }

  std::vector<double> buffer(seg_len);
  std::vector<fftw_complex> out(bins);
  fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(seg_len),
                                        buffer.data(), out.data(),
                                        FFTW_ESTIMATE);

  Psd psd;
  psd.frequency.resize(bins);
  psd.power.assign(bins, 0.0);
  psd.df = ts.sample_rate / static_cast<double>(seg_len);
  psd.segments = segments;
  for (std::size_t k = 0; k < bins; ++k)
    psd.frequency[k] = psd.df * static_cast<double>(k);

  double mean_all = 0.0, var_all = 0.0;
  const std::size_t used = hop * (static_cast<std::size_t>(segments) + 1);
  for (std::size_t i = 0; i < used; ++i) mean_all += ts.samples[i];
  mean_all /= static_cast<double>(used);
  for (std::size_t i = 0; i < used; ++i) {
    const double d = ts.samples[i] - mean_all;
    var_all += d * d;
  }
  psd.variance = var_all / static_cast<double>(used);

  const double norm = 1.0 / (ts.sample_rate * wsum2);
  for (int s = 0; s < segments; ++s) {
    const std::size_t start = static_cast<std::size_t>(s) * hop;
    double mean = 0.0;
    for (std::size_t i = 0; i < seg_len; ++i) mean += ts.samples[start + i];
    mean /= static_cast<double>(seg_len);
    for (std::size_t i = 0; i < seg_len; ++i)
      buffer[i] = (ts.samples[start + i] - mean) * window[i];
    fftw_execute(plan);
    for (std::size_t k = 0; k < bins; ++k) {
      const double mag2 = out[k][0] * out[k][0] + out[k][1] * out[k][1];
      const bool interior = k != 0 && k != bins - 1;
      psd.power[k] += (interior ? 2.0 : 1.0) * mag2 * norm;
    }
  }
  fftw_destroy_plan(plan);
  for (double& p : psd.power) p /= static_cast<double>(segments);
  return psd;
}

double PsdFit::f0_hz() const { return omega0 / (2.0 * pi); }
double PsdFit::gamma0_hz() const { return gamma0 / (2.0 * pi); }

namespace {

// One-sided PSD in Hz of a thermal oscillator:
//   S(f) = 2 amp gamma / ((w0^2 - w^2)^2 + w^2 gamma^2) + floor,  w = 2 pi f,
// where amp = 2 kB T / m for a thermal series.
double lorentzian_model(double w, const Eigen::Vector4d& p) {
  const double d = p[0] * p[0] - w * w;
  return 2.0 * p[2] * p[1] / (d * d + w * w * p[1] * p[1]) + p[3];
}

// d(model)/d(params)
Eigen::Vector4d lorentzian_jacobian(double w, const Eigen::Vector4d& p) {
  const double d = p[0] * p[0] - w * w;
  const double den = d * d + w * w * p[1] * p[1];
  Eigen::Vector4d j;
  j[0] = -2.0 * p[2] * p[1] * 2.0 * d * 2.0 * p[0] / (den * den);
  j[1] = 2.0 * p[2] * (den - p[1] * 2.0 * w * w * p[1]) / (den * den);
  j[2] = 2.0 * p[1] / den;
  j[3] = 1.0;
  return j;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  return v[mid];
}

}  // namespace

PsdFit fit_thermal_lorentzian(const Psd& psd,
                              const LorentzianFitOptions& options) {
  if (psd.frequency.size() < 16)
    throw NumericalError("fit: PSD has too few bins");

  // Skip DC and the last bin; bins are (omega, power).
  std::vector<double> omega, power;
  for (std::size_t k = 1; k + 1 < psd.frequency.size(); ++k) {
    omega.push_back(2.0 * pi * psd.frequency[k]);
    power.push_back(psd.power[k]);
  }

  const double median_power = median_of(power);
  std::size_t peak = 0;
  for (std::size_t i = 1; i < power.size(); ++i)
    if (power[i] > power[peak]) peak = i;
  if (!(median_power > 0.0) ||
      power[peak] < options.peak_to_median_min * median_power)
    throw NumericalError("fit: no peak above the noise floor");

  // Restrict to a band around the peak so distant floor bins cannot skew
  // the resonance parameters.
  {
    const double w_peak = omega[peak];
    std::vector<double> bw, bp;
    std::size_t new_peak = 0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      if (omega[i] < w_peak / 3.0 || omega[i] > 3.0 * w_peak) continue;
      if (i == peak) new_peak = bw.size();
      bw.push_back(omega[i]);
      bp.push_back(power[i]);
    }
    omega.swap(bw);
    power.swap(bp);
    peak = new_peak;
  }

  // Initial guesses: peak bin, half-power width, matching amplitude.
  const double w0 = omega[peak];
  double half = power[peak] / 2.0;
  std::size_t lo = peak, hi = peak;
  while (lo > 0 && power[lo] > half) --lo;
  while (hi + 1 < power.size() && power[hi] > half) ++hi;
  double gamma = std::max(omega[hi] - omega[lo],
                          2.0 * pi * psd.df);
  Eigen::Vector4d p;
  p << w0, gamma, 0.5 * (power[peak] - median_power) * w0 * w0 * gamma,
      median_power;

  // Outlier rejection on log-residuals against a median-filtered baseline.
  std::vector<bool> keep(power.size(), true);
  {
    const long half_win = 4;
    std::vector<double> log_resid(power.size());
    for (std::size_t i = 0; i < power.size(); ++i) {
      const long a = std::max<long>(0, static_cast<long>(i) - half_win);
      const long b = std::min<long>(static_cast<long>(power.size()) - 1,
                                    static_cast<long>(i) + half_win);
      std::vector<double> win(power.begin() + a, power.begin() + b + 1);
      const double base = median_of(win);
      log_resid[i] = base > 0.0 && power[i] > 0.0
                         ? std::log(power[i] / base)
                         : 0.0;
    }
    std::vector<double> abs_dev(log_resid.size());
    const double med = median_of(log_resid);
    for (std::size_t i = 0; i < log_resid.size(); ++i)
      abs_dev[i] = std::abs(log_resid[i] - med);
    const double mad = median_of(abs_dev);
    if (mad > 0.0)
      for (std::size_t i = 0; i < log_resid.size(); ++i)
        if (std::abs(log_resid[i] - med) > options.mad_cut * mad)
          keep[i] = false;
    keep[peak] = true;
  }

  std::vector<std::size_t> bins;
  for (std::size_t i = 0; i < power.size(); ++i)
    if (keep[i] && power[i] > 0.0) bins.push_back(i);
  if (bins.size() < 8) throw NumericalError("fit: too few usable bins");

  // Levenberg-Marquardt on residuals relative to the model,
  // r = (data - model) / model: scale-invariant like 1/data weights, but
  // without the downward amplitude bias those produce on noisy bins.
  auto cost_of = [&](const Eigen::Vector4d& q) {
    double c = 0.0;
    for (std::size_t i : bins) {
      const double m = lorentzian_model(omega[i], q);
      if (!(m > 0.0)) return 1e300;
      const double r = (power[i] - m) / m;
      c += r * r;
    }
    return c;
  };

  double lambda = 1e-3;
  double cost = cost_of(p);
  int iter = 0;
  bool converged = false;
  Eigen::Matrix4d jtj;
  Eigen::Vector4d jtr;
  for (; iter < options.max_iterations; ++iter) {
    jtj.setZero();
    jtr.setZero();
    for (std::size_t i : bins) {
      const double m = lorentzian_model(omega[i], p);
      const double r = (power[i] - m) / m;
      // d r / d theta = -(data / m^2) dm/dtheta
      const Eigen::Vector4d j =
          lorentzian_jacobian(omega[i], p) * (-power[i] / (m * m));
      jtj += j * j.transpose();
      jtr -= j * r;
    }
    bool stepped = false;
    for (int tries = 0; tries < 24; ++tries) {
      Eigen::Matrix4d damped = jtj;
      damped.diagonal() += lambda * jtj.diagonal();
      const Eigen::Vector4d step = damped.ldlt().solve(jtr);
      Eigen::Vector4d trial = p + step;
      if (trial[0] > 0.0 && trial[1] > 0.0 && trial[2] > 0.0 &&
          trial[3] >= 0.0) {
        const double trial_cost = cost_of(trial);
        if (trial_cost < cost) {
          const double gain = (cost - trial_cost) / std::max(cost, 1e-300);
          p = trial;
          cost = trial_cost;
          lambda = std::max(lambda * 0.3, 1e-12);
          stepped = true;
          if (gain < 1e-10) converged = true;
          break;
        }
      }
      lambda *= 4.0;
      if (lambda > 1e12) break;
    }
    if (!stepped || converged) {
      converged = converged || stepped;
      break;
    }
  }
  if (!converged && iter >= options.max_iterations)
    throw NumericalError("fit: no convergence after " +
                         std::to_string(options.max_iterations) +
                         " iterations");

  PsdFit fit;
  fit.omega0 = p[0];
  fit.gamma0 = p[1];
  fit.amplitude = p[2];
  fit.floor_level = p[3];
  fit.iterations = iter;
  fit.excluded_bins = power.size() - bins.size();
  const double dof =
      static_cast<double>(bins.size()) - 4.0;
  fit.residual = std::sqrt(cost / static_cast<double>(bins.size()));
  // Parameter sigmas from the Gauss-Newton covariance at the optimum.
  jtj.setZero();
  for (std::size_t i : bins) {
    const double m = lorentzian_model(omega[i], p);
    const Eigen::Vector4d j =
        lorentzian_jacobian(omega[i], p) * (power[i] / (m * m));
    jtj += j * j.transpose();
  }
  const Eigen::Matrix4d cov = jtj.inverse() * (cost / std::max(dof, 1.0));
  fit.omega0_sigma = std::sqrt(std::max(0.0, cov(0, 0)));
  fit.gamma0_sigma = std::sqrt(std::max(0.0, cov(1, 1)));
  return fit;
}

}  // namespace levsim
