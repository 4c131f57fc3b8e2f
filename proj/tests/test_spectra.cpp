#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "levsim/cooling.hpp"
#include "levsim/errors.hpp"
#include "levsim/spectra.hpp"
#include "support/configs.hpp"

using namespace levsim;
using namespace levsim::constants;
using levsim::testing::merged_region_system;
using levsim::testing::strong_coupling_system;

namespace {

NoiseModel model_at(const SystemConfig& cfg, const OperatingPoint& op,
                    double pressure_mbar) {
  const auto eqs = find_equilibria(cfg, op);
  const int b = default_branch(eqs);
  REQUIRE(b >= 0);
  GasParams gas = cfg.gas;
  gas.pressure = pressure_mbar * mbar_to_pa;
  return make_noise_model(eqs[static_cast<std::size_t>(b)], cfg.cavity.kappa,
                          gas_damping(cfg.sphere, gas), gas.temperature);
}

NoiseModel thermal_model(double n_bath = 4e7, double gamma_m = 5e3) {
  NoiseModel m;
  m.omega_m = 1.0e6;
  m.kappa = 6e5;
  m.gamma_m = gamma_m;
  m.n_bath = n_bath;
  m.delta_x = {-1.1e6, -0.4e6};
  m.g_quad = {0.0, 0.0};
  return m;
}

}  // namespace

TEST_CASE("closed form agrees with the operator solve") {
  const auto m = model_at(strong_coupling_system(), {-1.5e6, -0.68e6}, 1.0);
  for (double w = -2.5e6; w <= 2.5e6; w += 7.9e4) {
    const double closed = quantum_sxx(m, w);
    const double direct = quantum_sxx_operator(m, w);
    CHECK(closed == doctest::Approx(direct).epsilon(1e-10));
  }
}

TEST_CASE("printed back-action form deviates once the coupling matters") {
  const auto m = model_at(strong_coupling_system(), {-1.5e6, -0.68e6}, 1.0);
  double worst = 0.0;
  for (double w : {-m.omega_m, -0.5 * m.omega_m, 0.8 * m.omega_m, m.omega_m})
    worst = std::max(worst,
                     std::abs(quantum_sxx(m, w, MFactorForm::absolute_eta) /
                                  quantum_sxx_operator(m, w) -
                              1.0));
  CHECK(worst > 0.01);
}

TEST_CASE("symmetrized quantum spectrum equals the semiclassical one") {
  const auto m = model_at(strong_coupling_system(), {-1.5e6, -0.68e6}, 1.0);
  const DriftModel dm = build_drift(m);
  for (double w = -2.3e6; w <= 2.3e6; w += 1.1e5) {
    const double sym = 0.5 * (quantum_sxx(m, w) + quantum_sxx(m, -w));
    CHECK(sym == doctest::Approx(semiclassical_sxx(dm, w)).epsilon(1e-10));
  }
}

TEST_CASE("thermal decoupled spectrum") {
  const auto m = thermal_model();
  // Closed form against the bare two-Lorentzian expression.
  for (double w : {-1.2e6, -1.0e6, -0.5e6, 0.3e6, 1.0e6}) {
    const std::complex<double> chi_p =
        1.0 / std::complex<double>(0.5 * m.gamma_m, -(w - m.omega_m));
    const std::complex<double> chi_m =
        1.0 / std::complex<double>(0.5 * m.gamma_m, -(-w - m.omega_m));
    const double expect = m.gamma_m *
                          (m.n_bath * std::norm(chi_p) +
                           (m.n_bath + 1.0) * std::norm(chi_m)) /
                          (4.0 * pi);
    CHECK(quantum_sxx(m, w) == doctest::Approx(expect).epsilon(1e-12));
  }
  // The emission lobe sits at negative frequency.
  CHECK(quantum_sxx(m, -m.omega_m) > quantum_sxx(m, m.omega_m));
  // Integral: <x^2> = n_bath + 1/2 within 0.1%.
  const double n = phonon_number(
      [&m](double w) { return quantum_sxx(m, w); }, m);
  CHECK(std::abs(n - m.n_bath) / (m.n_bath + 0.5) < 1e-3);
}

TEST_CASE("spectral integral matches the Lyapunov covariance") {
  const auto m = model_at(merged_region_system(), {-1.1e6, -1.0e6}, 1.0);
  const DriftModel dm = build_drift(m);
  const double cov = steady_state_covariance(dm)(0, 0);
  const double integral = integrate_spectrum(
      [&dm](double w) { return semiclassical_sxx(dm, w); }, m, 1e-7);
  CHECK(std::abs(integral - cov) / cov < 5e-3);
  // Thermal decoupled case integrates to n_bath + 1/2 within 0.1%.
  const auto th = thermal_model();
  const double thermal = integrate_spectrum(
      [&th](double w) { return semiclassical_sxx(build_drift(th), w); }, th,
      1e-7);
  CHECK(std::abs(thermal - (th.n_bath + 0.5)) / (th.n_bath + 0.5) < 1e-3);
}

TEST_CASE("sampled spectra: positivity, symmetry, integration") {
  const auto m = model_at(merged_region_system(), {-1.1e6, -1.0e6}, 1.0);
  const auto grid = default_grid(m, 8192);
  REQUIRE(grid.size() > 4000);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK(grid.front() < -m.omega_m);
  CHECK(grid.back() > m.omega_m);

  auto q = quantum_spectrum(m, grid);
  auto s = semiclassical_spectrum(build_drift(m), grid);
  for (double v : q.s_xx) CHECK(v >= 0.0);
  for (double v : s.s_xx) CHECK(v >= 0.0);

  // Semiclassical symmetry S(w) = S(-w).
  const DriftModel dm = build_drift(m);
  for (double w : {1.3e5, 6.4e5, 1.05e6, 2.2e6})
    CHECK(semiclassical_sxx(dm, w) ==
          doctest::Approx(semiclassical_sxx(dm, -w)).epsilon(1e-8));

  // Sampled integral against the adaptive one.
  const double n_adaptive = phonon_number(
      [&m](double w) { return quantum_sxx(m, w); }, m);
  const double n_sampled = phonon_from_spectrum(q);
  CHECK(n_sampled == doctest::Approx(n_adaptive).epsilon(0.01));
}

TEST_CASE("unstable points are refused with a stability error") {
  NoiseModel m = thermal_model();
  m.g_quad = {2e5, 0.0};
  m.delta_x = {+1.0e6, +0.4e6};  // blue side drives the instability
  m.omega_m = 1.0e6;
  const DriftModel dm = build_drift(m);
  if (!drift_stable(dm)) {
    std::vector<double> grid = {-1e6, 0.0, 1e6};
    CHECK_THROWS_AS(quantum_spectrum(m, grid), NumericalError);
    CHECK_THROWS_AS(semiclassical_spectrum(dm, grid), NumericalError);
  }
}

TEST_CASE("spectral matrix is Hermitian positive semidefinite") {
  const auto m = model_at(merged_region_system(), {-1.1e6, -1.0e6}, 1.0);
  const auto s = spectral_matrix(build_drift(m), 0.8e6);
  CHECK((s - s.adjoint()).norm() < 1e-12 * s.norm());
  const auto eivals =
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix<std::complex<double>, 6, 6>>(
          s)
          .eigenvalues();
  for (int i = 0; i < 6; ++i) CHECK(eivals(i) > -1e-12 * s.norm());
}

TEST_CASE("sideband asymmetry limits") {
  // Hot thermal oscillator: ratio -> 1.
  const auto hot = thermal_model(1e7);
  const double r_hot = sideband_asymmetry(
      [&hot](double w) { return quantum_sxx(hot, w); }, hot);
  CHECK(r_hot == doctest::Approx(1.0).epsilon(1e-4));
  // Near the ground state the ratio collapses; the floor is set by the
  // 1/w^2 leakage of the emission Lorentzian into positive frequencies,
  // of order gamma_m / (4 pi omega_m).
  const auto cold = thermal_model(1e-6, 50.0);
  const double r_cold = sideband_asymmetry(
      [&cold](double w) { return quantum_sxx(cold, w); }, cold);
  CHECK(r_cold < 1e-4);
}

TEST_CASE("asymmetry ratio equals n/(n+1)") {
  const auto m = model_at(strong_coupling_system(), {-1.5e6, -0.68e6}, 1e-5);
  auto f = [&m](double w) { return quantum_sxx(m, w); };
  const double n = phonon_number(f, m);
  const double ratio = sideband_asymmetry(f, m);
  CHECK(ratio == doctest::Approx(n / (n + 1.0)).epsilon(0.02));
  // Sampled-grid version agrees with the adaptive one.
  const auto grid = default_grid(m, 16384);
  const auto s = quantum_spectrum(m, grid);
  CHECK(sideband_asymmetry(s) == doctest::Approx(ratio).epsilon(0.02));
}

TEST_CASE("double-peak structure in the red sideband under hybridization") {
  const auto m = model_at(strong_coupling_system(), {-1.5e6, -0.68e6}, 1.0);
  const auto grid = default_grid(m, 8192);
  const auto s = quantum_spectrum(m, grid);
  int maxima = 0;
  for (std::size_t i = 1; i + 1 < s.omega.size(); ++i) {
    if (s.omega[i] > -1.5 * m.omega_m && s.omega[i] < -0.5 * m.omega_m &&
        s.s_xx[i] > s.s_xx[i - 1] && s.s_xx[i] > s.s_xx[i + 1])
      ++maxima;
  }
  CHECK(maxima >= 2);
}

TEST_CASE("quantum route requires a finite thermal bath") {
  NoiseModel m = thermal_model();
  m.gamma_m = 0.0;
  CHECK_THROWS_AS(quantum_sxx(m, 1e6), NumericalError);
}
