#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "levsim/equilibrium.hpp"
#include "support/configs.hpp"

using namespace levsim;
using namespace levsim::constants;
using levsim::testing::bistable_system;
using levsim::testing::make_system;
using levsim::testing::merged_region_system;

namespace {

// Independent oracle: count local minima of V on a dense grid with
// periodic wraparound.
int dense_minima_count(const SystemConfig& cfg, const OperatingPoint& op,
                       int n = 100000) {
  const double k = cfg.cavity.wavenumber();
  std::vector<double> v(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] =
        effective_potential(pi * i / (k * n), cfg, op);
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double prev = v[static_cast<std::size_t>((i + n - 1) % n)];
    const double next = v[static_cast<std::size_t>((i + 1) % n)];
    if (v[static_cast<std::size_t>(i)] < prev &&
        v[static_cast<std::size_t>(i)] < next)
      ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("symmetric driving pins the stable point at pi/8") {
  auto cfg = merged_region_system();
  cfg.drive.ratio = 1.0;
  const OperatingPoint op{-1.0e6, -1.0e6};
  const auto eqs = find_equilibria(cfg, op);
  const int b = default_branch(eqs);
  REQUIRE(b >= 0);
  CHECK(std::abs(eqs[static_cast<std::size_t>(b)].kx0 - pi / 8) < 1e-9);
  CHECK(eqs[static_cast<std::size_t>(b)].stable);
  // Photon numbers agree between the modes at the symmetric point.
  CHECK(eqs[static_cast<std::size_t>(b)].photons[0] ==
        doctest::Approx(eqs[static_cast<std::size_t>(b)].photons[1]));
}

TEST_CASE("single-mode driving traps at the antinode") {
  auto cfg = make_system(1e4, 6e5, 2e-3, 0.0);  // A << kappa, R = 0
  const OperatingPoint op{-3e5, -3e5};
  const auto eqs = find_equilibria(cfg, op);
  REQUIRE(eqs.size() == 2);
  int stable = 0;
  for (const auto& e : eqs) {
    if (e.stable) {
      ++stable;
      CHECK(std::min(e.kx0, pi - e.kx0) < 1e-9);  // kx0 = 0 (mod pi)
    } else {
      CHECK(std::abs(e.kx0 - pi / 2) < 1e-9);
    }
  }
  CHECK(stable == 1);
}

TEST_CASE("potential gradient matches central finite differences") {
  const auto cfg = merged_region_system();
  const OperatingPoint op{-1.1e6, -0.7e6};
  const double k = cfg.cavity.wavenumber();
  const double h = 1e-7 / k;
  double worst = 0.0;
  double scale = 0.0;
  for (int i = 0; i < 400; ++i) {
    const double x = pi * (i + 0.5) / (400.0 * k);
    const double grad = potential_gradient(x, cfg, op);
    const double fd = (effective_potential(x + h, cfg, op) -
                       effective_potential(x - h, cfg, op)) /
                      (2.0 * h);
    worst = std::max(worst, std::abs(grad - fd));
    scale = std::max(scale, std::abs(grad));
  }
  CHECK(worst / scale < 1e-6);
}

TEST_CASE("potential curvature matches finite differences of the gradient") {
  const auto cfg = merged_region_system();
  const OperatingPoint op{-0.9e6, -1.3e6};
  const double k = cfg.cavity.wavenumber();
  const double h = 1e-6 / k;
  for (double u : {0.3, 1.1, 2.2, 2.9}) {
    const double x = u / k;
    const double fd = (potential_gradient(x + h, cfg, op) -
                       potential_gradient(x - h, cfg, op)) /
                      (2.0 * h);
    CHECK(potential_curvature(x, cfg, op) ==
          doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("drive power factors out of the potential shape") {
  auto cfg = merged_region_system();
  const OperatingPoint op{-1.0e6, -0.5e6};
  auto scaled = cfg;
  scaled.drive.power1 *= 9.0;  // E1 -> 3 E1
  for (double u = 0.05; u < pi; u += 0.31) {
    const double x = u / cfg.cavity.wavenumber();
    CHECK(effective_potential(x, scaled, op) ==
          doctest::Approx(9.0 * effective_potential(x, cfg, op))
              .epsilon(1e-12));
  }
}

TEST_CASE("zero coupling leaves a flat potential and no equilibria") {
  auto cfg = merged_region_system();
  cfg.coupling_value = 0.0;
  const OperatingPoint op{-1.0e6, -0.5e6};
  const double k = cfg.cavity.wavenumber();
  const double v0 = effective_potential(0.1 / k, cfg, op);
  const double v1 = effective_potential(2.0 / k, cfg, op);
  CHECK(v0 == doctest::Approx(v1).epsilon(1e-14));
  CHECK(find_equilibria(cfg, op).empty());
}

TEST_CASE("equilibrium record is self-consistent") {
  const auto cfg = merged_region_system();
  const OperatingPoint op{-1.2e6, -0.8e6};
  const auto eqs = find_equilibria(cfg, op);
  REQUIRE_FALSE(eqs.empty());
  const double k = cfg.cavity.wavenumber();
  const double a = cfg.coupling();
  const double e1 = cfg.drive_amplitude1();
  for (const auto& eq : eqs) {
    // alpha_j = -i E_j / (kappa/2 - i Delta_j^x)
    for (int j = 0; j < 2; ++j) {
      const double ej = j == 0 ? e1 : cfg.drive.ratio * e1;
      const std::complex<double> expect =
          std::complex<double>(0.0, -ej) /
          std::complex<double>(0.5 * cfg.cavity.kappa,
                               -eq.delta_x[static_cast<std::size_t>(j)]);
      CHECK(std::abs(eq.alpha[static_cast<std::size_t>(j)] - expect) <
            1e-9 * std::abs(expect) + 1e-30);
    }
    // Shifted detunings.
    const double c1 = std::cos(eq.kx0 - cfg.drive.phi1);
    CHECK(eq.delta_x[0] == doctest::Approx(op.delta1 + a * c1 * c1));
    // Printed equilibrium ratio condition to 1e-8 relative.
    const double lhs = -std::sin(2.0 * (eq.kx0 - cfg.drive.phi1)) /
                       std::sin(2.0 * (eq.kx0 - cfg.drive.phi2));
    const double r2 = cfg.drive.ratio * cfg.drive.ratio;
    const double m1 = 0.25 * cfg.cavity.kappa * cfg.cavity.kappa +
                      eq.delta_x[0] * eq.delta_x[0];
    const double m2 = 0.25 * cfg.cavity.kappa * cfg.cavity.kappa +
                      eq.delta_x[1] * eq.delta_x[1];
    CHECK(lhs == doctest::Approx(r2 * m1 / m2).epsilon(1e-8));
    // omega_m^2 from the printed sum.
    const double expect_wm2 =
        2.0 * hbar * a * k * k / cfg.sphere.mass() *
        (eq.photons[0] * std::cos(2.0 * (eq.kx0 - cfg.drive.phi1)) +
         eq.photons[1] * std::cos(2.0 * (eq.kx0 - cfg.drive.phi2)));
    CHECK(eq.omega_m_sq == doctest::Approx(expect_wm2).epsilon(1e-12));
    if (eq.stable) {
      CHECK(eq.curvature > 0.0);
      CHECK(eq.omega_m_sq >= 0.0);
    } else {
      CHECK(eq.curvature < 0.0);
    }
  }
}

TEST_CASE("drive scaling laws") {
  const auto cfg = merged_region_system();
  const OperatingPoint op{-1.3e6, -0.9e6};
  const auto base = find_equilibria(cfg, op);
  auto scaled_cfg = cfg;
  const double lambda = 7.3;
  scaled_cfg.drive.power1 *= lambda * lambda;  // E1 -> lambda E1
  const auto scaled = find_equilibria(scaled_cfg, op);
  REQUIRE(base.size() == scaled.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(scaled[i].kx0 == base[i].kx0);  // positions exactly invariant
    CHECK(scaled[i].photons[0] ==
          doctest::Approx(lambda * lambda * base[i].photons[0]).epsilon(1e-10));
    if (!base[i].trapping_defined) continue;
    CHECK(scaled[i].omega_m ==
          doctest::Approx(lambda * base[i].omega_m).epsilon(1e-10));
    // ng scales as sqrt(lambda).
    CHECK(scaled[i].g_field[0] ==
          doctest::Approx(std::sqrt(lambda) * base[i].g_field[0])
              .epsilon(1e-8));
  }
}

TEST_CASE("bistable region exists for A = 3 kappa and matches the oracle") {
  const auto cfg = bistable_system();
  const OperatingPoint op{-1.45e6, -0.6e6};
  const auto b = classify_bistability(cfg, op);
  CHECK(b.bistable);
  CHECK(b.stable_count == dense_minima_count(cfg, op));
  // Count independent of drive scaling.
  auto strong = cfg;
  strong.drive.power1 *= 100.0;
  CHECK(classify_bistability(strong, op).stable_count == b.stable_count);
}

TEST_CASE("stable-count agrees with the dense-grid oracle at random points") {
  const auto cfg = bistable_system();
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> dist(-2.0e6, 0.2e6);
  for (int trial = 0; trial < 60; ++trial) {
    const OperatingPoint op{dist(rng), dist(rng)};
    const auto b = classify_bistability(cfg, op);
    CHECK(b.stable_count == dense_minima_count(cfg, op, 20000));
  }
}

TEST_CASE("weak-coupling grids are never bistable") {
  const auto cfg = merged_region_system();  // A = kappa / 2
  std::mt19937_64 rng(999);
  std::uniform_real_distribution<double> dist(-2.4e6, 0.0);
  for (int trial = 0; trial < 40; ++trial) {
    const OperatingPoint op{dist(rng), dist(rng)};
    CHECK_FALSE(classify_bistability(cfg, op).bistable);
  }
}

TEST_CASE("resolve_at reproduces the solver result") {
  const auto cfg = merged_region_system();
  const OperatingPoint op{-1.0e6, -1.2e6};
  const auto eqs = find_equilibria(cfg, op);
  REQUIRE_FALSE(eqs.empty());
  const auto again = resolve_at(cfg, op, eqs[0].kx0);
  CHECK(again.omega_m_sq == doctest::Approx(eqs[0].omega_m_sq));
  CHECK(again.potential == doctest::Approx(eqs[0].potential));
}
