#include "levsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "levsim/errors.hpp"

namespace levsim::num {

double bisect(const std::function<double(double)>& f, double a, double b,
              double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw NumericalError("bisect: endpoints do not bracket a root");
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (a + b);
    if (m == a || m == b) return m;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

namespace {

double simpson_step(const std::function<double(double)>& f, double a, double b,
                    double fa, double fm, double fb, double whole,
                    double rel_tol, double abs_tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 ||
      std::abs(delta) <=
          15.0 * std::max(abs_tol, rel_tol * std::abs(left + right))) {
    return left + right + delta / 15.0;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, rel_tol, 0.5 * abs_tol,
                      depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, rel_tol, 0.5 * abs_tol,
                      depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, double abs_tol,
                        int max_depth) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, max_depth);
}

double integrate_segments(const std::function<double(double)>& f,
                          std::span<const double> breakpoints,
                          double rel_tol) {
  if (breakpoints.size() < 2)
    throw NumericalError("integrate_segments: need at least two breakpoints");
  // First pass estimates the overall scale so each segment gets a sane
  // absolute floor; otherwise near-zero segments over-refine.
  double coarse = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double a = breakpoints[i];
    const double b = breakpoints[i + 1];
    coarse += (b - a) / 6.0 *
              (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
  }
  const double abs_floor =
      std::max(1e-300, std::abs(coarse) * rel_tol * 1e-3);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    total += adaptive_simpson(f, breakpoints[i], breakpoints[i + 1], rel_tol,
                              abs_floor);
  }
  return total;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw NumericalError("fit_line: need matching x/y with >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw NumericalError("fit_line: degenerate abscissa");
  LineFit out;
  out.slope = (n * sxy - sx * sy) / det;
  out.intercept = (sy - out.slope * sx) / n;
  return out;
}

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw NumericalError("solve_lyapunov: dimension mismatch");
  // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X)
  Eigen::MatrixXd big = Eigen::MatrixXd::Zero(n * n, n * n);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < n; ++k) {
        big(i + n * j, k + n * j) += a(i, k);  // I (x) A
        big(i + n * j, i + n * k) += a(j, k);  // A (x) I
      }
  Eigen::VectorXd rhs(n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) rhs(i + n * j) = -q(i, j);
  const Eigen::VectorXd sol = big.fullPivLu().solve(rhs);
  Eigen::MatrixXd x(n, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = sol(i + n * j);
  return 0.5 * (x + x.transpose());
}

void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t workers = std::min<std::size_t>(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace levsim::num
