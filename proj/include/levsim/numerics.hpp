#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

namespace levsim::num {

// Root of f in [a, b], assuming f(a) and f(b) have opposite signs.
// Runs bisection until the bracket collapses to machine width.
double bisect(const std::function<double(double)>& f, double a, double b,
              double fa, double fb);

// Adaptive Simpson quadrature of f on [a, b].
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double rel_tol, double abs_tol,
                        int max_depth = 48);

// Integrates f over the sorted breakpoint sequence, applying adaptive
// Simpson on each segment. Breakpoints let the caller pin known peaks.
double integrate_segments(const std::function<double(double)>& f,
                          std::span<const double> breakpoints, double rel_tol);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Solves A X + X A^T + Q = 0 for X (steady-state covariance of a linear
// Langevin system with drift A and diffusion Q).
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& a,
                               const Eigen::MatrixXd& q);

// Runs fn(i) for i in [0, n) on up to `threads` worker threads.
// fn must be safe to call concurrently for distinct i.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace levsim::num
