#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace tradenet {

// Gauss-Legendre nodes and weights on [-1,1], computed by Newton iteration
// on the Legendre recurrence. Deterministic for a given n.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);

  // Integral of f over [a,b].
  template <typename F>
  double integrate(double a, double b, F&& f) const {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(mid + half * nodes[i]);
    return half * acc;
  }
};

// Golden-section minimization of a unimodal function on [a,b].
double golden_minimize(const std::function<double(double)>& f, double a, double b,
                       double tol = 1e-12, int max_iter = 400);

// Bisection root of f on [a,b]; requires a sign change.
double bisect_root(const std::function<double(double)>& f, double a, double b,
                   double tol = 1e-14, int max_iter = 400);

// log(exp(a) + exp(b)) without overflow.
double log_sum_exp(double a, double b);

// Linear-interpolation percentile (R type 7) on a sorted span; q in [0,1].
// Even-count medians land on the midpoint of the two central order statistics.
double percentile_sorted(std::span<const double> sorted, double q);

double median_sorted(std::span<const double> sorted);

// Sorted copy + percentile, for one-off use.
double percentile(std::vector<double> values, double q);

}  // namespace tradenet
