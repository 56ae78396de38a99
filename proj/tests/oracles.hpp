#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the solver or the sensitivity code.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

/// Monic orthogonal polynomial for Lebesgue measure on [-1, 1] from the
/// three-term recurrence P_{k+1} = x P_k - b_k P_{k-1}, b_k = k^2 / (4k^2 - 1).
/// Coefficients low to high, leading one included.
inline std::vector<double> monic_legendre(int degree) {
  std::vector<double> prev{1.0}, cur{0.0, 1.0};
  if (degree == 0) return prev;
  for (int k = 1; k < degree; ++k) {
    const double b = double(k) * k / (4.0 * k * k - 1.0);
    std::vector<double> next(cur.size() + 1, 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i) next[i + 1] += cur[i];
    for (std::size_t i = 0; i < prev.size(); ++i) next[i] -= b * prev[i];
    prev = cur;
    cur = next;
  }
  return cur;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// c with int_{-1}^{1} (x^2 - c)^3 dx = 0, i.e. 1/7 - 3c/5 + c^2 - c^3 = 0.
inline double l4_quadratic_constant() {
  return bisect([](double c) { return 1.0 / 7 - 3 * c / 5 + c * c - c * c * c; }, 0.0, 1.0, 1e-15);
}

/// Zeros of the monic Legendre polynomial by bisection on a fine grid.
inline std::vector<double> legendre_zeros(int degree) {
  const auto c = monic_legendre(degree);
  auto f = [&](double x) {
    double v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
    return v;
  };
  std::vector<double> out;
  const int grid = 20000;
  for (int i = 0; i < grid; ++i) {
    const double a = -1 + 2.0 * i / grid, b = -1 + 2.0 * (i + 1) / grid;
    if (f(a) == 0) out.push_back(a);
    else if ((f(a) < 0) != (f(b) < 0) && f(b) != 0) out.push_back(bisect(f, a, b, 1e-15));
  }
  return out;
}

inline double monomial_integral(int m, double a, double b) {
  return (std::pow(b, m + 1) - std::pow(a, m + 1)) / (m + 1);
}

/// Difference step for a partial in x_k: 1e-2 of the distance from x_k to the
/// nearest other zero, the mass location, or an atom of a discrete base.
inline double step_in_x(const std::vector<double>& zeros, std::size_t k, std::optional<double> y = std::nullopt,
                        const std::vector<double>& atoms = {}) {
  double scale = 1;
  for (std::size_t j = 0; j < zeros.size(); ++j)
    if (j != k) scale = std::min(scale, std::abs(zeros[j] - zeros[k]));
  if (y && *y != zeros[k]) scale = std::min(scale, std::abs(*y - zeros[k]));
  for (double a : atoms)
    if (a != zeros[k]) scale = std::min(scale, std::abs(a - zeros[k]));
  return 1e-2 * scale;
}

/// Step for a partial in t when the mass moves at speed y_prime.
inline double step_in_t(const std::vector<double>& zeros, std::optional<double> y = std::nullopt,
                        double y_prime = 0) {
  double scale = 1;
  if (y)
    for (double z : zeros)
      if (z != *y) scale = std::min(scale, std::abs(*y - z) / std::max(1.0, std::abs(y_prime)));
  return 1e-2 * scale;
}

template <typename F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// One Richardson step on central differences at h and h / 2; error O(h^4).
template <typename F>
double richardson(F&& f, double x, double h) {
  const double coarse = central_difference(f, x, h);
  const double fine = central_difference(f, x, h / 2);
  return (4 * fine - coarse) / 3;
}

}  // namespace oracle
