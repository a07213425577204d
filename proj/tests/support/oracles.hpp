#pragma once

// Independent reference implementations used to pin expected values in the
// tests. Everything here deliberately avoids the library code paths it is
// checking: eigenvalues come from characteristic polynomials, feasible
// weights from bisection on positivity, partial traces from index sums.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace testsupport {

// Real roots of x^3 + a2 x^2 + a1 x + a0, found by bisecting between the
// critical points. Assumes all roots are real (true for characteristic
// polynomials of Hermitian matrices) and simple enough to bracket.
inline std::vector<double> cubic_real_roots(double a2, double a1, double a0) {
  auto p = [&](double x) { return ((x + a2) * x + a1) * x + a0; };

  const double bound =
      1.0 + std::max({std::abs(a2), std::abs(a1), std::abs(a0)});
  std::vector<double> edges{-bound, bound};
  const double disc = a2 * a2 - 3.0 * a1;
  if (disc > 0.0) {
    const double root = std::sqrt(disc);
    edges.push_back((-a2 - root) / 3.0);
    edges.push_back((-a2 + root) / 3.0);
  }
  std::sort(edges.begin(), edges.end());

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double lo = edges[i], hi = edges[i + 1];
    double flo = p(lo), fhi = p(hi);
    if (flo == 0.0) {
      roots.push_back(lo);
      continue;
    }
    if (flo * fhi > 0.0) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = p(mid);
      if ((flo <= 0.0) == (fm <= 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    roots.push_back(0.5 * (lo + hi));
  }
  if (p(edges.back()) == 0.0) roots.push_back(edges.back());
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) {
                            return std::abs(a - b) < 1e-12;
                          }),
              roots.end());
  return roots;
}

// Eigenvalues of a 3x3 Hermitian matrix through its characteristic
// polynomial det(h - x I) = 0, ascending. Coefficients come from the
// trace, the sum of principal 2x2 minors and the determinant.
inline std::vector<double> char_poly_eigenvalues_3x3(
    const Eigen::Matrix3cd& h) {
  const double tr = h.trace().real();
  double minors = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      minors += (h(i, i) * h(j, j) - h(i, j) * h(j, i)).real();
    }
  }
  const double det = h.determinant().real();
  // char poly (monic): x^3 - tr x^2 + minors x - det.
  return cubic_real_roots(-tr, minors, -det);
}

// Largest w >= 0 such that feasible(w) holds, assuming feasibility is an
// interval [0, w*]. Expands an upper bracket, then bisects.
inline double bisect_max_feasible(const std::function<bool(double)>& feasible,
                                  double hi_start = 1.0,
                                  double hi_cap = 1e9) {
  double hi = hi_start;
  while (feasible(hi)) {
    hi *= 2.0;
    if (hi > hi_cap) return hi_cap;
  }
  double lo = 0.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (feasible(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Tr_A[(M x I) rho] written as the raw index sum, with subsystem A first:
// composite index (a, b) = a * dB + b.
inline Eigen::MatrixXcd partial_trace_after_measurement(
    const Eigen::MatrixXcd& m, const Eigen::MatrixXcd& rho, int dA, int dB) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dB, dB);
  for (int b = 0; b < dB; ++b) {
    for (int b2 = 0; b2 < dB; ++b2) {
      std::complex<double> sum = 0.0;
      for (int a = 0; a < dA; ++a) {
        for (int a2 = 0; a2 < dA; ++a2) {
          sum += m(a, a2) * rho(a2 * dB + b, a * dB + b2);
        }
      }
      out(b, b2) = sum;
    }
  }
  return out;
}

}  // namespace testsupport
