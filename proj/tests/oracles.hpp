#pragma once

#include <cmath>
#include <functional>

namespace evertest::oracle {

// Adaptive Simpson in long double; independent of the series used by the library.
inline long double simpson_step(const std::function<long double(long double)>& f, long double a,
                                long double b, long double fa, long double fm, long double fb,
                                long double whole, long double tol, int depth) {
  const long double m = (a + b) / 2;
  const long double lm = (a + m) / 2;
  const long double rm = (m + b) / 2;
  const long double flm = f(lm);
  const long double frm = f(rm);
  const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
  const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
  const long double delta = left + right - whole;
  // Tolerance never drops below what long double can resolve on this panel.
  const long double floor = 1e-17L * std::fabs(left + right);
  if (depth <= 0 || (depth < 54 && std::fabs(delta) <= std::fmax(15 * tol, floor))) {
    return left + right + delta / 15;
  }
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

inline long double integrate(const std::function<long double(long double)>& f, long double a,
                             long double b, long double rel_tol = 1e-14L) {
  const long double fa = f(a);
  const long double fb = f(b);
  const long double fm = f((a + b) / 2);
  const long double coarse = (b - a) / 6 * (fa + 4 * fm + fb);
  // Scale the absolute tolerance by a rough magnitude estimate.
  const long double scale = std::fmax(std::fabs(coarse), 1e-300L);
  return simpson_step(f, a, b, fa, fm, fb, coarse, rel_tol * scale, 60);
}

// W(a, b) = int_0^1 (1-u)^a (1+u)^b du by quadrature.
inline long double wealth_quadrature(unsigned a, unsigned b) {
  return integrate(
      [a, b](long double u) {
        if (u >= 1) return a == 0 ? std::pow(2.0L, (long double)b) : 0.0L;
        return std::exp(a * std::log1p(-u) + b * std::log1p(u));
      },
      0.0L, 1.0L);
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace evertest::oracle
