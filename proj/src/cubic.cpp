#include "magdimer/cubic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "magdimer/errors.hpp"

namespace magdimer {
namespace {

constexpr double kDedupTol = 1e-9;

void push_real_quadratic(double a, double b, double c, std::vector<double>& out) {
  if (a == 0) {
    if (b != 0) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4 * a * c;
  if (disc < 0) {
    // Tangential double roots come out with a tiny negative discriminant.
    if (disc > -1e-12 * b * b) out.push_back(-b / (2 * a));
    return;
  }
  const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  if (q != 0) {
    out.push_back(q / a);
    out.push_back(c / q);
  } else {
    out.push_back(0.0);
  }
}

// Roots of the monic y^3 + b y^2 + c y + d.
void push_real_monic_cubic(double b, double c, double d, std::vector<double>& out) {
  const double Q = (b * b - 3 * c) / 9;
  const double R = (2 * b * b * b - 9 * b * c + 27 * d) / 54;
  const double Q3 = Q * Q * Q;
  if (R * R < Q3) {
    const double theta = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
    const double s = -2 * std::sqrt(Q);
    const double pi = std::numbers::pi;
    out.push_back(s * std::cos(theta / 3) - b / 3);
    out.push_back(s * std::cos((theta + 2 * pi) / 3) - b / 3);
    out.push_back(s * std::cos((theta - 2 * pi) / 3) - b / 3);
  } else {
    const double A = -std::copysign(std::cbrt(std::abs(R) + std::sqrt(R * R - Q3)), R);
    const double B = A != 0 ? Q / A : 0;
    out.push_back(A + B - b / 3);
    // Near a double root the pair A = B gives a second (tangent) root.
    const double im = std::sqrt(3.0) / 2 * (A - B);
    if (std::abs(im) <= 1e-7 * (std::abs(A) + std::abs(B) + std::abs(b))) {
      out.push_back(-(A + B) / 2 - b / 3);
    }
  }
}

}  // namespace

std::vector<double> solve_cubic_positive_roots(double c3, double c2, double c1, double c0,
                                               bool allow_degenerate) {
  for (double c : {c3, c2, c1, c0})
    if (!std::isfinite(c)) throw NumericError("cubic coefficients must be finite");
  if (c3 == 0 && c2 == 0 && c1 == 0 && c0 == 0)
    throw DomainError("cubic: all coefficients are zero");
  if (c3 == 0 && !allow_degenerate)
    throw DomainError("cubic: leading coefficient is zero");

  std::vector<double> roots;
  double scale = 1.0;
  if (c3 != 0) {
    // Substitute x = scale * y so that the monic coefficients are O(1).
    const double b = c2 / c3, c = c1 / c3, d = c0 / c3;
    scale = std::max({std::abs(b), std::sqrt(std::abs(c)), std::cbrt(std::abs(d))});
    if (scale == 0) scale = 1.0;
    push_real_monic_cubic(b / scale, c / (scale * scale), d / (scale * scale * scale), roots);
    for (double& r : roots) r *= scale;
  } else {
    push_real_quadratic(c2, c1, c0, roots);
  }

  auto poly = [&](double x) { return ((c3 * x + c2) * x + c1) * x + c0; };
  auto dpoly = [&](double x) { return (3 * c3 * x + 2 * c2) * x + c1; };

  std::vector<double> out;
  for (double x : roots) {
    const double dp = dpoly(x);
    if (dp != 0) {
      const double step = poly(x) / dp;
      if (std::isfinite(step) && std::abs(step) < 1e-3 * std::max(std::abs(x), 1e-300))
        x -= step;
    }
    if (x < 0) {
      // Zero roots can land at -eps after rounding.
      if (x > -1e-12 * scale) x = 0;
      else continue;
    }
    out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  std::vector<double> unique;
  for (double x : out) {
    if (!unique.empty() &&
        std::abs(x - unique.back()) <= kDedupTol * std::max(std::abs(x), std::abs(unique.back())))
      continue;
    unique.push_back(x);
  }
  return unique;
}

}  // namespace magdimer
