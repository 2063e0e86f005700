#pragma once

// Shared test oracles, independent of the library code paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "charpent/geometry.hpp"
#include "charpent/solver.hpp"

namespace testsupport {

/// Deterministic uniform values from raw mt19937_64 output (no
/// library-dependent distributions).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed ? seed : 1) {}
  double unit() {
    state_ ^= state_ << 13;
    state_ ^= state_ >> 7;
    state_ ^= state_ << 17;
    return static_cast<double>(state_ >> 11) * 0x1.0p-53;
  }
  double uniform(double a, double b) { return a + unit() * (b - a); }
  int index(int n) { return static_cast<int>(unit() * n) % n; }

 private:
  std::uint64_t state_;
};

/// Exact polygon moment integral of x^p y^q by Green's theorem:
/// int x^p y^q dA = oint x^{p+1}/(p+1) y^q dy over the counterclockwise
/// boundary; each edge integral is a 1-D polynomial handled by
/// Gauss-Legendre of sufficient order. Independent of the fan triangulation.
inline double polygon_moment(const std::vector<Eigen::Vector2d>& poly, int p, int q) {
  double shoelace = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    shoelace += a.x() * b.y() - b.x() * a.y();
  }
  const double orient = shoelace >= 0.0 ? 1.0 : -1.0;

  const int deg = p + 1 + q;  // polynomial degree in the edge parameter
  const int npts = deg / 2 + 1;
  std::vector<double> gx, gw;
  charpent::gauss_legendre(npts, gx, gw);

  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % n];
    const double dy = b.y() - a.y();
    if (dy == 0.0) continue;
    double edge = 0.0;
    for (int k = 0; k < npts; ++k) {
      const double t = 0.5 * (gx[k] + 1.0);
      const double x = a.x() + t * (b.x() - a.x());
      const double y = a.y() + t * (b.y() - a.y());
      edge += 0.5 * gw[k] * std::pow(x, p + 1) * std::pow(y, q) * dy;
    }
    total += edge;
  }
  return orient * total / (p + 1);
}

/// Exact integral of x^p y^q over the straight segment a..b via binomial
/// expansion in the parameter (closed form, no quadrature).
inline double segment_moment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, int p, int q) {
  const double len = (b - a).norm();
  auto binom = [](int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  // x(t)^p y(t)^q = sum_{i<=p, j<=q} C(p,i)C(q,j) ax^{p-i} dx^i ay^{q-j} dy^j t^{i+j}
  const double ax = a.x(), ay = a.y(), dx = b.x() - a.x(), dy = b.y() - a.y();
  double total = 0.0;
  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j <= q; ++j) {
      const double c = binom(p, i) * binom(q, j) * std::pow(ax, p - i) * std::pow(dx, i) *
                       std::pow(ay, q - j) * std::pow(dy, j);
      total += c / (i + j + 1);
    }
  }
  return total * len;
}

/// Max |grid - reference| over masked-interior nodes whose lateral distance
/// is at least `margin` (a fixed margin makes convergence orders comparable
/// across grid resolutions).
inline double max_error_fixed_margin(const charpent::SolutionGrid& grid,
                                     const charpent::DeterminacyTriangle& region,
                                     double margin,
                                     const std::function<double(double, double)>& ref) {
  double err = 0.0;
  for (int j = 0; j < grid.spec.ny; ++j) {
    for (int i = 0; i < grid.spec.nx; ++i) {
      if (grid.mask_at(i, j) != charpent::NodeMask::Interior) continue;
      const Eigen::Vector2d p(grid.spec.x(i), grid.spec.y(j));
      if (region.lateral_distance(p) < margin) continue;
      err = std::max(err, std::fabs(grid.values(i, j) - ref(p.x(), p.y())));
    }
  }
  return err;
}

/// Least-squares slope of log(err) against log(h).
inline double ls_order(const std::vector<double>& hs, const std::vector<double>& errs) {
  const std::size_t n = hs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = std::log(hs[i]), y = std::log(errs[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline charpent::HyperbolicSymbol biquadratic_symbol() {
  return charpent::build_symbol({1.0, 0.0, -5.0, 0.0, 4.0});
}

}  // namespace testsupport
