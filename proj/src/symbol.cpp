#include "charpent/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

namespace charpent {

namespace {

constexpr double kZeroLeading = 1e-12;
constexpr double kImagTol = 1e-8;
constexpr double kZeroRootTol = 1e-9;

std::complex<double> horner(const SymbolCoefficients& c, std::complex<double> z) {
  return (((c.a0 * z + c.a1) * z + c.a2) * z + c.a3) * z + c.a4;
}

std::complex<double> horner_deriv(const SymbolCoefficients& c, std::complex<double> z) {
  return ((4.0 * c.a0 * z + 3.0 * c.a1) * z + 2.0 * c.a2) * z + c.a3;
}

double coeff_scale(const SymbolCoefficients& c) {
  return std::max({std::fabs(c.a0), std::fabs(c.a1), std::fabs(c.a2), std::fabs(c.a3),
                   std::fabs(c.a4)});
}

}  // namespace

double eval_symbol(const SymbolCoefficients& c, const Eigen::Vector2d& xi) {
  const double x = xi.x(), y = xi.y();
  return c.a0 * x * x * x * x + c.a1 * x * x * x * y + c.a2 * x * x * y * y +
         c.a3 * x * y * y * y + c.a4 * y * y * y * y;
}

double eval_symbol(const HyperbolicSymbol& sym, const Eigen::Vector2d& xi) {
  return eval_symbol(sym.coeffs, xi);
}

HyperbolicSymbol build_symbol(const SymbolCoefficients& coeffs, double gap_tol) {
  if (std::fabs(coeffs.a0) <= kZeroLeading)
    throw std::invalid_argument("build_symbol: leading coefficient a0 is zero");

  // Monic normalization keeps the companion matrix invariant under a common
  // scaling of all five coefficients.
  const double b3 = coeffs.a1 / coeffs.a0;
  const double b2 = coeffs.a2 / coeffs.a0;
  const double b1 = coeffs.a3 / coeffs.a0;
  const double b0 = coeffs.a4 / coeffs.a0;

  Eigen::Matrix4d companion = Eigen::Matrix4d::Zero();
  companion(0, 3) = -b0;
  companion(1, 3) = -b1;
  companion(2, 3) = -b2;
  companion(3, 3) = -b3;
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(3, 2) = 1.0;

  Eigen::EigenSolver<Eigen::Matrix4d> solver(companion);
  std::array<std::complex<double>, 4> roots;
  for (int i = 0; i < 4; ++i) roots[i] = solver.eigenvalues()(i);

  // Newton polishing on the original quartic, at most 20 steps per root.
  for (auto& z : roots) {
    for (int it = 0; it < 20; ++it) {
      std::complex<double> p = horner(coeffs, z);
      std::complex<double> dp = horner_deriv(coeffs, z);
      if (std::abs(dp) == 0.0) break;
      std::complex<double> step = p / dp;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
  }

  for (const auto& z : roots) {
    if (std::fabs(z.imag()) > kImagTol) {
      std::ostringstream os;
      os << "symbol is not hyperbolic: root " << z.real() << (z.imag() < 0 ? "-" : "+")
         << std::fabs(z.imag()) << "i has non-negligible imaginary part";
      throw SymbolError(SymbolFailure::NonRealRoots, os.str());
    }
  }

  std::array<double, 4> real_roots{};
  for (int i = 0; i < 4; ++i) real_roots[i] = roots[i].real();
  std::sort(real_roots.begin(), real_roots.end());

  for (int i = 0; i < 3; ++i) {
    if (real_roots[i + 1] - real_roots[i] < gap_tol) {
      std::ostringstream os;
      os << "degenerate symbol: roots " << real_roots[i] << " and " << real_roots[i + 1]
         << " are closer than gap_tol=" << gap_tol;
      throw SymbolError(SymbolFailure::MultipleRoots, os.str());
    }
  }
  for (double r : real_roots) {
    if (std::fabs(r) < kZeroRootTol)
      throw SymbolError(SymbolFailure::ZeroRoot,
                        "zero characteristic root: the line x2=0 is characteristic and the "
                        "Cauchy problem on it is ill-posed");
  }

  // Residual sanity: each polished root must satisfy the quartic.
  const double cs = coeff_scale(coeffs);
  for (double r : real_roots) {
    const double m = std::max(1.0, std::fabs(r));
    const double scale = cs * m * m * m * m;
    if (std::fabs(horner(coeffs, r).real()) > 1e-9 * scale)
      throw SymbolError(SymbolFailure::MultipleRoots,
                        "root refinement did not converge (ill-conditioned symbol)");
  }

  HyperbolicSymbol sym;
  sym.coeffs = coeffs;
  sym.roots = real_roots;
  for (int j = 0; j < 4; ++j) {
    CharacteristicDirection d;
    d.index = j + 1;
    d.root = real_roots[j];
    d.tangent = Eigen::Vector2d(1.0, -real_roots[j]);
    d.normal = Eigen::Vector2d(real_roots[j], 1.0);
    d.slope = -real_roots[j];
    d.angle = std::atan(d.slope);
    sym.directions[j] = d;
  }
  return sym;
}

SymbolCoefficients coeffs_from_roots(double a0, const std::array<double, 4>& roots) {
  if (std::fabs(a0) <= kZeroLeading)
    throw std::invalid_argument("coeffs_from_roots: a0 is zero");
  std::array<double, 4> r = roots;
  std::sort(r.begin(), r.end());
  for (int i = 0; i < 3; ++i)
    if (r[i + 1] - r[i] < 1e-6)
      throw SymbolError(SymbolFailure::DegenerateRoots, "roots are not distinct");
  for (double v : r)
    if (std::fabs(v) < kZeroRootTol)
      throw SymbolError(SymbolFailure::DegenerateRoots, "roots must be nonzero");

  const double e1 = r[0] + r[1] + r[2] + r[3];
  const double e2 = r[0] * r[1] + r[0] * r[2] + r[0] * r[3] + r[1] * r[2] + r[1] * r[3] +
                    r[2] * r[3];
  const double e3 = r[0] * r[1] * r[2] + r[0] * r[1] * r[3] + r[0] * r[2] * r[3] +
                    r[1] * r[2] * r[3];
  const double e4 = r[0] * r[1] * r[2] * r[3];

  SymbolCoefficients c;
  c.a0 = a0;
  c.a1 = -a0 * e1;
  c.a2 = a0 * e2;
  c.a3 = -a0 * e3;
  c.a4 = a0 * e4;
  return c;
}

}  // namespace charpent
