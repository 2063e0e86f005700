#pragma once

#include <Eigen/Dense>
#include <array>

#include "charpent/errors.hpp"

namespace charpent {

/// Coefficients of the quartic operator
///   a0 d^4/dx1^4 + a1 d^4/dx1^3 dx2 + a2 d^4/dx1^2 dx2^2
///     + a3 d^4/dx1 dx2^3 + a4 d^4/dx2^4.
struct SymbolCoefficients {
  double a0 = 1.0, a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;

  double operator[](int p) const {
    const double* v[5] = {&a0, &a1, &a2, &a3, &a4};
    return *v[p];
  }
};

struct CharacteristicDirection {
  int index = 0;               // 1..4, ascending root order
  double root = 0.0;           // lambda_j
  Eigen::Vector2d tangent;     // (1, -lambda_j)
  Eigen::Vector2d normal;      // (lambda_j, 1)
  double slope = 0.0;          // -lambda_j
  double angle = 0.0;          // atan(slope), radians
};

/// A classified hyperbolic symbol: four simple real nonzero roots of
/// a0 l^4 + a1 l^3 + a2 l^2 + a3 l + a4 = 0, sorted ascending, with the
/// factorization L(xi) = a0 * prod_j (xi1 - lambda_j xi2).
struct HyperbolicSymbol {
  SymbolCoefficients coeffs;
  std::array<double, 4> roots{};  // strictly increasing
  std::array<CharacteristicDirection, 4> directions{};
};

/// Classifies the symbol. Roots come from the companion-matrix eigenvalues
/// followed by Newton polishing on the quartic. Throws SymbolError with kind
/// NonRealRoots, MultipleRoots (gap below gap_tol) or ZeroRoot; throws
/// std::invalid_argument when a0 is (numerically) zero.
HyperbolicSymbol build_symbol(const SymbolCoefficients& coeffs, double gap_tol = 1e-6);

double eval_symbol(const SymbolCoefficients& coeffs, const Eigen::Vector2d& xi);
double eval_symbol(const HyperbolicSymbol& sym, const Eigen::Vector2d& xi);

/// Inverse of classification: a_k = a0 * (-1)^k * e_k(roots).
/// Throws SymbolError{DegenerateRoots} when roots are too close or too small.
SymbolCoefficients coeffs_from_roots(double a0, const std::array<double, 4>& roots);

}  // namespace charpent
