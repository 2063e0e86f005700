#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "charpent/expr.hpp"
#include "charpent/geometry.hpp"
#include "charpent/symbol.hpp"

namespace charpent {

/// Cauchy data on Gamma0 with nu = (0,-1):
///   u = phi, du/dnu = psi, d2u/dnu2 = sigma, d3u/dnu3 = chi,
/// i.e. du/dx2 = -psi, d2u/dx2^2 = sigma, d3u/dx2^3 = -chi on x2 = 0.
struct CauchyData {
  expr::Expression phi, psi, sigma, chi;
};

/// Induces the data quadruple from a manufactured solution u*(x1,x2).
CauchyData data_from_solution(const expr::Expression& u_star);

enum class NodeMask : std::uint8_t { Outside = 0, BoundaryLayer = 1, Interior = 2 };

struct GridSpec {
  Eigen::Vector2d origin{0.0, 0.0};
  double h = 0.0;
  int nx = 0, ny = 0;
  double x(int i) const { return origin.x() + i * h; }
  double y(int j) const { return origin.y() + j * h; }
};

/// Node-centered values over the bounding box of the working region.
/// mask(i,j) == Interior marks nodes inside the region at Chebyshev distance
/// >= 2h from its lateral edges: values are guaranteed there. Bilinear
/// interpolation is offered on cells whose four corners are all Interior.
struct SolutionGrid {
  GridSpec spec;
  Eigen::ArrayXXd values;  // indexed (i, j) = (x index, y index)
  Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> mask;

  NodeMask mask_at(int i, int j) const { return static_cast<NodeMask>(mask(i, j)); }
  /// Throws SolverError{SourceUndefined} when (x1,x2) is not in a fully
  /// interior cell.
  double interpolate(double x1, double x2) const;
};

struct ProblemInstance {
  HyperbolicSymbol symbol;
  Gamma0 gamma0{0.0, 1.0};
  CauchyData data;
  expr::Expression f;
  double h = 0.01;
  int quad_order = 7;
};

/// Boundary value on Gamma0 of (prod_{lambda in suffix} (d/dx1 - lambda d/dx2)) u,
/// expressed through the data by tangential differentiation:
///   sum_k (-1)^k e_k(suffix) d^{|suffix|-k}/dx1^{...} mu_k,
/// mu = (phi, -psi, sigma, -chi).
expr::Expression suffix_boundary(const CauchyData& data, const std::vector<double>& suffix);

/// Solves (d/dx1 - lambda d/dx2) w = source, w(.,0) = boundary on the region
/// by the exact characteristic integral with composite Simpson steps <= h/2.
SolutionGrid transport_solve(double lambda, const expr::Expression& source,
                             const expr::Expression& boundary,
                             const DeterminacyTriangle& region, double h);

/// Same with a grid source sampled by bilinear interpolation.
SolutionGrid transport_solve(double lambda, const SolutionGrid& source,
                             const expr::Expression& boundary,
                             const DeterminacyTriangle& region, double h);

/// Transport cascade for the full problem: with stage roots l_1..l_4 (the
/// ascending roots permuted by stage_order), solves successively
/// P_1 w1 = f/a0, P_2 w2 = w1, P_3 w3 = w2, P_4 u = w3 on the determinacy
/// triangle, each stage with its exact Gamma0 boundary expression.
SolutionGrid cascade_solve(const ProblemInstance& inst,
                           const std::array<int, 4>& stage_order = {0, 1, 2, 3});

struct FdResidualReport {
  double max_abs = 0.0;
  Eigen::Vector2d where{0.0, 0.0};
  int nodes = 0;
};

/// Max over deep-interior nodes (full 5x5 neighborhood Interior) of
/// |sum_p a_p D4_p u - f| with centered fourth-order difference stencils.
FdResidualReport fd_residual(const HyperbolicSymbol& sym, const SolutionGrid& u,
                             const expr::Expression& f);

}  // namespace charpent
