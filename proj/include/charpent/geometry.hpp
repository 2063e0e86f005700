#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "charpent/symbol.hpp"

namespace charpent {

enum class Location { Outside, Boundary, Inside };

/// The data segment {x1 in [a,b], x2 = 0}. The domain lies above, so the
/// outer normal is (0,-1); the boundary tangent convention is (-1,0).
struct Gamma0 {
  Gamma0(double a, double b);
  double a, b;
  Eigen::Vector2d outer_normal() const { return {0.0, -1.0}; }
  Eigen::Vector2d tangent() const { return {-1.0, 0.0}; }
};

/// x1-coordinate where the characteristic through p with tangent (1,-lambda)
/// meets x2 = 0, i.e. p.x1 + p.x2/lambda. Throws GeometryError{ZeroRoot}.
double foot(const Eigen::Vector2d& p, double lambda);

/// Domain of determinacy of [a,b]: points whose backward characteristic feet
/// for every root all land in [a,b].
struct DeterminacyTriangle {
  Gamma0 base;
  std::array<double, 4> roots{};
  double left_root = 0.0;   // root whose foot constraint binds at x1 = a
  double right_root = 0.0;  // root whose foot constraint binds at x1 = b
  Eigen::Vector2d apex;

  Location classify(const Eigen::Vector2d& p, double tol = 1e-12) const;
  bool contains(const Eigen::Vector2d& p, double tol = 1e-12) const {
    return classify(p, tol) != Location::Outside;
  }
  /// Chebyshev (L-infinity) distance from p to the nearer lateral edge line.
  double lateral_distance(const Eigen::Vector2d& p) const;
};

DeterminacyTriangle determinacy_region(const HyperbolicSymbol& sym, const Gamma0& g);

struct PolygonEdge {
  Eigen::Vector2d p0, p1;
  Eigen::Vector2d outer_normal;  // unit
  Eigen::Vector2d tangent;       // unit, boundary orientation p0 -> p1
  double length = 0.0;
  int root_index = 0;  // 1..4 on characteristic edges, 0 on Gamma0
};

/// The proof's pentagon a O1 C O2 b: four characteristic edges (through a,
/// through C twice, through b) closed by Gamma0. Vertices are stored in
/// boundary order (a,0), O1, C, O2, (b,0); edge 4 is the closing Gamma0 edge
/// (b,0) -> (a,0).
struct PentagonDomain {
  std::array<Eigen::Vector2d, 5> vertices{};
  std::array<PolygonEdge, 5> edges{};
  std::array<int, 4> root_assignment{};  // root index of edges 0..3

  double area() const;
  Location classify(const Eigen::Vector2d& p, double tol = 1e-12) const;
  bool contains(const Eigen::Vector2d& p, double tol = 1e-12) const {
    return classify(p, tol) != Location::Outside;
  }
  std::vector<Eigen::Vector2d> vertex_list() const {
    return {vertices.begin(), vertices.end()};
  }
};

/// Deterministic construction: all assignments of distinct roots to the four
/// characteristic edges are tried in lexicographic root-index order and the
/// first one satisfying the domain invariants wins.
/// Throws GeometryError{NoValidPentagon} when none does and
/// std::invalid_argument when C is not strictly above Gamma0.
PentagonDomain build_pentagon(const HyperbolicSymbol& sym, const Gamma0& g,
                              const Eigen::Vector2d& c_point);

struct QuadratureRule {
  std::vector<Eigen::Vector2d> nodes;
  std::vector<double> weights;
};

/// Centroid-fan triangulation with a symmetric triangle rule, exact for
/// total degree <= order. order must be one of {3,5,7}.
QuadratureRule polygon_quadrature(const std::vector<Eigen::Vector2d>& polygon, int order);

/// Gauss-Legendre rule on the segment p0..p1, exact for degree <= order
/// (orders 3, 5, 7 use 2, 3, 4 points); weights sum to the segment length.
QuadratureRule edge_quadrature(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                               int order);

/// Gauss-Legendre nodes/weights on [-1,1], any n >= 1.
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace charpent
