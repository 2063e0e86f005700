#include "charpent/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace charpent {

namespace {
constexpr double kGeomTol = 1e-12;
}

Gamma0::Gamma0(double a_, double b_) : a(a_), b(b_) {
  if (!(b - a >= 1e-6))
    throw std::invalid_argument("Gamma0: interval [a,b] must satisfy b - a >= 1e-6");
}

double foot(const Eigen::Vector2d& p, double lambda) {
  if (std::fabs(lambda) < 1e-9)
    throw GeometryError(GeometryFailure::ZeroRoot, "foot: zero characteristic root");
  return p.x() + p.y() / lambda;
}

// ---------------------------------------------------------------------------
// Determinacy triangle

DeterminacyTriangle determinacy_region(const HyperbolicSymbol& sym, const Gamma0& g) {
  DeterminacyTriangle t{g, {}, 0.0, 0.0, Eigen::Vector2d::Zero()};
  t.roots = sym.roots;

  // Feet are x1 + x2/lambda; for x2 >= 0 the binding constraints come from
  // the extreme reciprocals.
  double inv_min = 1.0 / sym.roots[0], inv_max = inv_min;
  t.left_root = t.right_root = sym.roots[0];
  for (double r : sym.roots) {
    const double inv = 1.0 / r;
    if (inv < inv_min) {
      inv_min = inv;
      t.left_root = r;
    }
    if (inv > inv_max) {
      inv_max = inv;
      t.right_root = r;
    }
  }
  const double height = (g.b - g.a) / (inv_max - inv_min);
  const double apex_x = g.a - height * inv_min;
  t.apex = Eigen::Vector2d(apex_x, height);
  return t;
}

Location DeterminacyTriangle::classify(const Eigen::Vector2d& p, double tol) const {
  if (p.y() < -tol) return Location::Outside;
  bool boundary = p.y() <= tol;
  for (double r : roots) {
    const double ft = p.x() + p.y() / r;
    if (ft < base.a - tol || ft > base.b + tol) return Location::Outside;
    if (ft <= base.a + tol || ft >= base.b - tol) boundary = true;
  }
  return boundary ? Location::Boundary : Location::Inside;
}

double DeterminacyTriangle::lateral_distance(const Eigen::Vector2d& p) const {
  // L-infinity distance to the line {x1 + x2/lambda = c} is
  // |x1 + x2/lambda - c| / (1 + |1/lambda|).
  const double dl =
      std::fabs(p.x() + p.y() / left_root - base.a) / (1.0 + std::fabs(1.0 / left_root));
  const double dr =
      std::fabs(p.x() + p.y() / right_root - base.b) / (1.0 + std::fabs(1.0 / right_root));
  return std::min(dl, dr);
}

// ---------------------------------------------------------------------------
// Pentagon

namespace {

double shoelace_signed(const std::array<Eigen::Vector2d, 5>& v) {
  double s = 0.0;
  for (int i = 0; i < 5; ++i) {
    const auto& p = v[i];
    const auto& q = v[(i + 1) % 5];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

// Intersection of the characteristic through p with root lp and the one
// through q with root lq. Distinct roots means distinct directions.
Eigen::Vector2d characteristic_intersection(const Eigen::Vector2d& p, double lp,
                                            const Eigen::Vector2d& q, double lq) {
  Eigen::Matrix2d m;
  m << 1.0, -1.0, -lp, lq;
  Eigen::Vector2d rhs = q - p;
  Eigen::Vector2d ts = m.partialPivLu().solve(rhs);
  return p + ts(0) * Eigen::Vector2d(1.0, -lp);
}

bool segments_intersect(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                        const Eigen::Vector2d& c, const Eigen::Vector2d& d) {
  auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u.x() * v.y() - u.y() * v.x();
  };
  const double d1 = cross(b - a, c - a);
  const double d2 = cross(b - a, d - a);
  const double d3 = cross(d - c, a - c);
  const double d4 = cross(d - c, b - c);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool pentagon_candidate_valid(const std::array<Eigen::Vector2d, 5>& v, double c_height) {
  // O1, O2 strictly above Gamma0, not above C
  for (int k : {1, 3}) {
    if (!(v[k].y() > kGeomTol) || v[k].y() > c_height + kGeomTol) return false;
  }
  for (const auto& p : v)
    if (p.y() < -kGeomTol) return false;
  // convex with nonzero turns; this also gives simplicity for the closed chain
  int sign = 0;
  for (int i = 0; i < 5; ++i) {
    Eigen::Vector2d e1 = v[(i + 1) % 5] - v[i];
    Eigen::Vector2d e2 = v[(i + 2) % 5] - v[(i + 1) % 5];
    const double cr = e1.x() * e2.y() - e1.y() * e2.x();
    if (std::fabs(cr) <= kGeomTol) return false;
    const int s = cr > 0 ? 1 : -1;
    if (sign == 0) sign = s;
    if (s != sign) return false;
  }
  if (std::fabs(shoelace_signed(v)) <= kGeomTol) return false;
  // non-adjacent edges must not cross
  for (int i = 0; i < 5; ++i) {
    for (int j = i + 2; j < 5; ++j) {
      if (i == 0 && j == 4) continue;
      if (segments_intersect(v[i], v[(i + 1) % 5], v[j], v[(j + 1) % 5])) return false;
    }
  }
  return true;
}

}  // namespace

double PentagonDomain::area() const { return std::fabs(shoelace_signed(vertices)); }

Location PentagonDomain::classify(const Eigen::Vector2d& p, double tol) const {
  // Interior side of every edge (the accepted pentagons are convex).
  bool boundary = false;
  for (const auto& e : edges) {
    const double s = e.outer_normal.dot(p - e.p0);
    if (s > tol) return Location::Outside;
    if (s >= -tol) boundary = true;
  }
  return boundary ? Location::Boundary : Location::Inside;
}

PentagonDomain build_pentagon(const HyperbolicSymbol& sym, const Gamma0& g,
                              const Eigen::Vector2d& c_point) {
  if (!(c_point.y() > 0.0))
    throw std::invalid_argument("build_pentagon: C must lie strictly above Gamma0");

  const Eigen::Vector2d a_pt(g.a, 0.0), b_pt(g.b, 0.0);

  std::array<int, 4> idx = {0, 1, 2, 3};
  std::sort(idx.begin(), idx.end());
  do {
    const double la = sym.roots[idx[0]];  // edge a -> O1 (characteristic through a)
    const double lb = sym.roots[idx[1]];  // edge O1 -> C (through C)
    const double lc = sym.roots[idx[2]];  // edge C -> O2 (through C)
    const double ld = sym.roots[idx[3]];  // edge O2 -> b (through b)

    std::array<Eigen::Vector2d, 5> v;
    v[0] = a_pt;
    v[1] = characteristic_intersection(a_pt, la, c_point, lb);
    v[2] = c_point;
    v[3] = characteristic_intersection(c_point, lc, b_pt, ld);
    v[4] = b_pt;

    if (!pentagon_candidate_valid(v, c_point.y())) continue;

    PentagonDomain pent;
    pent.vertices = v;
    pent.root_assignment = {idx[0] + 1, idx[1] + 1, idx[2] + 1, idx[3] + 1};
    const std::array<double, 4> lams = {la, lb, lc, ld};
    for (int e = 0; e < 5; ++e) {
      PolygonEdge edge;
      edge.p0 = v[e];
      edge.p1 = v[(e + 1) % 5];
      Eigen::Vector2d d = edge.p1 - edge.p0;
      edge.length = d.norm();
      edge.tangent = d / edge.length;
      // boundary order a,O1,C,O2,b runs clockwise (interior above Gamma0),
      // so the outward normal is the tangent rotated +90 degrees
      edge.outer_normal = Eigen::Vector2d(-edge.tangent.y(), edge.tangent.x());
      edge.root_index = e < 4 ? pent.root_assignment[e] : 0;
      pent.edges[e] = edge;
    }
    // the characteristic edges must be parallel to their assigned direction
    bool normals_ok = true;
    for (int e = 0; e < 4; ++e) {
      const auto& dir = sym.directions[pent.root_assignment[e] - 1];
      if (std::fabs(pent.edges[e].outer_normal.dot(dir.tangent)) > kGeomTol * (1.0 + std::fabs(lams[e])))
        normals_ok = false;
    }
    if (!normals_ok) continue;
    return pent;
  } while (std::next_permutation(idx.begin(), idx.end()));

  std::ostringstream os;
  os << "no valid pentagon through C=(" << c_point.x() << "," << c_point.y() << ") over ["
     << g.a << "," << g.b << "]";
  throw GeometryError(GeometryFailure::NoValidPentagon, os.str());
}

// ---------------------------------------------------------------------------
// Quadrature

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  // Newton iteration on Legendre polynomials, standard recurrence.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

struct TriangleRulePoint {
  double l1, l2, l3, w;  // barycentric coordinates and weight (weights sum to 1)
};

void push_orbit3(std::vector<TriangleRulePoint>& pts, double a, double b, double w) {
  pts.push_back({a, b, b, w});
  pts.push_back({b, a, b, w});
  pts.push_back({b, b, a, w});
}

void push_orbit6(std::vector<TriangleRulePoint>& pts, double a, double b, double c, double w) {
  pts.push_back({a, b, c, w});
  pts.push_back({a, c, b, w});
  pts.push_back({b, a, c, w});
  pts.push_back({b, c, a, w});
  pts.push_back({c, a, b, w});
  pts.push_back({c, b, a, w});
}

// Symmetric triangle rules (barycentric): degree 4 (6 pts), degree 5 (7 pts),
// degree 7 (13 pts). The degree-4 rule backs the order-3 request.
std::vector<TriangleRulePoint> triangle_rule(int order) {
  std::vector<TriangleRulePoint> pts;
  switch (order) {
    case 3:
      push_orbit3(pts, 0.108103018168070, 0.445948490915965, 0.223381589678011);
      push_orbit3(pts, 0.816847572980459, 0.091576213509771, 0.109951743655322);
      break;
    case 5:
      pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.225});
      push_orbit3(pts, 0.059715871789770, 0.470142064105115, 0.132394152788506);
      push_orbit3(pts, 0.797426985353087, 0.101286507323456, 0.125939180544827);
      break;
    case 7:
      pts.push_back({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -0.149570044467670});
      push_orbit3(pts, 0.479308067841923, 0.260345966079038, 0.175615257433204);
      push_orbit3(pts, 0.869739794195568, 0.065130102902216, 0.053347235608839);
      push_orbit6(pts, 0.638444188569809, 0.312865496004875, 0.048690315425316,
                  0.077113760890257);
      break;
    default:
      throw GeometryError(GeometryFailure::UnsupportedOrder,
                          "polygon_quadrature: order must be 3, 5 or 7");
  }
  return pts;
}

}  // namespace

QuadratureRule polygon_quadrature(const std::vector<Eigen::Vector2d>& polygon, int order) {
  const auto rule = triangle_rule(order);
  const std::size_t n = polygon.size();
  if (n < 3) throw std::invalid_argument("polygon_quadrature: need at least 3 vertices");

  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  for (const auto& p : polygon) centroid += p;
  centroid /= static_cast<double>(n);

  QuadratureRule out;
  out.nodes.reserve(n * rule.size());
  out.weights.reserve(n * rule.size());
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = polygon[i];
    const Eigen::Vector2d& q = polygon[(i + 1) % n];
    const double tri_area =
        0.5 * std::fabs((p.x() - centroid.x()) * (q.y() - centroid.y()) -
                        (q.x() - centroid.x()) * (p.y() - centroid.y()));
    if (tri_area == 0.0) continue;
    for (const auto& r : rule) {
      out.nodes.push_back(r.l1 * centroid + r.l2 * p + r.l3 * q);
      out.weights.push_back(r.w * tri_area);
    }
  }
  return out;
}

QuadratureRule edge_quadrature(const Eigen::Vector2d& p0, const Eigen::Vector2d& p1,
                               int order) {
  int npts = 0;
  switch (order) {
    case 3:
      npts = 2;
      break;
    case 5:
      npts = 3;
      break;
    case 7:
      npts = 4;
      break;
    default:
      throw GeometryError(GeometryFailure::UnsupportedOrder,
                          "edge_quadrature: order must be 3, 5 or 7");
  }
  std::vector<double> x, w;
  gauss_legendre(npts, x, w);
  const double len = (p1 - p0).norm();
  QuadratureRule out;
  out.nodes.reserve(npts);
  out.weights.reserve(npts);
  for (int i = 0; i < npts; ++i) {
    const double t = 0.5 * (x[i] + 1.0);
    out.nodes.push_back(p0 + t * (p1 - p0));
    out.weights.push_back(0.5 * w[i] * len);
  }
  return out;
}

}  // namespace charpent
