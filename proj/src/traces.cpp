#include "charpent/traces.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace charpent {

namespace {

using expr::Expression;
using expr::Var;

Expression dxn(const Expression& e, int n1, int n2) {
  return expr::derivative(expr::derivative(e, Var::X1, n1), Var::X2, n2);
}

std::vector<PolygonEdge> polygon_edges(const std::vector<Eigen::Vector2d>& poly) {
  const std::size_t n = poly.size();
  double shoelace = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % n];
    shoelace += p.x() * q.y() - q.x() * p.y();
  }
  const bool clockwise = shoelace < 0.0;
  std::vector<PolygonEdge> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    PolygonEdge& e = edges[i];
    e.p0 = poly[i];
    e.p1 = poly[(i + 1) % n];
    Eigen::Vector2d d = e.p1 - e.p0;
    e.length = d.norm();
    e.tangent = d / e.length;
    e.outer_normal = clockwise ? Eigen::Vector2d(-e.tangent.y(), e.tangent.x())
                               : Eigen::Vector2d(e.tangent.y(), -e.tangent.x());
  }
  return edges;
}

double integrate_polygon(const std::vector<Eigen::Vector2d>& poly, int order,
                         const std::function<double(double, double)>& f) {
  const QuadratureRule rule = polygon_quadrature(poly, order);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    s += rule.weights[i] * f(rule.nodes[i].x(), rule.nodes[i].y());
  return s;
}

double integrate_edges(const std::vector<PolygonEdge>& edges, int order,
                       const std::function<double(const PolygonEdge&, double, double)>& f) {
  double s = 0.0;
  for (const auto& e : edges) {
    const QuadratureRule rule = edge_quadrature(e.p0, e.p1, order);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
      s += rule.weights[i] * f(e, rule.nodes[i].x(), rule.nodes[i].y());
  }
  return s;
}

double eval2(const Expression& e, double x, double y) { return expr::eval_at(e, x, y); }

}  // namespace

TraceSet gamma0_traces(const HyperbolicSymbol& sym, const CauchyData& data) {
  using namespace expr;
  const std::array<Expression, 4> mu = {data.phi, neg(data.psi), data.sigma, neg(data.chi)};
  TraceSet out;
  for (int q = 0; q <= 3; ++q) {
    const int i = 3 - q;
    Expression sum = constant(0.0);
    for (int p = i + 1; p <= 4; ++p) {
      const double ap = sym.coeffs[p];
      if (ap == 0.0) continue;
      sum = add(sum, mul(constant(ap), derivative(mu[p - 1 - i], Var::X1, 4 - p)));
    }
    out.traces[q] = neg(sum);
  }
  return out;
}

Expression apply_operator(const SymbolCoefficients& coeffs, const Expression& e) {
  using namespace expr;
  Expression sum = constant(0.0);
  for (int p = 0; p <= 4; ++p) {
    const double ap = coeffs[p];
    if (ap == 0.0) continue;
    sum = add(sum, mul(constant(ap), dxn(e, 4 - p, p)));
  }
  return sum;
}

Expression transport_factor(double lambda, const Expression& e) {
  using namespace expr;
  return sub(derivative(e, Var::X1), mul(constant(lambda), derivative(e, Var::X2)));
}

std::pair<Expression, Expression> bilinear_flux(const SymbolCoefficients& coeffs,
                                                const Expression& u, const Expression& v) {
  using namespace expr;
  Expression f1 = constant(0.0);
  Expression f2 = constant(0.0);
  for (int p = 0; p <= 4; ++p) {
    const double ap = coeffs[p];
    if (ap == 0.0) continue;
    // ordered factor list of the term: 4-p copies of d/dx1 then p of d/dx2
    for (int k = 1; k <= 4; ++k) {
      const bool comp_x1 = k <= 4 - p;
      // D_{>k} u: factors k+1..4
      const int ux1 = std::max(0, (4 - p) - k);
      const int ux2 = 4 - k - ux1;
      // D_{<k} v: factors 1..k-1
      const int vx1 = std::min(k - 1, 4 - p);
      const int vx2 = (k - 1) - vx1;
      const double sign = (k % 2 == 1) ? 1.0 : -1.0;
      Expression contrib = mul(constant(sign * ap), mul(dxn(u, ux1, ux2), dxn(v, vx1, vx2)));
      if (comp_x1)
        f1 = add(f1, contrib);
      else
        f2 = add(f2, contrib);
    }
  }
  return {f1, f2};
}

GreenResult green_flux_residual(const HyperbolicSymbol& sym, const Expression& u,
                                const Expression& v,
                                const std::vector<Eigen::Vector2d>& polygon, int order) {
  const Expression lu = apply_operator(sym.coeffs, u);
  const Expression lv = apply_operator(sym.coeffs, v);
  const auto [f1, f2] = bilinear_flux(sym.coeffs, u, v);

  GreenResult res;
  res.side_a = integrate_polygon(polygon, order, [&](double x, double y) {
    return eval2(lu, x, y) * eval2(v, x, y) - eval2(u, x, y) * eval2(lv, x, y);
  });
  res.side_b = integrate_edges(polygon_edges(polygon), order,
                               [&](const PolygonEdge& e, double x, double y) {
                                 return e.outer_normal.x() * eval2(f1, x, y) +
                                        e.outer_normal.y() * eval2(f2, x, y);
                               });
  res.residual = std::fabs(res.side_a - res.side_b);
  return res;
}

StripBump make_strip_bump(const PentagonDomain& pent, double eps, const Expression& w) {
  using namespace expr;
  const double a = pent.vertices[0].x();
  const double b = pent.vertices[4].x();
  if (!(eps > 0.0) || a + eps >= b - eps - 1e-9)
    throw GeometryError(GeometryFailure::BumpSupportViolation,
                        "strip bump: eps leaves no Gamma0 window");
  const double lo = a + eps, hi = b - eps;

  // height of the pentagon's upper boundary at x, +inf where no
  // characteristic edge covers x
  auto upper = [&](double x) {
    double best = std::numeric_limits<double>::infinity();
    for (int e = 0; e < 4; ++e) {
      const auto& ed = pent.edges[e];
      const double x0 = std::min(ed.p0.x(), ed.p1.x());
      const double x1 = std::max(ed.p0.x(), ed.p1.x());
      if (x < x0 - 1e-12 || x > x1 + 1e-12) continue;
      const double t = (x - ed.p0.x()) / (ed.p1.x() - ed.p0.x());
      best = std::min(best, ed.p0.y() + t * (ed.p1.y() - ed.p0.y()));
    }
    return best;
  };
  const double height = 0.8 * std::min(upper(lo), upper(hi));
  if (!(height > 1e-9) || !std::isfinite(height))
    throw GeometryError(GeometryFailure::BumpSupportViolation,
                        "strip bump: degenerate strip height");
  for (double x : {lo, hi})
    if (pent.classify(Eigen::Vector2d(x, height)) == Location::Outside)
      throw GeometryError(GeometryFailure::BumpSupportViolation,
                          "strip bump: strip exits the pentagon");

  const Expression x1v = variable(Var::X1);
  const Expression x2v = variable(Var::X2);
  const Expression g =
      pow(mul(sub(x1v, constant(lo)), sub(constant(hi), x1v)), constant(5.0));
  const Expression q = pow(sub(constant(height), x2v), constant(5.0));
  // normalize to 1 at the Gamma0 midpoint so residual tolerances are
  // meaningful against O(1) integrands
  const double gmax = std::pow(0.25 * (hi - lo) * (hi - lo), 5.0);
  const double qmax = std::pow(height, 5.0);
  StripBump bump;
  bump.v = mul(constant(1.0 / (gmax * qmax)), mul(mul(g, q), w));
  bump.x_lo = lo;
  bump.x_hi = hi;
  bump.height = height;
  return bump;
}

GreenResult gamma0_identity_residual(const HyperbolicSymbol& sym, const CauchyData& data,
                                     const Expression& u_star, const StripBump& bump,
                                     const TraceSet* override_traces) {
  using namespace expr;
  const Expression lu = apply_operator(sym.coeffs, u_star);
  const Expression lv = apply_operator(sym.coeffs, bump.v);

  // area side over the strip rectangle with a tensor Gauss rule exact for the
  // polynomial bump degrees
  std::vector<double> gx, gw;
  gauss_legendre(12, gx, gw);
  double side_a = 0.0;
  for (int i = 0; i < 12; ++i) {
    const double x = bump.x_lo + 0.5 * (gx[i] + 1.0) * (bump.x_hi - bump.x_lo);
    const double wx = 0.5 * gw[i] * (bump.x_hi - bump.x_lo);
    for (int j = 0; j < 12; ++j) {
      const double y = 0.5 * (gx[j] + 1.0) * bump.height;
      const double wy = 0.5 * gw[j] * bump.height;
      side_a += wx * wy *
                (eval2(lu, x, y) * eval2(bump.v, x, y) - eval2(u_star, x, y) * eval2(lv, x, y));
    }
  }

  const TraceSet traces = override_traces ? *override_traces : gamma0_traces(sym, data);
  // d^j v/dnu^j on Gamma0 with nu = (0,-1): (-1)^j d^j v/dx2^j at x2 = 0
  std::array<Expression, 4> vn;
  for (int j = 0; j <= 3; ++j) {
    Expression d = derivative(bump.v, Var::X2, j);
    d = substitute(d, Var::X2, constant(0.0));
    vn[j] = (j % 2 == 0) ? d : neg(d);
  }
  std::vector<double> lx, lw;
  gauss_legendre(16, lx, lw);
  double side_b = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double x = bump.x_lo + 0.5 * (lx[i] + 1.0) * (bump.x_hi - bump.x_lo);
    const double wq = 0.5 * lw[i] * (bump.x_hi - bump.x_lo);
    double s = 0.0;
    for (int j = 0; j <= 3; ++j)
      s += expr::eval_at(traces.traces[3 - j], x) * expr::eval_at(vn[j], x);
    side_b += wq * s;
  }

  return {side_a, side_b, std::fabs(side_a - side_b)};
}

TildeTraceSamples tilde_traces(const HyperbolicSymbol& sym, const Expression& u_star,
                               const PentagonDomain& pent, int samples_per_edge) {
  if (samples_per_edge < 2)
    throw std::invalid_argument("tilde_traces: need at least 2 samples per edge");
  // successive transport factors applied in descending root order
  const Expression p4u = transport_factor(sym.roots[3], u_star);
  const Expression p34u = transport_factor(sym.roots[2], p4u);
  const Expression p234u = transport_factor(sym.roots[1], p34u);
  const std::array<Expression, 4> fields = {u_star, p4u, p34u, p234u};

  TildeTraceSamples out;
  for (int e = 0; e < 5; ++e) {
    const auto& edge = pent.edges[e];
    TildeTraceSamples::Edge rec;
    rec.edge_index = e;
    rec.root_index = edge.root_index;
    // <nu, a^{4-p}> factors: p = 0 -> a^4, ..., p = 3 -> a^1
    std::array<double, 4> nu_dot{};
    for (int p = 0; p <= 3; ++p)
      nu_dot[p] = edge.outer_normal.dot(sym.directions[3 - p].tangent);
    for (int s = 0; s < samples_per_edge; ++s) {
      const double t = static_cast<double>(s) / (samples_per_edge - 1);
      const Eigen::Vector2d pt = edge.p0 + t * (edge.p1 - edge.p0);
      rec.points.push_back(pt);
      for (int p = 0; p <= 3; ++p)
        rec.values[p].push_back(nu_dot[p] * eval2(fields[p], pt.x(), pt.y()));
    }
    out.edges.push_back(std::move(rec));
  }
  return out;
}

GreenResult kernel_identity_residual(const HyperbolicSymbol& sym, const Expression& u_star,
                                     int root_index, const Expression& hprofile,
                                     const PentagonDomain& pent, int order) {
  using namespace expr;
  if (root_index < 1 || root_index > 4)
    throw std::invalid_argument("kernel_identity_residual: root_index must be 1..4");
  const double lam = sym.roots[root_index - 1];

  // v = hprofile(x2 + lambda_j x1) is annihilated by P_j, hence by L+.
  const Expression arg = add(variable(Var::X2), mul(constant(lam), variable(Var::X1)));
  const Expression v = substitute(hprofile, Var::X1, arg);

  const Expression p1v = transport_factor(sym.roots[0], v);
  const Expression p21v = transport_factor(sym.roots[1], p1v);
  const Expression p321v = transport_factor(sym.roots[2], p21v);

  const Expression p4u = transport_factor(sym.roots[3], u_star);
  const Expression p34u = transport_factor(sym.roots[2], p4u);
  const Expression p234u = transport_factor(sym.roots[1], p34u);

  const Expression lu = apply_operator(sym.coeffs, u_star);

  GreenResult res;
  res.side_a = integrate_polygon(pent.vertex_list(), order, [&](double x, double y) {
    return eval2(lu, x, y) * eval2(v, x, y);
  });

  const std::vector<PolygonEdge> edges(pent.edges.begin(), pent.edges.end());
  const auto& dirs = sym.directions;
  res.side_b =
      sym.coeffs.a0 *
      integrate_edges(edges, order, [&](const PolygonEdge& e, double x, double y) {
        const double n1 = e.outer_normal.dot(dirs[0].tangent);
        const double n2 = e.outer_normal.dot(dirs[1].tangent);
        const double n3 = e.outer_normal.dot(dirs[2].tangent);
        const double n4 = e.outer_normal.dot(dirs[3].tangent);
        return n1 * eval2(p234u, x, y) * eval2(v, x, y) -
               n2 * eval2(p34u, x, y) * eval2(p1v, x, y) +
               n3 * eval2(p4u, x, y) * eval2(p21v, x, y) -
               n4 * eval2(u_star, x, y) * eval2(p321v, x, y);
      });
  res.residual = std::fabs(res.side_a - res.side_b);
  return res;
}

// ---------------------------------------------------------------------------
// Wave-in-disk demonstration

namespace {

struct AdaptiveResult {
  double value = 0.0;
  int panels = 0;
};

AdaptiveResult simpson_doubling(const std::function<double(double)>& f, double a, double b,
                                double rel_tol, int max_doublings = 22) {
  int n = 8;
  auto composite = [&](int panels) {
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int k = 1; k < panels; k += 2) s += 4.0 * f(a + k * h);
    for (int k = 2; k < panels; k += 2) s += 2.0 * f(a + k * h);
    return s * h / 3.0;
  };
  double prev = composite(n);
  for (int d = 0; d < max_doublings; ++d) {
    n *= 2;
    const double cur = composite(n);
    if (std::fabs(cur - prev) <= rel_tol * std::max(std::fabs(cur), 1e-300))
      return {cur, n};
    prev = cur;
  }
  return {prev, n};
}

}  // namespace

WaveDiskResult wave_disk_demo(double p, const std::vector<double>& radii) {
  if (p >= 0.0)
    throw std::invalid_argument("wave_disk_demo: p must be negative (nothing to demonstrate)");
  if (radii.size() < 2)
    throw std::invalid_argument("wave_disk_demo: need at least two radii");
  for (double r : radii)
    if (!(r > 0.0 && r < 1.0))
      throw std::invalid_argument("wave_disk_demo: radii must lie in (0,1)");

  WaveDiskResult out;
  const double rel = 1e-8;

  for (double r : radii) {
    // 1 - r^2 cos^2 t = (1-r^2) + r^2 sin^2 t, computed cancellation-free
    const double x = (1.0 - r) * (1.0 + r);
    auto base = [&](double t) {
      const double st = std::sin(t);
      return x + r * r * st * st;
    };
    auto uf = [&](double t) { return std::pow(base(t), p); };
    auto nf = [&](double t) {
      const double cs = std::cos(t) * std::sin(t);
      return cs * cs * std::pow(base(t), 2.0 * p);
    };
    const AdaptiveResult Ia = simpson_doubling(uf, 0.0, M_PI / 2.0, rel);
    const AdaptiveResult Na = simpson_doubling(nf, 0.0, M_PI / 2.0, rel);
    WaveDiskRow row;
    row.r = r;
    row.I = 4.0 * r * Ia.value;
    row.N = 4.0 * std::pow(r, 5) * Na.value;
    row.panels = std::max(Ia.panels, Na.panels);
    out.rows.push_back(row);
  }

  // least-squares fit of log I against log(1 - r^2)
  const std::size_t n = out.rows.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& row : out.rows) {
    const double lx = std::log((1.0 - row.r) * (1.0 + row.r));
    const double ly = std::log(row.I);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  out.intercept = (sy - out.slope * sx) / n;

  {
    const auto& r1 = out.rows[n - 2];
    const auto& r2 = out.rows[n - 1];
    out.tail_slope = (std::log(r2.I) - std::log(r1.I)) /
                     (std::log((1.0 - r2.r) * (1.0 + r2.r)) -
                      std::log((1.0 - r1.r) * (1.0 + r1.r)));
  }
  out.trace_blowup = out.tail_slope < -0.01;

  // L2(K) membership: mass of u^2 in geometric rings approaching r = 1.
  std::vector<double> gx, gw;
  gauss_legendre(24, gx, gw);
  auto ring_mass = [&](int j) {
    // r = 1 - d 10^{-s}, s in [0,1], d = 10^{-j}
    const double d = std::pow(10.0, -j);
    double total = 0.0;
    for (int i = 0; i < 24; ++i) {
      const double s = 0.5 * (gx[i] + 1.0);
      const double r = 1.0 - d * std::pow(10.0, -s);
      const double x = (1.0 - r) * (1.0 + r);
      auto f = [&](double t) {
        const double st = std::sin(t);
        return std::pow(x + r * r * st * st, 2.0 * p);
      };
      const double J = 4.0 * simpson_doubling(f, 0.0, M_PI / 2.0, rel, 18).value;
      const double dr_ds = d * std::log(10.0) * std::pow(10.0, -s);
      total += 0.5 * gw[i] * r * J * dr_ds;
    }
    return total;
  };
  for (int j = 1; j <= 6; ++j) out.shells.push_back(ring_mass(j));
  out.shell_ratio = out.shells.back() / out.shells[out.shells.size() - 2];
  out.l2_member = out.shell_ratio < 0.95;
  return out;
}

}  // namespace charpent
