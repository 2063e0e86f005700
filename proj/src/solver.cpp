#include "charpent/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

namespace charpent {

namespace {

using expr::Expression;

struct StageField {
  GridSpec spec;
  Eigen::ArrayXXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> valid;
};

std::optional<double> sample_bilinear(const StageField& g, double x, double y) {
  const double u = (x - g.spec.origin.x()) / g.spec.h;
  const double v = (y - g.spec.origin.y()) / g.spec.h;
  if (u < -1e-9 || u > g.spec.nx - 1 + 1e-9 || v < -1e-9 || v > g.spec.ny - 1 + 1e-9)
    return std::nullopt;
  const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, g.spec.nx - 2);
  const int j0 = std::clamp(static_cast<int>(std::floor(v)), 0, g.spec.ny - 2);
  if (!(g.valid(i0, j0) && g.valid(i0 + 1, j0) && g.valid(i0, j0 + 1) &&
        g.valid(i0 + 1, j0 + 1)))
    return std::nullopt;
  const double fx = u - i0, fy = v - j0;
  return g.values(i0, j0) * (1.0 - fx) * (1.0 - fy) + g.values(i0 + 1, j0) * fx * (1.0 - fy) +
         g.values(i0, j0 + 1) * (1.0 - fx) * fy + g.values(i0 + 1, j0 + 1) * fx * fy;
}

using Sampler = std::function<std::optional<double>(double, double)>;

Sampler expression_sampler(const Expression& e) {
  return [e](double x, double y) -> std::optional<double> {
    try {
      return expr::eval_at(e, x, y);
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };
}

Sampler stage_sampler(const StageField& g) {
  return [&g](double x, double y) { return sample_bilinear(g, x, y); };
}

/// One transport factor solved on every node of `spec` by the characteristic
/// integral w(P) = boundary(foot) - (1/lambda) * int_0^{x2} source(Q(s)) ds
/// with Q(s) tracing the characteristic from the foot up to P.
StageField transport_stage(double lambda, const Sampler& source, const Expression& boundary,
                           const GridSpec& spec) {
  StageField out;
  out.spec = spec;
  out.values = Eigen::ArrayXXd::Zero(spec.nx, spec.ny);
  out.valid = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(spec.nx, spec.ny,
                                                                           false);
  const double h = spec.h;
  std::vector<double> g;
  for (int j = 0; j < spec.ny; ++j) {
    const double y = spec.y(j);
    for (int i = 0; i < spec.nx; ++i) {
      const double x = spec.x(i);
      const double ft = x + y / lambda;
      double val;
      try {
        val = expr::eval_at(boundary, ft);
      } catch (const EvalError&) {
        continue;
      }
      if (y > 0.0) {
        const int n = 2 * std::max(1, static_cast<int>(std::ceil(y / h - 1e-9)));
        const double ds = y / n;
        g.assign(n + 1, 0.0);
        bool ok = true;
        for (int k = 0; k <= n; ++k) {
          const double s = k * ds;
          const double qx = ft + (s / y) * (x - ft);
          const auto sv = source(qx, s);
          if (!sv) {
            ok = false;
            break;
          }
          g[k] = *sv;
        }
        if (!ok) continue;
        double simpson = g[0] + g[n];
        for (int k = 1; k < n; k += 2) simpson += 4.0 * g[k];
        for (int k = 2; k < n; k += 2) simpson += 2.0 * g[k];
        val -= (simpson * ds / 3.0) / lambda;
      }
      if (!std::isfinite(val)) continue;
      out.values(i, j) = val;
      out.valid(i, j) = true;
    }
  }
  return out;
}

struct WorkingGrids {
  GridSpec inner;   // inflated computational grid
  GridSpec outer;   // public grid over the bounding box of the region
  int margin = 0;   // inner-to-outer x offset in cells
};

WorkingGrids make_grids(const DeterminacyTriangle& region, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing h must be positive");
  double max_inv = 0.0;
  for (double r : region.roots) max_inv = std::max(max_inv, 1.0 / std::fabs(r));
  // halo wide enough that every characteristic path feeding the masked
  // interior (through three cascade stages) stays on valid nodes
  const int margin = static_cast<int>(std::ceil(8.0 + 4.0 * max_inv));

  const double a = region.base.a, b = region.base.b;
  const double height = region.apex.y();
  const int nxc = static_cast<int>(std::ceil((b - a) / h - 1e-9)) + 1;
  const int nyc = static_cast<int>(std::ceil(height / h - 1e-9)) + 1;

  WorkingGrids wg;
  wg.margin = margin;
  wg.inner.origin = Eigen::Vector2d(a - margin * h, 0.0);
  wg.inner.h = h;
  wg.inner.nx = nxc + 2 * margin;
  wg.inner.ny = nyc + 3;
  wg.outer.origin = Eigen::Vector2d(a, 0.0);
  wg.outer.h = h;
  wg.outer.nx = nxc;
  wg.outer.ny = nyc;
  return wg;
}

/// Crops the last stage to the public grid, classifies the mask and enforces
/// validity on the masked interior.
SolutionGrid finalize(const StageField& stage, const WorkingGrids& wg,
                      const DeterminacyTriangle& region) {
  SolutionGrid out;
  out.spec = wg.outer;
  out.values = Eigen::ArrayXXd::Zero(wg.outer.nx, wg.outer.ny);
  out.mask = Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(wg.outer.nx,
                                                                              wg.outer.ny);
  const double h = wg.outer.h;
  int interior = 0;
  for (int j = 0; j < wg.outer.ny; ++j) {
    for (int i = 0; i < wg.outer.nx; ++i) {
      const Eigen::Vector2d p(wg.outer.x(i), wg.outer.y(j));
      NodeMask m = NodeMask::Outside;
      if (region.classify(p) != Location::Outside) {
        m = region.lateral_distance(p) >= 2.0 * h ? NodeMask::Interior
                                                  : NodeMask::BoundaryLayer;
      }
      const int ii = i + wg.margin;
      const bool valid = stage.valid(ii, j);
      if (m == NodeMask::Interior) {
        ++interior;
        if (!valid) {
          std::ostringstream os;
          os << "source undefined on a masked-interior node at (" << p.x() << "," << p.y()
             << ")";
          throw SolverError(SolverFailure::SourceUndefined, os.str());
        }
      }
      out.mask(i, j) = static_cast<std::uint8_t>(m);
      out.values(i, j) = valid ? stage.values(ii, j) : 0.0;
    }
  }
  if (interior == 0)
    throw SolverError(SolverFailure::EmptyRegion,
                      "no masked-interior nodes: grid too coarse for the region");
  return out;
}

SolutionGrid run_single_stage(double lambda, const Sampler& source,
                              const Expression& boundary, const DeterminacyTriangle& region,
                              double h) {
  const WorkingGrids wg = make_grids(region, h);
  StageField stage = transport_stage(lambda, source, boundary, wg.inner);
  return finalize(stage, wg, region);
}

}  // namespace

CauchyData data_from_solution(const Expression& u_star) {
  using namespace expr;
  const Expression zero = constant(0.0);
  const Expression d1 = derivative(u_star, Var::X2);
  const Expression d2 = derivative(d1, Var::X2);
  const Expression d3 = derivative(d2, Var::X2);
  CauchyData d;
  d.phi = substitute(u_star, Var::X2, zero);
  d.psi = neg(substitute(d1, Var::X2, zero));
  d.sigma = substitute(d2, Var::X2, zero);
  d.chi = neg(substitute(d3, Var::X2, zero));
  return d;
}

expr::Expression suffix_boundary(const CauchyData& data, const std::vector<double>& suffix) {
  using namespace expr;
  const int ns = static_cast<int>(suffix.size());
  // elementary symmetric polynomials of the suffix roots
  std::vector<double> e(ns + 1, 0.0);
  e[0] = 1.0;
  for (int i = 0; i < ns; ++i)
    for (int k = std::min(i + 1, ns); k >= 1; --k) e[k] += suffix[i] * e[k - 1];

  const std::array<Expression, 4> mu = {data.phi, neg(data.psi), data.sigma, neg(data.chi)};
  Expression total = constant(0.0);
  for (int k = 0; k <= ns; ++k) {
    const double coeff = (k % 2 == 0 ? 1.0 : -1.0) * e[k];
    if (coeff == 0.0) continue;
    total = add(total, mul(constant(coeff), derivative(mu[k], Var::X1, ns - k)));
  }
  return total;
}

double SolutionGrid::interpolate(double x1, double x2) const {
  const double u = (x1 - spec.origin.x()) / spec.h;
  const double v = (x2 - spec.origin.y()) / spec.h;
  if (u < -1e-9 || u > spec.nx - 1 + 1e-9 || v < -1e-9 || v > spec.ny - 1 + 1e-9)
    throw SolverError(SolverFailure::SourceUndefined, "interpolate: point outside the grid");
  const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, spec.nx - 2);
  const int j0 = std::clamp(static_cast<int>(std::floor(v)), 0, spec.ny - 2);
  for (int dj = 0; dj <= 1; ++dj)
    for (int di = 0; di <= 1; ++di)
      if (mask_at(i0 + di, j0 + dj) != NodeMask::Interior)
        throw SolverError(SolverFailure::SourceUndefined,
                          "interpolate: cell is not fully interior");
  const double fx = u - i0, fy = v - j0;
  return values(i0, j0) * (1.0 - fx) * (1.0 - fy) + values(i0 + 1, j0) * fx * (1.0 - fy) +
         values(i0, j0 + 1) * (1.0 - fx) * fy + values(i0 + 1, j0 + 1) * fx * fy;
}

SolutionGrid transport_solve(double lambda, const Expression& source,
                             const Expression& boundary, const DeterminacyTriangle& region,
                             double h) {
  if (std::fabs(lambda) < 1e-9)
    throw GeometryError(GeometryFailure::ZeroRoot, "transport_solve: zero root");
  return run_single_stage(lambda, expression_sampler(source), boundary, region, h);
}

SolutionGrid transport_solve(double lambda, const SolutionGrid& source,
                             const Expression& boundary, const DeterminacyTriangle& region,
                             double h) {
  if (std::fabs(lambda) < 1e-9)
    throw GeometryError(GeometryFailure::ZeroRoot, "transport_solve: zero root");
  Sampler s = [&source](double x, double y) -> std::optional<double> {
    const double u = (x - source.spec.origin.x()) / source.spec.h;
    const double v = (y - source.spec.origin.y()) / source.spec.h;
    if (u < -1e-9 || u > source.spec.nx - 1 + 1e-9 || v < -1e-9 ||
        v > source.spec.ny - 1 + 1e-9)
      return std::nullopt;
    const int i0 = std::clamp(static_cast<int>(std::floor(u)), 0, source.spec.nx - 2);
    const int j0 = std::clamp(static_cast<int>(std::floor(v)), 0, source.spec.ny - 2);
    for (int dj = 0; dj <= 1; ++dj)
      for (int di = 0; di <= 1; ++di)
        if (source.mask_at(i0 + di, j0 + dj) == NodeMask::Outside) return std::nullopt;
    const double fx = u - i0, fy = v - j0;
    return source.values(i0, j0) * (1.0 - fx) * (1.0 - fy) +
           source.values(i0 + 1, j0) * fx * (1.0 - fy) +
           source.values(i0, j0 + 1) * (1.0 - fx) * fy +
           source.values(i0 + 1, j0 + 1) * fx * fy;
  };
  return run_single_stage(lambda, s, boundary, region, h);
}

SolutionGrid cascade_solve(const ProblemInstance& inst, const std::array<int, 4>& stage_order) {
  {
    std::array<int, 4> check = stage_order;
    std::sort(check.begin(), check.end());
    if (check != std::array<int, 4>{0, 1, 2, 3})
      throw std::invalid_argument("cascade_solve: stage_order must permute {0,1,2,3}");
  }
  const DeterminacyTriangle region = determinacy_region(inst.symbol, inst.gamma0);
  const WorkingGrids wg = make_grids(region, inst.h);

  std::array<double, 4> lam{};
  for (int s = 0; s < 4; ++s) lam[s] = inst.symbol.roots[stage_order[s]];

  // stage boundary data: suffix products of the remaining factors
  std::array<Expression, 4> boundaries;
  for (int s = 0; s < 4; ++s) {
    std::vector<double> suffix(lam.begin() + s + 1, lam.end());
    boundaries[s] = suffix_boundary(inst.data, suffix);
  }

  const Expression f_scaled = expr::mul(expr::constant(1.0 / inst.symbol.coeffs.a0), inst.f);

  StageField prev;
  for (int s = 0; s < 4; ++s) {
    Sampler src = (s == 0) ? expression_sampler(f_scaled) : stage_sampler(prev);
    prev = transport_stage(lam[s], src, boundaries[s], wg.inner);
  }
  return finalize(prev, wg, region);
}

FdResidualReport fd_residual(const HyperbolicSymbol& sym, const SolutionGrid& u,
                             const expr::Expression& f) {
  static const double c4[5] = {1.0, -4.0, 6.0, -4.0, 1.0};
  static const double c3[5] = {-0.5, 1.0, 0.0, -1.0, 0.5};
  static const double c2[3] = {1.0, -2.0, 1.0};
  static const double c1[3] = {-0.5, 0.0, 0.5};

  const auto& spec = u.spec;
  const double h4 = spec.h * spec.h * spec.h * spec.h;
  FdResidualReport rep;

  auto deep_interior = [&](int i, int j) {
    if (i < 2 || j < 2 || i > spec.nx - 3 || j > spec.ny - 3) return false;
    for (int dj = -2; dj <= 2; ++dj)
      for (int di = -2; di <= 2; ++di)
        if (u.mask_at(i + di, j + dj) != NodeMask::Interior) return false;
    return true;
  };

  for (int j = 2; j < spec.ny - 2; ++j) {
    for (int i = 2; i < spec.nx - 2; ++i) {
      if (!deep_interior(i, j)) continue;
      double s40 = 0.0, s04 = 0.0, s31 = 0.0, s13 = 0.0, s22 = 0.0;
      for (int k = -2; k <= 2; ++k) {
        s40 += c4[k + 2] * u.values(i + k, j);
        s04 += c4[k + 2] * u.values(i, j + k);
        double row1 = 0.0;  // d/dx2, 3-point stencil
        for (int l = -1; l <= 1; ++l) row1 += c1[l + 1] * u.values(i + k, j + l);
        s31 += c3[k + 2] * row1;
      }
      for (int k = -1; k <= 1; ++k) {
        double row3 = 0.0;  // d^3/dx2^3, 5-point stencil
        for (int l = -2; l <= 2; ++l) row3 += c3[l + 2] * u.values(i + k, j + l);
        s13 += c1[k + 1] * row3;
        double row2 = 0.0;
        for (int l = -1; l <= 1; ++l) row2 += c2[l + 1] * u.values(i + k, j + l);
        s22 += c2[k + 1] * row2;
      }

      const double lu = (sym.coeffs.a0 * s40 + sym.coeffs.a1 * s31 + sym.coeffs.a2 * s22 +
                         sym.coeffs.a3 * s13 + sym.coeffs.a4 * s04) /
                        h4;
      const double fv = expr::eval_at(f, spec.x(i), spec.y(j));
      const double r = std::fabs(lu - fv);
      ++rep.nodes;
      if (r > rep.max_abs) {
        rep.max_abs = r;
        rep.where = Eigen::Vector2d(spec.x(i), spec.y(j));
      }
    }
  }
  if (rep.nodes == 0)
    throw SolverError(SolverFailure::GridTooCoarse,
                      "fd_residual: no deep-interior nodes (grid too coarse)");
  return rep;
}

}  // namespace charpent
