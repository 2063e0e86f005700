#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "charpent/expr.hpp"
#include "charpent/geometry.hpp"
#include "charpent/solver.hpp"
#include "charpent/symbol.hpp"

namespace charpent {

/// The four boundary functionals L(0)u..L(3)u on Gamma0 as expressions in x1.
struct TraceSet {
  std::array<expr::Expression, 4> traces;
};

/// Constant-coefficient flat-boundary specialization on Gamma0 (nu = (0,-1)):
///   L(3-i)u = - sum_{p=i+1}^{4} a_p d^{4-p}/dx1^{4-p} mu_{p-1-i},
/// mu = (phi, -psi, sigma, -chi). In particular L(0)u = -a4 phi = -L(nu) phi.
TraceSet gamma0_traces(const HyperbolicSymbol& sym, const CauchyData& data);

/// Applies the full operator symbolically: sum_p a_p d^4 e / dx1^{4-p} dx2^p.
expr::Expression apply_operator(const SymbolCoefficients& coeffs, const expr::Expression& e);

/// Directional transport factor <grad, a^j> e = d e/dx1 - lambda d e/dx2.
expr::Expression transport_factor(double lambda, const expr::Expression& e);

/// Bilinear flux F(u,v) with div F = Lu v - u Lv, assembled per symbol term
/// by telescoping the factor list; first = x1 component, second = x2.
std::pair<expr::Expression, expr::Expression> bilinear_flux(const SymbolCoefficients& coeffs,
                                                            const expr::Expression& u,
                                                            const expr::Expression& v);

struct GreenResult {
  double side_a = 0.0;  // area integral
  double side_b = 0.0;  // boundary integral
  double residual = 0.0;
};

/// | integral_poly (Lu v - u Lv) - boundary integral of F . nu | with the
/// polygon/edge quadratures of the given order (L+ = L here).
GreenResult green_flux_residual(const HyperbolicSymbol& sym, const expr::Expression& u,
                                const expr::Expression& v,
                                const std::vector<Eigen::Vector2d>& polygon, int order);

/// Test function v = ((x1-lo)(hi-x1))^5 (height - x2)^5 * w supported in a
/// strip over (a+eps, b-eps) inside the pentagon; vanishes to order 5 at
/// every boundary except the open Gamma0 window.
struct StripBump {
  expr::Expression v;
  double x_lo = 0.0, x_hi = 0.0, height = 0.0;
};

StripBump make_strip_bump(const PentagonDomain& pent, double eps,
                          const expr::Expression& w = expr::constant(1.0));

/// Residual of the Gamma0 pairing form of the Green identity,
///   (Lu*,v) - (u*,Lv) = sum_j int_{Gamma0} L(3-j)u d^j v/dnu^j ds,
/// with v the strip bump; traces taken from `data` (which must be the data of
/// u*). Internally uses quadrature exact for the polynomial bump.
/// `override_traces` substitutes a custom trace set (fault-injection hook).
GreenResult gamma0_identity_residual(const HyperbolicSymbol& sym, const CauchyData& data,
                                     const expr::Expression& u_star, const StripBump& bump,
                                     const TraceSet* override_traces = nullptr);

/// Tilde traces on the pentagon edges:
///   ~L(0)u = <nu,a4> u,            ~L(1)u = <nu,a3> P4 u,
///   ~L(2)u = <nu,a2> P3 P4 u,      ~L(3)u = <nu,a1> P2 P3 P4 u,
/// sampled at uniform points of every edge. On the edge assigned root j the
/// factor <nu,a^j> vanishes, which is the proof's cancellation mechanism.
struct TildeTraceSamples {
  struct Edge {
    int edge_index = 0;
    int root_index = 0;  // 0 on Gamma0
    std::vector<Eigen::Vector2d> points;
    std::array<std::vector<double>, 4> values;
  };
  std::vector<Edge> edges;
};

TildeTraceSamples tilde_traces(const HyperbolicSymbol& sym, const expr::Expression& u_star,
                               const PentagonDomain& pent, int samples_per_edge = 9);

/// Residual of the kernel form of the boundary identity with
/// v = hprofile(x2 + lambda_j x1) in Ker L+:
///   int_Omega Lu* v dx = a0 [ oint ~L(3)u v - oint ~L(2)u P1 v
///                             + oint ~L(1)u P2 P1 v - oint ~L(0)u P3 P2 P1 v ].
/// `hprofile` is an expression in x1 used as the 1-D profile variable.
GreenResult kernel_identity_residual(const HyperbolicSymbol& sym,
                                     const expr::Expression& u_star, int root_index,
                                     const expr::Expression& hprofile,
                                     const PentagonDomain& pent, int order);

// ---------------------------------------------------------------------------
// Wave-in-disk demonstration: u = (1 - x1^2)^p solves u_{x1 x2} = 0 in the
// unit disk; its ring integrals I(r) blow up as r -> 1 for p < -1/2 while the
// L(0)-trace -x1 x2 u stays square integrable for p > -3/4.

struct WaveDiskRow {
  double r = 0.0;
  double I = 0.0;  // ring integral of u
  double N = 0.0;  // ring integral of |L(0)u|^2
  int panels = 0;  // Simpson panels needed at relative 1e-8
};

struct WaveDiskResult {
  std::vector<WaveDiskRow> rows;
  double slope = 0.0;       // least-squares slope of log I vs log(1-r^2)
  double intercept = 0.0;
  double tail_slope = 0.0;  // pairwise slope of the last two radii
  bool trace_blowup = false;
  std::vector<double> shells;  // L2 mass in the rings [1-10^-j, 1-10^-(j+1)]
  double shell_ratio = 0.0;    // last/previous shell
  bool l2_member = false;
};

/// Requires p < 0 and radii in (0,1) (at least two).
WaveDiskResult wave_disk_demo(double p, const std::vector<double>& radii);

}  // namespace charpent
