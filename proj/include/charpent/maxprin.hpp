#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "charpent/solver.hpp"
#include "charpent/traces.hpp"

namespace charpent {

/// Sampled minima for the hypotheses Lu = f <= 0 on the region and
/// L(0)u..L(3)u >= 0 on Gamma0; a condition passes when its minimum is
/// >= -check_tol.
struct HypothesisReport {
  double check_tol = 1e-10;
  double f_neg_min = 0.0;  // min of (-f) over region samples
  Eigen::Vector2d f_worst{0.0, 0.0};
  bool f_pass = true;
  std::array<double, 4> trace_min{};
  std::array<double, 4> trace_worst_x{};
  std::array<bool, 4> trace_pass{};

  bool all_pass() const {
    if (!f_pass) return false;
    for (bool b : trace_pass)
      if (!b) return false;
    return true;
  }
};

HypothesisReport check_hypotheses(const ProblemInstance& inst, int n_samples = 41,
                                  double check_tol = 1e-10);

/// Max of the solved grid over masked-interior nodes versus conclusion_tol.
struct Verdict {
  double max_u = 0.0;
  Eigen::Vector2d argmax{0.0, 0.0};
  double tol = 1e-6;
  bool pass = false;
  std::vector<Eigen::Vector2d> violations;  // first few offending nodes
};

Verdict verify_conclusion(const ProblemInstance& inst, double conclusion_tol = 1e-6);

struct GeneratorOptions {
  double h = 0.01;
  int max_draws = 500;
  /// The manufactured solution must stay below -negativity_margin on the
  /// closed region so that discretization error cannot flip the verdict.
  double negativity_margin = 5e-3;
};

/// A Ker-L instance: u* = -sum_j c_j exp(theta_j (x2 + lambda_j x1)), f = 0,
/// with data induced from u* and the Eq.-(8)-style trace signs verified.
struct GeneratedInstance {
  ProblemInstance instance;
  expr::Expression u_star;
  HypothesisReport report;
  std::uint64_t seed = 0;
  double a0 = 1.0;
  std::array<double, 4> roots{};
  std::array<double, 4> c{};
  std::array<double, 4> theta{};
  int draws_used = 0;
  bool fallback_used = false;
};

/// Deterministic given the seed. Throws InfeasibleError after exhausting
/// max_draws and the single-mode fallback family.
GeneratedInstance generate_instance(std::uint64_t seed, const GeneratorOptions& opts = {});

struct BatchOptions {
  double conclusion_tol = 1e-6;
  int threads = 0;  // 0 = hardware concurrency
  GeneratorOptions generator;
  /// Called for every conclusion failure (e.g. to dump a config file).
  std::function<void(const GeneratedInstance&, const Verdict&)> on_failure;
};

struct BatchSummary {
  int n = 0;
  std::uint64_t seed0 = 0;
  double h = 0.0;
  int generated = 0;
  int infeasible = 0;
  int hypothesis_pass = 0;
  int conclusion_pass = 0;
  double worst_max_u = 0.0;  // algebraic max over instances
  std::uint64_t worst_seed = 0;
  std::vector<std::uint64_t> failed_seeds;
  std::vector<std::uint64_t> infeasible_seeds;
};

/// Runs generate_instance(seed0 + i) and verify_conclusion for i < n.
/// Deterministic given (n, seed0, h); instances may run on worker threads but
/// the reduction is ordered by instance index.
BatchSummary batch_verify(int n, std::uint64_t seed0, double h, const BatchOptions& opts = {});

}  // namespace charpent
