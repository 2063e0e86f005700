// charpent: verification laboratory for the Cauchy problem of fourth-order
// hyperbolic operators in the plane. Subcommands: classify, solve, green,
// maxprin, maxprin-batch, wave-disk.

#include <CLI11.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "charpent/config.hpp"
#include "charpent/errors.hpp"
#include "charpent/expr.hpp"
#include "charpent/maxprin.hpp"
#include "charpent/solver.hpp"
#include "charpent/traces.hpp"

namespace {

using namespace charpent;
using nlohmann::ordered_json;

struct CommonArgs {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> h;
};

RunConfig load_with_overrides(const CommonArgs& args) {
  RunConfig cfg = load_config(args.config_path);
  if (args.seed) cfg.seed = *args.seed;
  if (args.h) cfg.grid.h = *args.h;
  return cfg;
}

expr::Expression parse_config_expr(const std::string& text, const std::string& what) {
  try {
    return expr::parse(text);
  } catch (const ParseError& e) {
    throw ConfigError("config: cannot parse " + what + ": " + e.what());
  }
}

const std::array<double, 5>& require_coefficients(const RunConfig& cfg) {
  if (!cfg.coefficients) throw ConfigError("config: 'coefficients' section is required");
  return *cfg.coefficients;
}

Gamma0 require_gamma0(const RunConfig& cfg) {
  if (!cfg.gamma0) throw ConfigError("config: 'gamma0' section is required");
  try {
    return Gamma0(cfg.gamma0->a, cfg.gamma0->b);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

HyperbolicSymbol symbol_from(const RunConfig& cfg) {
  const auto& a = require_coefficients(cfg);
  return build_symbol(SymbolCoefficients{a[0], a[1], a[2], a[3], a[4]});
}

ProblemInstance instance_from_config(const RunConfig& cfg) {
  ProblemInstance inst;
  inst.symbol = symbol_from(cfg);
  inst.gamma0 = require_gamma0(cfg);
  if (!cfg.data) throw ConfigError("config: 'data' section is required");
  inst.data.phi = parse_config_expr(cfg.data->phi, "data.phi");
  inst.data.psi = parse_config_expr(cfg.data->psi, "data.psi");
  inst.data.sigma = parse_config_expr(cfg.data->sigma, "data.sigma");
  inst.data.chi = parse_config_expr(cfg.data->chi, "data.chi");
  if (!cfg.f) throw ConfigError("config: 'f' is required");
  inst.f = parse_config_expr(*cfg.f, "f");
  if (!(cfg.grid.h > 0.0)) throw ConfigError("config: grid.h must be positive");
  inst.h = cfg.grid.h;
  inst.quad_order = cfg.grid.quad_order;
  return inst;
}

int require_quad_order(const RunConfig& cfg) {
  const int o = cfg.grid.quad_order;
  if (o != 3 && o != 5 && o != 7)
    throw ConfigError("config: grid.quad_order must be 3, 5 or 7");
  return o;
}

// ---------------------------------------------------------------------------

int cmd_classify(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const HyperbolicSymbol sym = symbol_from(cfg);
  std::cout << "hyperbolic: yes\nroots:";
  for (double r : sym.roots) std::cout << ' ' << format_g17(r);
  std::cout << "\n";
  for (const auto& d : sym.directions) {
    std::cout << "j=" << d.index << " lambda=" << format_g17(d.root)
              << " slope=" << format_g17(d.slope) << " angle=" << format_g17(d.angle)
              << " tangent=(" << format_g17(d.tangent.x()) << "," << format_g17(d.tangent.y())
              << ") normal=(" << format_g17(d.normal.x()) << "," << format_g17(d.normal.y())
              << ")\n";
  }
  std::cout << "L(nu) on Gamma0 = " << format_g17(eval_symbol(sym, {0.0, -1.0})) << "\n";
  return 0;
}

int cmd_solve(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const ProblemInstance inst = instance_from_config(cfg);
  const SolutionGrid grid = cascade_solve(inst);
  const std::filesystem::path out =
      args.out_path.empty() ? std::filesystem::path("solution.csv")
                             : std::filesystem::path(args.out_path);
  write_solution_csv(out, grid);
  std::cout << "grid: " << grid.spec.nx << " x " << grid.spec.ny << " nodes, h = "
            << format_g17(grid.spec.h) << "\nwrote " << out.string() << "\n";
  try {
    const FdResidualReport rep = fd_residual(inst.symbol, grid, inst.f);
    std::cout << "fd residual: max |L_h u - f| = " << format_g17(rep.max_abs) << " at ("
              << format_g17(rep.where.x()) << "," << format_g17(rep.where.y()) << ") over "
              << rep.nodes << " deep-interior nodes\n";
  } catch (const SolverError&) {
    std::cout << "fd residual: n/a (grid too coarse for the 5x5 stencil)\n";
  }
  return 0;
}

int cmd_green(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const HyperbolicSymbol sym = symbol_from(cfg);
  const Gamma0 g = require_gamma0(cfg);
  if (!cfg.point_c) throw ConfigError("config: 'point_c' is required for green");
  const int order = require_quad_order(cfg);
  const PentagonDomain pent =
      build_pentagon(sym, g, Eigen::Vector2d((*cfg.point_c)[0], (*cfg.point_c)[1]));

  const expr::Expression u_poly = expr::parse("x1^4");
  const expr::Expression v_poly = expr::parse("x2");
  const expr::Expression u_trig = expr::parse("sin(x1 + 2*x2)");
  const expr::Expression v_trig = expr::parse("exp(x1 - x2)");

  const GreenResult flux_poly = green_flux_residual(sym, u_poly, v_poly, pent.vertex_list(), order);
  const GreenResult flux_trig = green_flux_residual(sym, u_trig, v_trig, pent.vertex_list(), order);

  const CauchyData data = data_from_solution(u_poly);
  const StripBump bump = make_strip_bump(pent, 0.1 * (g.b - g.a));
  const char* fault = std::getenv("CHARPENT_FAULT");
  const bool faulted = fault && std::string(fault) == "trace-coeff";
  TraceSet traces;
  if (faulted) {
    // corrupt the L(nu) coefficient inside the trace formulas only
    HyperbolicSymbol bad = sym;
    bad.coeffs.a4 *= 1.01;
    traces = gamma0_traces(bad, data);
  } else {
    traces = gamma0_traces(sym, data);
  }
  const GreenResult g0 = gamma0_identity_residual(sym, data, u_poly, bump, &traces);

  const GreenResult kernel =
      kernel_identity_residual(sym, u_poly, 1, expr::constant(1.0), pent, order);

  const double tol_poly = 1e-10, tol_trig = 1e-6, tol_g0 = 1e-8, tol_kernel = 1e-8;
  auto entry = [](const GreenResult& r, double tol, int ord) {
    return ordered_json{{"side_a", r.side_a},
                        {"side_b", r.side_b},
                        {"residual", r.residual},
                        {"order", ord},
                        {"tolerance", tol},
                        {"pass", r.residual <= tol}};
  };
  ordered_json rep;
  rep["flux_poly"] = entry(flux_poly, tol_poly, order);
  rep["flux_trig"] = entry(flux_trig, tol_trig, order);
  rep["gamma0_form"] = entry(g0, tol_g0, order);
  rep["kernel"] = entry(kernel, tol_kernel, order);
  if (faulted) rep["fault"] = "trace-coeff";

  const std::string text = rep.dump(2) + "\n";
  if (!args.out_path.empty())
    write_text_atomic(args.out_path, text);
  else
    std::cout << text;

  const bool ok = flux_poly.residual <= tol_poly && flux_trig.residual <= tol_trig &&
                  g0.residual <= tol_g0 && kernel.residual <= tol_kernel;
  if (!ok) std::cerr << "green: identity residual above tolerance\n";
  return ok ? 0 : 4;
}

ordered_json report_json(const HypothesisReport& rep) {
  return ordered_json{
      {"check_tol", rep.check_tol},
      {"f_neg_min", rep.f_neg_min},
      {"f_worst", {rep.f_worst.x(), rep.f_worst.y()}},
      {"f_pass", rep.f_pass},
      {"trace_min", rep.trace_min},
      {"trace_worst_x", rep.trace_worst_x},
      {"trace_pass", rep.trace_pass},
      {"all_pass", rep.all_pass()}};
}

ordered_json verdict_json(const Verdict& v) {
  ordered_json violations = ordered_json::array();
  for (const auto& p : v.violations) violations.push_back({p.x(), p.y()});
  return ordered_json{{"max_u", v.max_u},
                      {"argmax", {v.argmax.x(), v.argmax.y()}},
                      {"tolerance", v.tol},
                      {"pass", v.pass},
                      {"violations", violations}};
}

int cmd_maxprin(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const ProblemInstance inst = instance_from_config(cfg);
  const HypothesisReport rep = check_hypotheses(inst, 41, cfg.tolerances.check_tol);
  const Verdict verdict = verify_conclusion(inst, cfg.tolerances.conclusion_tol);

  ordered_json out;
  out["hypotheses"] = report_json(rep);
  out["verdict"] = verdict_json(verdict);
  const std::string text = out.dump(2) + "\n";
  if (!args.out_path.empty())
    write_text_atomic(args.out_path, text);
  else
    std::cout << text;

  if (!rep.all_pass()) std::cerr << "maxprin: hypothesis (7)/(8) check failed\n";
  if (!verdict.pass) std::cerr << "maxprin: conclusion u <= 0 violated\n";
  return (rep.all_pass() && verdict.pass) ? 0 : 4;
}

int cmd_maxprin_batch(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  const int n = cfg.batch ? cfg.batch->n : 100;
  const std::filesystem::path out =
      args.out_path.empty() ? std::filesystem::path("maxprin_summary.json")
                             : std::filesystem::path(args.out_path);
  const std::filesystem::path dump_dir =
      out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");

  BatchOptions opts;
  opts.conclusion_tol = cfg.tolerances.conclusion_tol;
  if (const char* env = std::getenv("CHARPENT_THREADS")) opts.threads = std::atoi(env);
  std::vector<std::string> dumped;
  opts.on_failure = [&](const GeneratedInstance& gen, const Verdict&) {
    const RunConfig dump = config_from_instance(gen, cfg.tolerances.conclusion_tol);
    const std::filesystem::path path =
        dump_dir / ("maxprin_fail_" + std::to_string(gen.seed) + ".json");
    write_text_atomic(path, config_to_json_text(dump));
    dumped.push_back(path.string());
  };

  const BatchSummary sum = batch_verify(n, cfg.seed, cfg.grid.h, opts);

  ordered_json j;
  j["n"] = sum.n;
  j["seed0"] = sum.seed0;
  j["h"] = sum.h;
  j["generated"] = sum.generated;
  j["infeasible"] = sum.infeasible;
  j["hypothesis_pass"] = sum.hypothesis_pass;
  j["conclusion_pass"] = sum.conclusion_pass;
  j["worst_max_u"] = sum.worst_max_u;
  j["worst_seed"] = sum.worst_seed;
  j["failed_seeds"] = sum.failed_seeds;
  j["infeasible_seeds"] = sum.infeasible_seeds;
  j["dumps"] = dumped;
  write_text_atomic(out, j.dump(2) + "\n");

  std::cout << "batch: " << sum.conclusion_pass << "/" << sum.generated
            << " conclusions pass, worst max u = " << format_g17(sum.worst_max_u)
            << " (seed " << sum.worst_seed << "), summary in " << out.string() << "\n";
  return sum.failed_seeds.empty() ? 0 : 4;
}

int cmd_wave_disk(const CommonArgs& args) {
  const RunConfig cfg = load_with_overrides(args);
  DiskDemoConfig dd = cfg.disk_demo ? *cfg.disk_demo : DiskDemoConfig{};
  if (dd.radii.empty())
    for (int k = 2; k <= 6; ++k) dd.radii.push_back(1.0 - std::pow(10.0, -k));

  WaveDiskResult res;
  try {
    res = wave_disk_demo(dd.p, dd.radii);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("wave-disk: ") + e.what());
  }

  const std::filesystem::path out =
      args.out_path.empty() ? std::filesystem::path("wave_disk.csv")
                             : std::filesystem::path(args.out_path);
  write_wave_disk_csv(out, res);

  std::cout << "p = " << format_g17(dd.p) << "\n"
            << "fit: log I = " << format_g17(res.slope) << " * log(1-r^2) + "
            << format_g17(res.intercept) << " (tail slope " << format_g17(res.tail_slope)
            << ")\n"
            << "classical trace: " << (res.trace_blowup ? "blows up as r -> 1" : "no blow-up")
            << "\n"
            << "L2(K) membership: " << (res.l2_member ? "u in L2(K)" : "u not in L2(K)")
            << " (shell ratio " << format_g17(res.shell_ratio) << ")\n"
            << "wrote " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"charpent: verification lab for fourth-order hyperbolic Cauchy problems"};
  app.require_subcommand(1);

  CommonArgs args;
  int (*handler)(const CommonArgs&) = nullptr;

  auto add = [&](const std::string& name, const std::string& desc,
                 int (*fn)(const CommonArgs&)) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", args.config_path, "JSON config file")->required();
    sub->add_option("--out", args.out_path, "output path");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&args](const std::uint64_t& s) { args.seed = s; }, "seed override");
    sub->add_option_function<double>(
        "--h", [&args](const double& h) { args.h = h; }, "grid spacing override");
    sub->callback([&handler, fn]() { handler = fn; });
    return sub;
  };

  add("classify", "classify the quartic symbol", cmd_classify);
  add("solve", "solve the Cauchy problem on the determinacy triangle", cmd_solve);
  add("green", "verify the Green-type boundary identities", cmd_green);
  add("maxprin", "check maximum-principle hypotheses and conclusion", cmd_maxprin);
  add("maxprin-batch", "batch maximum-principle verification", cmd_maxprin_batch);
  add("wave-disk", "wave-in-disk low-regularity trace demonstration", cmd_wave_disk);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    return handler(args);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  } catch (const SymbolError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
