#include "charpent/config.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

namespace charpent {

namespace {

using nlohmann::ordered_json;

void require_keys(const ordered_json& obj, const std::string& where,
                  const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("config: unknown key '" + key + "' in " + where);
  }
}

double get_number(const ordered_json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError("config: missing key '" + key + "' in " + where);
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError("config: key '" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
  require_keys(j, "top level",
               {"coefficients", "gamma0", "point_c", "data", "f", "grid", "tolerances",
                "seed", "disk_demo", "batch"});

  RunConfig cfg;
  if (j.contains("coefficients")) {
    const auto& c = j.at("coefficients");
    if (!c.is_array() || c.size() != 5)
      throw ConfigError("config: 'coefficients' must be an array of 5 numbers");
    std::array<double, 5> a{};
    for (int i = 0; i < 5; ++i) a[i] = c.at(i).get<double>();
    cfg.coefficients = a;
  }
  if (j.contains("gamma0")) {
    const auto& g = j.at("gamma0");
    require_keys(g, "'gamma0'", {"a", "b"});
    cfg.gamma0 = Gamma0Config{get_number(g, "a", "'gamma0'"), get_number(g, "b", "'gamma0'")};
  }
  if (j.contains("point_c")) {
    const auto& c = j.at("point_c");
    if (!c.is_array() || c.size() != 2)
      throw ConfigError("config: 'point_c' must be an array [x1, x2]");
    cfg.point_c = std::array<double, 2>{c.at(0).get<double>(), c.at(1).get<double>()};
  }
  if (j.contains("data")) {
    const auto& d = j.at("data");
    require_keys(d, "'data'", {"phi", "psi", "sigma", "chi"});
    DataConfig dc;
    dc.phi = d.value("phi", "0");
    dc.psi = d.value("psi", "0");
    dc.sigma = d.value("sigma", "0");
    dc.chi = d.value("chi", "0");
    cfg.data = dc;
  }
  if (j.contains("f")) {
    if (!j.at("f").is_string()) throw ConfigError("config: 'f' must be an expression string");
    cfg.f = j.at("f").get<std::string>();
  }
  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    require_keys(g, "'grid'", {"h", "quad_order"});
    if (g.contains("h")) cfg.grid.h = g.at("h").get<double>();
    if (g.contains("quad_order")) cfg.grid.quad_order = g.at("quad_order").get<int>();
  }
  if (j.contains("tolerances")) {
    const auto& t = j.at("tolerances");
    require_keys(t, "'tolerances'", {"check_tol", "conclusion_tol"});
    if (t.contains("check_tol")) cfg.tolerances.check_tol = t.at("check_tol").get<double>();
    if (t.contains("conclusion_tol"))
      cfg.tolerances.conclusion_tol = t.at("conclusion_tol").get<double>();
  }
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("disk_demo")) {
    const auto& d = j.at("disk_demo");
    require_keys(d, "'disk_demo'", {"p", "radii"});
    DiskDemoConfig dd;
    dd.p = get_number(d, "p", "'disk_demo'");
    if (d.contains("radii")) {
      if (!d.at("radii").is_array())
        throw ConfigError("config: 'disk_demo.radii' must be an array");
      for (const auto& r : d.at("radii")) dd.radii.push_back(r.get<double>());
    }
    cfg.disk_demo = dd;
  }
  if (j.contains("batch")) {
    const auto& b = j.at("batch");
    require_keys(b, "'batch'", {"n"});
    BatchConfig bc;
    if (b.contains("n")) bc.n = b.at("n").get<int>();
    if (bc.n < 1) throw ConfigError("config: 'batch.n' must be >= 1");
    cfg.batch = bc;
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_json_text(const RunConfig& cfg) {
  ordered_json j;
  if (cfg.coefficients) j["coefficients"] = *cfg.coefficients;
  if (cfg.gamma0) j["gamma0"] = {{"a", cfg.gamma0->a}, {"b", cfg.gamma0->b}};
  if (cfg.point_c) j["point_c"] = *cfg.point_c;
  if (cfg.data)
    j["data"] = {{"phi", cfg.data->phi},
                 {"psi", cfg.data->psi},
                 {"sigma", cfg.data->sigma},
                 {"chi", cfg.data->chi}};
  if (cfg.f) j["f"] = *cfg.f;
  j["grid"] = {{"h", cfg.grid.h}, {"quad_order", cfg.grid.quad_order}};
  j["tolerances"] = {{"check_tol", cfg.tolerances.check_tol},
                     {"conclusion_tol", cfg.tolerances.conclusion_tol}};
  j["seed"] = cfg.seed;
  if (cfg.disk_demo) {
    j["disk_demo"] = {{"p", cfg.disk_demo->p}};
    if (!cfg.disk_demo->radii.empty()) j["disk_demo"]["radii"] = cfg.disk_demo->radii;
  }
  if (cfg.batch) j["batch"] = {{"n", cfg.batch->n}};
  return j.dump(2) + "\n";
}

RunConfig config_from_instance(const GeneratedInstance& gen, double conclusion_tol) {
  RunConfig cfg;
  const auto& c = gen.instance.symbol.coeffs;
  cfg.coefficients = std::array<double, 5>{c.a0, c.a1, c.a2, c.a3, c.a4};
  cfg.gamma0 = Gamma0Config{gen.instance.gamma0.a, gen.instance.gamma0.b};
  DataConfig dc;
  dc.phi = expr::to_string(gen.instance.data.phi);
  dc.psi = expr::to_string(gen.instance.data.psi);
  dc.sigma = expr::to_string(gen.instance.data.sigma);
  dc.chi = expr::to_string(gen.instance.data.chi);
  cfg.data = dc;
  cfg.f = expr::to_string(gen.instance.f);
  cfg.grid.h = gen.instance.h;
  cfg.grid.quad_order = gen.instance.quad_order;
  cfg.tolerances.conclusion_tol = conclusion_tol;
  cfg.seed = gen.seed;
  return cfg;
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

std::string format_g17(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_solution_csv(const std::filesystem::path& path, const SolutionGrid& grid) {
  std::string out = "x1,x2,u,mask\n";
  for (int j = 0; j < grid.spec.ny; ++j) {
    for (int i = 0; i < grid.spec.nx; ++i) {
      out += format_g17(grid.spec.x(i));
      out += ',';
      out += format_g17(grid.spec.y(j));
      out += ',';
      out += format_g17(grid.values(i, j));
      out += ',';
      out += std::to_string(static_cast<int>(grid.mask(i, j)));
      out += '\n';
    }
  }
  write_text_atomic(path, out);
}

void write_wave_disk_csv(const std::filesystem::path& path, const WaveDiskResult& result) {
  std::string out = "r,I,N,panels\n";
  for (const auto& row : result.rows) {
    out += format_g17(row.r);
    out += ',';
    out += format_g17(row.I);
    out += ',';
    out += format_g17(row.N);
    out += ',';
    out += std::to_string(row.panels);
    out += '\n';
  }
  write_text_atomic(path, out);
}

}  // namespace charpent
