#include "lanemden/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "lanemden/analysis.hpp"
#include "lanemden/greens.hpp"
#include "lanemden/io.hpp"
#include "lanemden/solvers.hpp"

namespace lanemden::harness {

namespace fs = std::filesystem;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"green", "poisson", "solve", "eigen",
                                                 "sweep", "bootstrap", "classify"};
  return names;
}

namespace {

json q_defaults() { return {{"form", "power_law"}, {"c", 1.0}, {"alpha", 0.0}, {"radius", 5.0}}; }

json grid_defaults(double start, double stop, double step) {
  return {{"start", start}, {"stop", stop}, {"step", step}};
}

void merge_strict(json& base, const json& raw, const std::string& path) {
  if (!raw.is_object()) throw ConfigError(path.empty() ? "config must be an object" : "'" + path + "' must be an object");
  for (auto it = raw.begin(); it != raw.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    const json& v = it.value();
    if (slot.is_null()) {
      slot = v;
    } else if (slot.is_object()) {
      merge_strict(slot, v, key);
    } else if (slot.is_number()) {
      if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
      if (slot.is_number_integer() && !v.is_number_integer()) {
        throw ConfigError("config key '" + key + "' must be an integer");
      }
      slot = v;
    } else if (slot.is_string()) {
      if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
      slot = v;
    } else if (slot.is_boolean()) {
      if (!v.is_boolean()) throw ConfigError("config key '" + key + "' must be a boolean");
      slot = v;
    } else if (slot.is_array()) {
      if (!v.is_array()) throw ConfigError("config key '" + key + "' must be an array");
      slot = v;
    }
  }
}

DomainKind kind_of(const json& v) {
  try {
    return parse_domain_kind(v.at("kind").get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("kind: ") + e.what());
  }
}

LatticePoint default_pole(DomainKind kind, int d) {
  auto p = LatticePoint::origin(d);
  if (kind != DomainKind::Whole) p[0] = 1;
  if (kind == DomainKind::Quadrant) p[1] = 1;
  return p;
}

LatticePoint pole_of(const json& v, const char* key, DomainKind kind, int d) {
  const json& j = v.at(key);
  if (j.is_null()) return default_pole(kind, d);
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw ConfigError(std::string("config key '") + key + "' must be an array of d integers");
  }
  for (const auto& c : j) {
    if (!c.is_number_integer()) throw ConfigError(std::string("config key '") + key + "' must hold integers");
  }
  return io::point_from_json(j);
}

void validate(const RunConfig& cfg) {
  const json& v = cfg.values;
  if (v.contains("kind")) kind_of(v);
  if (v.contains("d")) {
    const int d = v["d"].get<int>();
    if (d < 2 || d > kMaxDim) throw ConfigError("config key 'd' must lie in [2, 4]");
  }
  for (const char* key : {"R", "tol"}) {
    if (v.contains(key) && !(v[key].get<double>() > 0)) throw ConfigError(std::string("config key '") + key + "' must be positive");
  }
  if (v.contains("Q")) {
    const auto form = v["Q"]["form"].get<std::string>();
    if (form != "power_law" && form != "compact") throw ConfigError("Q.form must be 'power_law' or 'compact'");
  }
  if (v.contains("source")) {
    const auto type = v["source"]["type"].get<std::string>();
    if (type != "delta" && type != "power" && type != "log") {
      throw ConfigError("source.type must be 'delta', 'power' or 'log'");
    }
  }
  for (const char* key : {"alpha", "p"}) {
    if (cfg.command == "sweep" && !(v[key]["step"].get<double>() > 0)) {
      throw ConfigError(std::string("config key '") + key + ".step' must be positive");
    }
  }
}

ProblemSpec spec_of(const json& v) {
  ProblemSpec s;
  s.kind = kind_of(v);
  s.d = v.at("d").get<int>();
  s.p = v.at("p").get<double>();
  const json& q = v.at("Q");
  if (q.at("form").get<std::string>() == "compact") {
    s.Q = PotentialSpec::compact(q.at("radius").get<double>(), q.at("c").get<double>());
  } else {
    s.Q = PotentialSpec::power_law(q.at("c").get<double>(), q.at("alpha").get<double>());
  }
  return s;
}

json spec_json(const ProblemSpec& s, const json& q) {
  return {{"kind", std::string(to_string(s.kind))}, {"d", s.d}, {"p", s.p}, {"Q", q}};
}

json fit_json(const std::optional<DecayFit>& f) {
  if (!f) return nullptr;
  return {{"exponent", f->exponent},
          {"log_power", f->log_power ? json(*f->log_power) : json(nullptr)},
          {"residual", f->residual},
          {"samples", f->samples}};
}

json history_json(const std::vector<IterationRecord>& h) {
  json a = json::array();
  for (const auto& r : h) a.push_back({r.norm, r.value});
  return a;
}

fs::path out_dir(const RunConfig& cfg) { return fs::path(cfg.values.at("output_dir").get<std::string>()); }

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<Rational> grid(const json& g, const char* name) {
  const auto start = Rational::from_double(g.at("start").get<double>());
  const auto stop = Rational::from_double(g.at("stop").get<double>());
  const auto step = Rational::from_double(g.at("step").get<double>());
  std::vector<Rational> out;
  for (Rational x = start; x <= stop; x = x + step) {
    out.push_back(x);
    if (out.size() > 1'000'000) throw ConfigError(std::string("grid '") + name + "' too large");
  }
  return out;
}

}  // namespace

json defaults(const std::string& command) {
  json common = {{"output_dir", "out"}, {"seed", 0}};
  json d;
  if (command == "green") {
    d = {{"kind", "whole"}, {"d", 3}, {"R", 40.0}, {"tol", 1e-10}, {"pole", nullptr}};
  } else if (command == "poisson") {
    d = {{"kind", "whole"},
         {"d", 3},
         {"R", 20.0},
         {"tol", 1e-10},
         {"source", {{"type", "delta"}, {"pole", nullptr}, {"exponent", -2.5}, {"sigma", 1.0}}}};
  } else if (command == "solve") {
    d = {{"kind", "whole"}, {"d", 3},        {"R", 20.0},           {"tol", 1e-8},
         {"p", 2.0},        {"Q", q_defaults()}, {"residual_tol", 1e-6}, {"exploratory", false}};
  } else if (command == "eigen") {
    d = {{"kind", "whole"}, {"d", 3}, {"R", 20.0}, {"tol", 1e-8}, {"Q", q_defaults()}};
  } else if (command == "sweep") {
    d = {{"kind", "whole"},
         {"d", 3},
         {"alpha", grid_defaults(0.0, 4.0, 0.05)},
         {"p", grid_defaults(1.05, 8.0, 0.05)},
         {"weight_vanishes", false},
         {"spot", json::array()},
         {"R", 20.0},
         {"tol", 1e-8}};
  } else if (command == "bootstrap") {
    d = {{"kind", "whole"}, {"d", 3}, {"alpha", 0.0}, {"q", 0.5}, {"max_steps", 100}};
  } else if (command == "classify") {
    d = {{"kind", "whole"}, {"d", 3}, {"alpha", 0.0}, {"p", 2.0}, {"weight_vanishes", false}};
  } else {
    throw ConfigError("unknown command '" + command + "'");
  }
  d.update(common);
  return d;
}

RunConfig parse_config(const std::string& command, const json& raw) {
  RunConfig cfg{command, defaults(command)};
  try {
    merge_strict(cfg.values, raw.is_null() ? json::object() : raw, "");
    validate(cfg);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

void write_json_artifact(const fs::path& path, json payload, const RunConfig& cfg) {
  payload["config"] = {{"command", cfg.command}, {"values", cfg.values}};
  payload.erase("content_sha256");
  payload["content_sha256"] = io::sha256_hex(payload.dump());
  io::write_text_file(path, payload.dump(2) + "\n");
}

void write_csv_artifact(const fs::path& path, const std::string& csv, const RunConfig& cfg, json extra) {
  io::write_text_file(path, csv);
  extra["sha256"] = io::sha256_hex(csv);
  extra["config"] = {{"command", cfg.command}, {"values", cfg.values}};
  auto side = path;
  side += ".json";
  io::write_text_file(side, extra.dump(2) + "\n");
}

// ---------------------------------------------------------------- commands

CommandResult cmd_green(const RunConfig& cfg) {
  const auto& v = cfg.values;
  const auto kind = kind_of(v);
  const int d = v.at("d").get<int>();
  const double R = v.at("R").get<double>();
  const double tol = v.at("tol").get<double>();
  const auto pole = pole_of(v, "pole", kind, d);
  GreenTable table = kind == DomainKind::Whole ? *cached_whole_green(d, pole, R, tol)
                                               : image_green(kind, d, pole, R, tol);
  CommandResult res;
  const auto dir = out_dir(cfg);
  const auto csv_path = dir / "green.csv";
  const auto csv = io::field_csv(table.values);
  write_csv_artifact(csv_path, csv, cfg, io::table_metadata(table, io::sha256_hex(csv), nullptr));
  res.files.push_back(csv_path);

  json bounds;
  try {
    std::optional<Cone> cone;
    if (kind == DomainKind::Half) cone = Cone::A0;
    if (kind == DomainKind::Quadrant) cone = Cone::A1;
    const auto b = kernel_bound_report(table, cone);
    bounds = {{"min_ratio", b.min_ratio}, {"max_ratio", b.max_ratio}, {"samples", b.samples},
              {"rmin", b.rmin}, {"rmax", b.rmax}, {"cone", cone ? json(std::string(to_string(*cone))) : json(nullptr)}};
  } catch (const std::invalid_argument& e) {
    bounds = {{"error", e.what()}};
  }
  const auto bpath = dir / "green_bounds.json";
  write_json_artifact(bpath, {{"bounds", bounds}, {"max_residual", table.max_residual}}, cfg);
  res.files.push_back(bpath);
  res.checks_passed = table.max_residual <= 10 * tol;
  res.summary = {{"rows", table.values.domain().interior_count() + table.values.domain().boundary_count()},
                 {"max_residual", table.max_residual},
                 {"bounds", bounds}};
  return res;
}

CommandResult cmd_poisson(const RunConfig& cfg) {
  const auto& v = cfg.values;
  const auto kind = kind_of(v);
  const int d = v.at("d").get<int>();
  const double R = v.at("R").get<double>();
  const double tol = v.at("tol").get<double>();
  const auto dom = TruncatedDomain::make(kind, d, R);
  const json& src = v.at("source");
  const auto type = src.at("type").get<std::string>();
  LatticeField f(dom);
  if (type == "delta") {
    f = delta_field(dom, pole_of(src, "pole", kind, d));
  } else if (type == "power") {
    const double e = src.at("exponent").get<double>();
    f = sample_field<double>(dom, [&](const LatticePoint& x) { return std::pow(1.0 + x.norm(), e); });
  } else {
    const double sigma = src.at("sigma").get<double>();
    f = sample_field<double>(dom, [&](const LatticePoint& x) {
      const double r = x.norm();
      return std::pow(1.0 + r, -d) * std::pow(std::log(std::exp(1.0) + r * r), sigma - 1);
    });
  }
  auto sol = solve_poisson(f, tol);
  sol.decay_fit = [&]() -> std::optional<DecayFit> {
    try {
      return decay_fit(sol.u, R / 8, std::max(R / 4, R / 8 + 5));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }();
  CommandResult res;
  const auto dir = out_dir(cfg);
  write_csv_artifact(dir / "poisson.csv", io::field_csv(sol.u), cfg);
  json rec = {{"spec", {{"kind", std::string(to_string(kind))}, {"d", d}, {"source", src}}},
              {"R", R},
              {"tol", tol},
              {"iterations", sol.iterations},
              {"residual", sol.residual},
              {"monotone", sol.monotone},
              {"history", history_json(sol.history)},
              {"decay_fit", fit_json(sol.decay_fit)}};
  write_json_artifact(dir / "poisson.json", rec, cfg);
  res.files = {dir / "poisson.csv", dir / "poisson.json"};
  res.summary = rec;
  return res;
}

CommandResult cmd_solve(const RunConfig& cfg) {
  const auto& v = cfg.values;
  const auto spec = spec_of(v);
  spec.validate();
  const double R = v.at("R").get<double>();
  const double tol = v.at("tol").get<double>();
  const bool exploratory = v.at("exploratory").get<bool>();
  const double alpha = spec.Q.decay_exponent();
  const auto cls = classify(spec.kind, spec.d, alpha, spec.p, {.weight_vanishes = spec.Q.vanishes_faster_than(alpha)});
  CommandResult res;
  const auto dir = out_dir(cfg);
  json rec = {{"spec", spec_json(spec, v.at("Q"))},
              {"R", R},
              {"tol", tol},
              {"verdict", std::string(to_string(cls.verdict))},
              {"citation", cls.citation}};

  enum class Path { Monotone, Eigen, Ground, Reject } path = Path::Reject;
  std::string why;
  switch (cls.verdict) {
    case Verdict::ExistsSublinearUnique: path = Path::Monotone; break;
    case Verdict::LinearEigenRegime: path = Path::Eigen; break;
    case Verdict::ExistsVariational: path = Path::Ground; break;
    default:
      if (spec.p == 2.0) {
        why = "hypothesis 2*_{beta,alpha} < 2 (or = 2 with vanishing weight) fails: " + cls.citation;
      } else {
        why = "no solver regime applies: " + std::string(to_string(cls.verdict)) + " (" + cls.citation + ")";
      }
      if (exploratory) path = spec.p < 2 ? Path::Monotone : (spec.p == 2.0 ? Path::Eigen : Path::Ground);
  }
  if (path == Path::Reject) {
    rec["rejected"] = why;
    write_json_artifact(dir / "solve.json", rec, cfg);
    res.files = {dir / "solve.json"};
    res.checks_passed = false;
    res.summary = rec;
    return res;
  }
  rec["exploratory"] = !why.empty();

  if (path == Path::Eigen) {
    const auto e = eigen_solve(spec, R, tol);
    rec["path"] = "eigen_solve";
    rec["iterations"] = e.iterations;
    rec["residual"] = e.residual;
    rec["monotone"] = false;
    rec["lambda1"] = e.lambda1;
    rec["history"] = e.rayleigh_history;
    rec["decay_fit"] = nullptr;
    write_csv_artifact(dir / "solve.csv", io::field_csv(e.v1), cfg);
    res.checks_passed = e.residual <= tol;
  } else {
    SolveResult s;
    if (path == Path::Monotone) {
      s = monotone_solve(spec, R, tol);
      rec["path"] = "monotone_solve";
      rec["seed_scale"] = *s.seed_scale;
      rec["supersolution_scale"] = *s.supersolution_scale;
      res.checks_passed = s.monotone && s.residual <= 2 * tol;
    } else {
      GroundStateOptions opt;
      opt.step_tol = tol;
      s = ground_state_solve(spec, R, v.at("residual_tol").get<double>(), opt);
      rec["path"] = "ground_state_solve";
      rec["level"] = *s.level;
      rec["nehari_multiplier"] = *s.nehari_multiplier;
      rec["recovered_residual"] = *s.recovered_residual;
      res.checks_passed = *s.level > 0;
    }
    rec["iterations"] = s.iterations;
    rec["residual"] = s.residual;
    rec["monotone"] = s.monotone;
    rec["history"] = history_json(s.history);
    rec["decay_fit"] = fit_json(s.decay_fit);
    write_csv_artifact(dir / "solve.csv", io::field_csv(s.u), cfg);
  }
  write_json_artifact(dir / "solve.json", rec, cfg);
  res.files = {dir / "solve.csv", dir / "solve.json"};
  res.summary = rec;
  return res;
}

CommandResult cmd_eigen(const RunConfig& cfg) {
  const auto& v = cfg.values;
  json with_p = v;
  with_p["p"] = 2.0;
  const auto spec = spec_of(with_p);
  const double R = v.at("R").get<double>();
  const double tol = v.at("tol").get<double>();
  const auto e = eigen_solve(spec, R, tol);
  CommandResult res;
  const auto dir = out_dir(cfg);
  json rec = {{"spec", spec_json(spec, v.at("Q"))}, {"R", R}, {"tol", tol},
              {"lambda1", e.lambda1}, {"iterations", e.iterations}, {"residual", e.residual},
              {"rayleigh_history", e.rayleigh_history}, {"regime_ok", e.regime_ok},
              {"regime_note", e.regime_note}};
  write_csv_artifact(dir / "eigen.csv", io::field_csv(e.v1), cfg);
  write_json_artifact(dir / "eigen.json", rec, cfg);
  res.files = {dir / "eigen.csv", dir / "eigen.json"};
  res.checks_passed = e.residual <= tol;
  res.summary = rec;
  return res;
}

CommandResult cmd_sweep(const RunConfig& cfg) {
  const auto& v = cfg.values;
  const auto kind = kind_of(v);
  const int d = v.at("d").get<int>();
  const WeightTraits traits{.weight_vanishes = v.at("weight_vanishes").get<bool>()};
  const auto alphas = grid(v.at("alpha"), "alpha");
  const auto ps = grid(v.at("p"), "p");
  const auto n = static_cast<std::int64_t>(alphas.size() * ps.size());
  std::vector<std::string> rows(static_cast<std::size_t>(n));
  // Cells are independent; each writes its own slot and the merge below
  // follows grid order, so the output does not depend on scheduling.
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < n; ++c) {
    const auto& a = alphas[static_cast<std::size_t>(c) / ps.size()];
    const auto& p = ps[static_cast<std::size_t>(c) % ps.size()];
    const auto cl = classify_exact(kind, d, a, p, traits);
    rows[static_cast<std::size_t>(c)] =
        fmt(a.to_double()) + "," + fmt(p.to_double()) + "," + std::string(to_string(cl.verdict)) + "," + cl.citation + "\n";
  }
  std::string csv = "alpha,p,verdict,citation\n";
  for (const auto& r : rows) csv += r;
  CommandResult res;
  const auto dir = out_dir(cfg);
  write_csv_artifact(dir / "sweep.csv", csv, cfg, {{"rows", n}});
  res.files.push_back(dir / "sweep.csv");

  const json& spot = v.at("spot");
  if (!spot.empty()) {
    json results = json::array();
    for (const auto& cell : spot) {
      if (!cell.is_array() || cell.size() != 2) throw ConfigError("spot entries must be [alpha, p] pairs");
      json sub = {{"kind", v["kind"]}, {"d", d}, {"R", v["R"]}, {"tol", v["tol"]}, {"p", cell[1]},
                  {"Q", {{"form", "power_law"}, {"c", 1.0}, {"alpha", cell[0]}, {"radius", 5.0}}},
                  {"output_dir", (dir / ("spot_" + fmt(cell[0].get<double>()) + "_" + fmt(cell[1].get<double>()))).string()}};
      const auto r = cmd_solve(parse_config("solve", sub));
      results.push_back(r.summary);
      res.checks_passed = res.checks_passed && r.checks_passed;
    }
    write_json_artifact(dir / "sweep_spots.json", {{"spots", results}}, cfg);
    res.files.push_back(dir / "sweep_spots.json");
  }
  res.summary = {{"rows", n}};
  return res;
}

CommandResult cmd_bootstrap(const RunConfig& cfg) {
  const auto& v = cfg.values;
  const auto t = bootstrap(kind_of(v), v.at("d").get<int>(), v.at("alpha").get<double>(), v.at("q").get<double>(),
                           v.at("max_steps").get<int>());
  json rec = {{"tau", t.tau},
              {"j0", t.j0 ? json(*t.j0) : json(nullptr)},
              {"verdict", std::string(to_string(t.verdict))},
              {"limit", t.limit ? json(*t.limit) : json(nullptr)},
              {"message", t.message}};
  CommandResult res;
  const auto path = out_dir(cfg) / "bootstrap.json";
  write_json_artifact(path, rec, cfg);
  res.files = {path};
  res.checks_passed = t.verdict != BootstrapVerdict::InvalidRegime;
  res.summary = rec;
  return res;
}

CommandResult cmd_classify(const RunConfig& cfg) {
  const auto& v = cfg.values;
  const auto kind = kind_of(v);
  const int d = v.at("d").get<int>();
  const double alpha = v.at("alpha").get<double>();
  const double p = v.at("p").get<double>();
  const auto cl = classify(kind, d, alpha, p, {.weight_vanishes = v.at("weight_vanishes").get<bool>()});
  json rec = {{"verdict", std::string(to_string(cl.verdict))}, {"citation", cl.citation}};
  if (d >= 3 || kind != DomainKind::Whole) {
    const auto e = exponents(kind, d, alpha);
    rec["serrin"] = e.serrin;
    rec["sobolev"] = e.sobolev;
  }
  CommandResult res;
  const auto path = out_dir(cfg) / "classify.json";
  write_json_artifact(path, rec, cfg);
  res.files = {path};
  res.summary = rec;
  return res;
}

CommandResult run(const RunConfig& cfg) {
  if (cfg.command == "green") return cmd_green(cfg);
  if (cfg.command == "poisson") return cmd_poisson(cfg);
  if (cfg.command == "solve") return cmd_solve(cfg);
  if (cfg.command == "eigen") return cmd_eigen(cfg);
  if (cfg.command == "sweep") return cmd_sweep(cfg);
  if (cfg.command == "bootstrap") return cmd_bootstrap(cfg);
  if (cfg.command == "classify") return cmd_classify(cfg);
  throw ConfigError("unknown command '" + cfg.command + "'");
}

}  // namespace lanemden::harness
