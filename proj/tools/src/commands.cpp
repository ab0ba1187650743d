// SPDX-License-Identifier: Apache-2.0
#include "commands.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "jumpcd/errors.hpp"
#include "jumpcd/harnack.hpp"
#include "jumpcd/inequality.hpp"
#include "jumpcd/upsilon.hpp"
#include "output.hpp"

namespace jumpcd::cli {
namespace {

// JSON has no infinities; non-finite values are written as strings.
json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::optional<Kernel> optional_kernel(const json& cfg) {
  if (!cfg.contains("kernel")) return std::nullopt;
  return kernel_from_json(cfg["kernel"]);
}

std::string support_name(SupportKind s) {
  switch (s) {
    case SupportKind::finite: return "finite";
    case SupportKind::all_nonzero: return "all_nonzero";
    case SupportKind::pattern: return "pattern";
  }
  return "unknown";
}

json lattice_json(const LatticeFunction& u) {
  json vals = json::array();
  for (double v : u.values()) vals.push_back(num(v));
  return {{"window", u.window()}, {"exterior", num(u.exterior())}, {"values", vals}};
}

json margin_json(const MarginReport& r) {
  json s = json::object();
  for (const auto& [k, v] : r.settings) s[k] = num(v);
  json j = {{"inequality", r.inequality},
            {"pass", r.pass()},
            {"worst_margin", num(r.worst_margin)},
            {"worst_relative", num(r.worst_relative)},
            {"witness", r.witness},
            {"witness_t", num(r.witness_t)},
            {"witness_x", r.witness_x},
            {"evaluated", r.evaluated},
            {"negative", r.negative},
            {"tolerance", num(r.tolerance)},
            {"settings", s}};
  if (r.witness_function) j["witness_function"] = lattice_json(*r.witness_function);
  return j;
}

// Initial datum on [-W, W]: indicator, delta plus constant, or explicit centred values.
LatticeFunction initial_datum(const json& j, std::int64_t W) {
  if (!j.is_object()) throw UsageError("initial datum must be a JSON object");
  auto site = [&](const char* key) {
    const std::int64_t x0 = j.value(key, std::int64_t{0});
    if (x0 < -W || x0 > W) throw UsageError("initial site outside the window");
    return x0;
  };
  std::vector<double> v(static_cast<std::size_t>(2 * W + 1), 0.0);
  const std::string type = j.value("type", std::string(j.contains("values") ? "values" : ""));
  if (type == "indicator") {
    v[static_cast<std::size_t>(site("x0") + W)] = 1.0;
    return LatticeFunction(W, v, 0.0);
  }
  if (type == "delta_plus_constant") {
    const double c = j.value("constant", 1.0);
    std::fill(v.begin(), v.end(), c);
    v[static_cast<std::size_t>(site("x0") + W)] += j.value("height", 1.0);
    return LatticeFunction(W, v, c);
  }
  if (type == "values") {
    if (!j.contains("values") || !j["values"].is_array()) throw UsageError("'values' must be an array");
    const auto given = j["values"].get<std::vector<double>>();
    if (given.size() % 2 == 0 || given.size() > v.size()) {
      throw UsageError("'values' needs an odd length of at most 2W + 1 (centred on 0)");
    }
    const double ext = j.value("exterior", 0.0);
    std::fill(v.begin(), v.end(), ext);
    const std::size_t off = (v.size() - given.size()) / 2;
    std::copy(given.begin(), given.end(), v.begin() + static_cast<std::ptrdiff_t>(off));
    return LatticeFunction(W, v, ext);
  }
  throw UsageError("initial datum type must be indicator, delta_plus_constant or values");
}

std::vector<double> checked_times(const std::vector<double>& t) {
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || !std::isfinite(t[i]) || (i && !(t[i] > t[i - 1]))) {
      throw UsageError("times must be positive, finite and increasing");
    }
  }
  return t;
}

std::int64_t checked_window(const json& cfg) {
  const std::int64_t W = get_integer(cfg, "window");
  if (W < 1 || W > 1024) throw UsageError("window must lie in [1, 1024]");
  return W;
}

Outcome kernel_info(const json& cfg) {
  const Kernel k = kernel_from_json(cfg["kernel"]);
  const std::int64_t R = get_integer(cfg, "radius");
  const double tol = get_number(cfg, "tol");
  if (R < 2) throw UsageError("radius must be >= 2");
  if (!(tol > 0.0)) throw UsageError("tol must be > 0");

  json aggregates = json::object();
  for (Selector s : {Selector::l1, Selector::entropy_M, Selector::log_condition_sum}) {
    json a = {{"converges", k.converges(s, 0.0)}};
    if (k.converges(s, 0.0)) {
      const Aggregate g = k.aggregate(s, 0.0, tol);
      a["value"] = num(g.value);
      a["error"] = num(g.error);
      a["radius"] = g.radius;
      a["note"] = g.note;
    }
    aggregates[to_string(s)] = a;
  }
  const ConditionReport c = kernel_conditions(k, R);
  json records = json::array();
  for (const auto& [j, r] : c.growth_records) records.push_back({j, num(r)});
  const Support sup = k.support();

  Outcome o;
  o.result = {{"label", k.label()},
              {"family", to_string(k.family())},
              {"support", {{"kind", support_name(sup.kind)}, {"radius", sup.radius}}},
              {"aggregates", aggregates},
              {"tail_bound_at_radius", num(k.tail_bound(R))},
              {"conditions",
               {{"radius", c.radius},
                {"non_increasing", c.non_increasing},
                {"first_increase", c.first_increase},
                {"growth_constant", num(c.growth_constant)},
                {"growth_argmax", c.growth_argmax},
                {"growth_records", records},
                {"log_condition_converges", c.log_condition_converges},
                {"monotone_evidence", to_string(c.monotone_tag)},
                {"growth_evidence", to_string(c.growth_tag)},
                {"series_evidence", to_string(c.series_tag)}}}};
  CsvTable t({"j", "rate"});
  for (std::int64_t j = 1; j <= R; ++j) t.row({static_cast<double>(j), k(j)});
  o.csv = t.str();
  return o;
}

Outcome cd_table(const json& cfg) {
  const std::optional<Kernel> k = optional_kernel(cfg);
  const CDFunction F = cd_from_json(cfg["cd"], k);
  const LagrangeG* G = F.lagrange_g();
  json rows = json::array();
  CsvTable t(G ? std::vector<std::string>{"a", "F", "multiplier"}
               : std::vector<std::string>{"a", "F"});
  for (double a : get_numbers(cfg, "a")) {
    if (!(a >= 0.0) || !std::isfinite(a)) throw UsageError("arguments must be finite and >= 0");
    const double v = F(a);
    json r = {{"a", a}, {"F", num(v)}};
    if (G) {
      const double lam = a > 0.0 ? G->rho_inverse(a) : 0.0;
      r["multiplier"] = num(lam);
      t.row({a, v, lam});
    } else {
      t.row({a, v});
    }
    rows.push_back(r);
  }
  Outcome o;
  o.result = {{"function", F.label()}, {"values", rows}};
  o.csv = t.str();
  return o;
}

Outcome relaxation_table(const json& cfg) {
  const std::optional<Kernel> k = optional_kernel(cfg);
  const RelaxationFunction phi = relaxation(cd_from_json(cfg["cd"], k));
  std::vector<double> times;
  if (cfg.contains("times")) {
    times = checked_times(get_numbers(cfg, "times"));
  } else {
    const double lo = get_number(cfg, "t_min"), hi = get_number(cfg, "t_max");
    const std::int64_t n = get_integer(cfg, "points");
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
      throw UsageError("need 0 < t_min < t_max and points >= 2");
    }
    for (std::int64_t i = 0; i < n; ++i) {
      times.push_back(std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0)));
    }
    times.front() = lo;
    times.back() = hi;
  }
  CsvTable t({"t", "phi"});
  for (double s : times) t.row({s, phi(s)});
  Outcome o;
  o.result = {{"function", phi.function().label()},
              {"integrable_at_zero", phi.integrable_at_zero()},
              {"points", times.size()}};
  o.result["t_star"] = phi.t_star() ? num(*phi.t_star()) : json(nullptr);
  o.csv = t.str();
  return o;
}

Outcome heat_solve(const json& cfg) {
  const Kernel k = kernel_from_json(cfg["kernel"]);
  const std::int64_t W = checked_window(cfg);
  const GeneratorMode mode = mode_from_json(cfg);
  const std::vector<double> times = checked_times(get_numbers(cfg, "times"));
  const json& init = cfg["initial"];
  const GeneratorMatrix G = build_generator(k, W, mode);
  HeatSolution sol;
  if (init.value("type", std::string()) == "indicator") {
    sol = heat_kernel(G, init.value("x0", std::int64_t{0}), times);
  } else {
    const LatticeFunction u0 = initial_datum(init, W);
    if (mode == GeneratorMode::conservative && u0.exterior() != 0.0) {
      throw UsageError("conservative mode needs a zero exterior");
    }
    sol = solve_heat(G, u0.values(), times, u0.exterior());
  }
  json snaps = json::array();
  for (std::size_t i = 0; i < sol.times.size(); ++i) {
    snaps.push_back({{"t", sol.times[i]},
                     {"window_mass", num(sol.values[i].sum())},
                     {"min", num(sol.values[i].minCoeff())},
                     {"max", num(sol.values[i].maxCoeff())}});
  }
  Outcome o;
  o.result = {{"kernel", sol.kernel_label}, {"mode", to_string(sol.mode)}, {"window", sol.W},
              {"initial", sol.initial_record}, {"exterior", num(sol.exterior)},
              {"snapshots", snaps}};
  std::ostringstream os;
  sol.write_csv(os);
  o.csv = os.str();
  return o;
}

Outcome liyau_check(const json& cfg) {
  const Kernel k = kernel_from_json(cfg["kernel"]);
  const std::int64_t W = checked_window(cfg);
  const GeneratorMode mode = mode_from_json(cfg);
  const std::vector<double> times = checked_times(get_numbers(cfg, "times"));
  const CDFunction F = cd_from_json(cfg["cd"], k);
  const LatticeFunction u0 = initial_datum(cfg["initial"], W);
  for (double v : u0.values()) {
    if (!(v > 0.0)) throw UsageError("initial data must be positive on the window");
  }
  if (mode == GeneratorMode::killed && !(u0.exterior() > 0.0)) {
    throw UsageError("killed mode needs a positive exterior value");
  }
  std::int64_t interior = get_integer(cfg, "interior");
  if (interior == 0) interior = W / 4;
  if (interior < 0 || interior > W) throw UsageError("interior must lie in [0, W]");
  const double tol = get_number(cfg, "tolerance");

  const LiYauCertificate c = certify_liyau(k, F, u0, W, mode, times, interior, tol);
  const bool violated = !c.base.summary.pass() || !c.doubled.summary.pass();
  Outcome o;
  o.result = {{"verdict", c.certified ? "pass" : (violated ? "violated" : "inconclusive")},
              {"certified", c.certified},
              {"doubling_shift", num(c.doubling_shift)},
              {"base", margin_json(c.base.summary)},
              {"doubled", margin_json(c.doubled.summary)}};
  CsvTable t({"t", "x", "phi", "minus_Lv", "dt_v", "psi", "margin1", "margin2"});
  for (const LiYauPoint& p : c.base.points) {
    t.row({p.t, static_cast<double>(p.x), p.phi, p.minus_Lv, p.dt_v, p.psi, p.margin1,
           p.margin2});
  }
  o.csv = t.str();
  if (violated) {
    o.exit = kViolation;
    o.message = "Li-Yau inequality violated: " + c.base.summary.witness;
  } else if (!c.certified) {
    o.exit = kUsage;
    o.message = "window doubling moved a margin by " + fmt17(c.doubling_shift) +
                ", above the tolerance; enlarge the window";
  }
  return o;
}

Outcome cd_search(const json& cfg) {
  const Kernel k = kernel_from_json(cfg["kernel"]);
  const std::int64_t W = checked_window(cfg);
  const std::int64_t budget = get_integer(cfg, "budget");
  const std::int64_t seed = get_integer(cfg, "seed");
  if (budget < 1) throw UsageError("budget must be >= 1");
  if (seed < 0) throw UsageError("seed must be >= 0");
  const CDFunction F = cd_from_json(cfg["cd"], k);
  const MarginReport r = cd_adversarial(k, F, W, static_cast<std::size_t>(budget),
                                        static_cast<std::uint64_t>(seed),
                                        get_number(cfg, "tolerance"));
  Outcome o;
  o.result = margin_json(r);
  o.result["function"] = F.label();
  if (r.witness_function) {
    CsvTable t({"x", "u"});
    const LatticeFunction& u = *r.witness_function;
    for (std::int64_t x = -u.window(); x <= u.window(); ++x) t.row({static_cast<double>(x), u(x)});
    o.csv = t.str();
  }
  if (!r.pass()) {
    o.exit = kViolation;
    o.message = "CD inequality violated: " + r.witness;
  }
  return o;
}

Outcome harnack_opt(const json& cfg) {
  const Kernel k = kernel_from_json(cfg["kernel"]);
  const std::int64_t x1 = get_integer(cfg, "from"), x2 = get_integer(cfg, "to");
  const std::int64_t ext = get_integer(cfg, "window_ext"), n_max = get_integer(cfg, "n_max");
  if (ext < 0 || n_max < 0) throw UsageError("window_ext and n_max must be >= 0");
  const HarnackPath p =
      optimize_path(k, x1, x2, ext, n_max > 0 ? std::optional<std::int64_t>(n_max) : std::nullopt);
  Outcome o;
  o.result = {{"kernel", k.label()}, {"path", p.points}, {"steps", p.steps()}, {"S", num(p.S)}};
  json rates = json::array();
  for (double r : p.rates) rates.push_back(num(r));
  o.result["rates"] = rates;
  try {
    const RegimeVerdict v = step_regime(k, std::max<std::int64_t>(std::llabs(x2 - x1), 2));
    o.result["regime"] = {{"regime", to_string(v.regime)}, {"e_min", num(v.e_min)},
                          {"e_max", num(v.e_max)}, {"method", v.method}};
  } catch (const Refusal& e) {
    o.result["regime"] = {{"regime", nullptr}, {"refused", e.what()}};
  }
  CsvTable t({"step", "from", "to", "rate"});
  for (std::size_t i = 0; i < p.steps(); ++i) {
    t.row({static_cast<double>(i + 1), static_cast<double>(p.points[i]),
           static_cast<double>(p.points[i + 1]), p.rates[i]});
  }
  o.csv = t.str();
  return o;
}

Outcome heat_bounds_cmd(const json& cfg) {
  HeatBoundParams p;
  p.c = get_number(cfg, "c");
  p.gamma = get_number(cfg, "gamma");
  p.delta = get_number(cfg, "delta");
  p.nu = cfg.contains("nu") ? get_number(cfg, "nu") : nu_constant(p.gamma);
  const std::optional<Kernel> k = optional_kernel(cfg);
  if (cfg.contains("k1")) p.k1 = get_number(cfg, "k1");
  else if (k) p.k1 = (*k)(1);
  else throw UsageError("heat-bounds needs k1 or a kernel");
  if (cfg.contains("l1")) p.l1 = get_number(cfg, "l1");
  else if (k) p.l1 = k->l1();
  else throw UsageError("heat-bounds needs l1 or a kernel");

  json rows = json::array();
  CsvTable t({"t", "distance", "lower", "upper", "upper_l1_variant", "Lambda", "c_t_nu"});
  const double nan = std::nan("");
  for (double s : checked_times(get_numbers(cfg, "times"))) {
    for (double d : get_numbers(cfg, "distances")) {
      if (std::floor(d) != d) throw UsageError("distances must be integers");
      const HeatBounds b = heat_bounds(s, p, static_cast<std::int64_t>(d));
      json r = {{"t", s}, {"distance", d}, {"lower", num(b.lower)}, {"Lambda", num(b.Lambda)},
                {"Lambda_quadrature", num(b.Lambda_quadrature)}, {"t_star", num(b.t_star)},
                {"c_t_nu", num(b.c_t_nu)}, {"C0", num(b.C0)}, {"note", b.note}};
      r["upper"] = b.upper ? num(*b.upper) : json(nullptr);
      r["upper_l1_variant"] = b.upper_l1_variant ? num(*b.upper_l1_variant) : json(nullptr);
      rows.push_back(r);
      t.row({s, d, b.lower, b.upper.value_or(nan), b.upper_l1_variant.value_or(nan), b.Lambda,
             b.c_t_nu});
    }
  }
  Outcome o;
  o.result = {{"params",
               {{"c", p.c}, {"gamma", p.gamma}, {"delta", p.delta}, {"nu", num(p.nu)},
                {"k1", num(p.k1)}, {"l1", num(p.l1)}}},
              {"bounds", rows}};
  o.csv = t.str();
  return o;
}

}  // namespace

Outcome run_command(const json& cfg) {
  static const std::map<std::string, std::function<Outcome(const json&)>> handlers = {
      {"kernel-info", kernel_info},   {"cd-table", cd_table},
      {"relaxation-table", relaxation_table}, {"heat-solve", heat_solve},
      {"liyau-check", liyau_check},   {"cd-search", cd_search},
      {"harnack-opt", harnack_opt},   {"heat-bounds", heat_bounds_cmd}};
  const auto it = handlers.find(get_text(cfg, "command"));
  if (it == handlers.end()) throw UsageError("unknown command");
  return it->second(cfg);
}

}  // namespace jumpcd::cli
