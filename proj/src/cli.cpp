#include "rdbp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "rdbp/errors.hpp"

namespace rdbp::cli {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigurationError(fmt::format("{}: {}", path.empty() ? "<root>" : path, what));
}

std::string join(const std::string& path, std::string_view key) {
  return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

std::string indexed(const std::string& path, std::size_t i) { return fmt::format("{}[{}]", path, i); }

void expect_object(const Json& j, const std::string& path,
                   std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail(join(path, key), "unknown key");
    }
  }
}

const Json* find(const Json& obj, std::string_view key) {
  auto it = obj.find(std::string(key));
  return it == obj.end() ? nullptr : &*it;
}

const Json& require(const Json& obj, std::string_view key, const std::string& path) {
  const Json* v = find(obj, key);
  if (v == nullptr) fail(join(path, key), "missing required field");
  return *v;
}

double as_double(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "expected a finite number");
  return x;
}

std::uint64_t as_u64(const Json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) fail(path, "expected a non-negative integer");
  fail(path, "expected an integer");
}

std::string as_string(const Json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

template <class T, class Fn>
std::vector<T> as_list(const Json& v, const std::string& path, Fn&& each) {
  if (!v.is_array()) fail(path, "expected an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(each(v[i], indexed(path, i)));
  return out;
}

std::vector<double> as_doubles(const Json& v, const std::string& path) {
  return as_list<double>(v, path, as_double);
}
std::vector<std::uint64_t> as_u64s(const Json& v, const std::string& path) {
  return as_list<std::uint64_t>(v, path, as_u64);
}

std::string as_policy(const Json& v, const std::string& path) {
  auto token = as_string(v, path);
  if (!PriorityPolicy::from_token(token)) {
    fail(path, fmt::format("unknown policy '{}' (fcfs | wf | sf | coinflip | counterexample)", token));
  }
  return token;
}

std::vector<std::string> as_policies(const Json& v, const std::string& path) {
  return as_list<std::string>(v, path, as_policy);
}

Seed as_seed(const Json& v, const std::string& path) {
  if (v.is_number_unsigned()) return Seed{v.get<std::uint64_t>()};
  if (v.is_string()) {
    if (auto s = parse_seed(v.get<std::string>())) return *s;
    fail(path, "expected a decimal or 0x-hex 64-bit seed");
  }
  fail(path, "expected a seed (unsigned integer or string)");
}

// Law constructors throw DomainError; report those against the law's path.
template <class Fn>
auto build_law(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const DomainError& e) {
    fail(path, e.what());
  }
}

OffspringLaw parse_offspring(const Json& j, const std::string& path) {
  expect_object(j, path, {"kind", "params"});
  const auto kind = as_string(require(j, "kind", path), join(path, "kind"));
  const auto ppath = join(path, "params");
  const Json& params = require(j, "params", path);
  if (kind == "discrete") {
    expect_object(params, ppath, {"probabilities"});
    auto probs = as_doubles(require(params, "probabilities", ppath), join(ppath, "probabilities"));
    return build_law(path, [&] { return OffspringLaw(std::move(probs)); });
  }
  if (kind == "point_mass") {
    expect_object(params, ppath, {"k"});
    const auto k = as_u64(require(params, "k", ppath), join(ppath, "k"));
    if (k > 1'000'000) fail(join(ppath, "k"), "offspring count too large");
    return OffspringLaw::point_mass(static_cast<std::size_t>(k));
  }
  fail(join(path, "kind"), fmt::format("unknown offspring law '{}' (discrete | point_mass)", kind));
}

ClaimLaw parse_claim(const Json& j, const std::string& path) {
  expect_object(j, path, {"kind", "params"});
  const auto kind = as_string(require(j, "kind", path), join(path, "kind"));
  const auto ppath = join(path, "params");
  const Json& params = require(j, "params", path);
  const auto num = [&](std::string_view key) {
    return as_double(require(params, key, ppath), join(ppath, key));
  };
  if (kind == "uniform") {
    expect_object(params, ppath, {"d"});
    return build_law(path, [&] { return ClaimLaw::uniform(num("d")); });
  }
  if (kind == "scaled_beta") {
    expect_object(params, ppath, {"a", "b", "scale"});
    const double scale = find(params, "scale") ? num("scale") : 1.0;
    return build_law(path, [&] { return ClaimLaw::scaled_beta(num("a"), num("b"), scale); });
  }
  if (kind == "exponential") {
    expect_object(params, ppath, {"lambda"});
    return build_law(path, [&] { return ClaimLaw::exponential(num("lambda")); });
  }
  if (kind == "constant") {
    expect_object(params, ppath, {"c"});
    return build_law(path, [&] { return ClaimLaw::constant(num("c")); });
  }
  fail(join(path, "kind"),
       fmt::format("unknown claim law '{}' (uniform | scaled_beta | exponential | constant)", kind));
}

ResourceLaw parse_resource(const Json& j, const std::string& path) {
  expect_object(j, path, {"kind", "params"});
  const auto kind = as_string(require(j, "kind", path), join(path, "kind"));
  const auto ppath = join(path, "params");
  const Json& params = require(j, "params", path);
  const auto num = [&](std::string_view key) {
    return as_double(require(params, key, ppath), join(ppath, key));
  };
  if (kind == "uniform") {
    expect_object(params, ppath, {"lo", "hi"});
    return build_law(path, [&] { return ResourceLaw::uniform(num("lo"), num("hi")); });
  }
  if (kind == "constant") {
    expect_object(params, ppath, {"r"});
    return build_law(path, [&] { return ResourceLaw::constant(num("r")); });
  }
  if (kind == "scaled_beta") {
    expect_object(params, ppath, {"a", "b", "scale"});
    const double scale = find(params, "scale") ? num("scale") : 1.0;
    return build_law(path, [&] { return ResourceLaw::scaled_beta(num("a"), num("b"), scale); });
  }
  fail(join(path, "kind"),
       fmt::format("unknown resource law '{}' (uniform | constant | scaled_beta)", kind));
}

void parse_verify(const Json& j, const std::string& path, VerifyConfig& v) {
  expect_object(j, path,
                {"checks", "dominance_policies", "envelope_policies", "min_size", "slack",
                 "relative_tolerance", "l_values", "superadditivity_l", "generations", "level",
                 "budget", "t_values"});
  if (auto* c = find(j, "checks")) {
    v.checks = as_list<std::string>(*c, join(path, "checks"), [](const Json& x, const std::string& p) {
      auto name = as_string(x, p);
      if (std::find(kCheckNames.begin(), kCheckNames.end(), name) == kCheckNames.end()) {
        fail(p, fmt::format("unknown check '{}'", name));
      }
      return name;
    });
  }
  if (auto* x = find(j, "dominance_policies")) {
    v.dominance_policies = as_policies(*x, join(path, "dominance_policies"));
  }
  if (auto* x = find(j, "envelope_policies")) {
    v.envelope_policies = as_policies(*x, join(path, "envelope_policies"));
  }
  if (auto* x = find(j, "min_size")) v.min_size = as_u64(*x, join(path, "min_size"));
  if (auto* x = find(j, "slack")) v.slack = as_double(*x, join(path, "slack"));
  if (auto* x = find(j, "relative_tolerance")) {
    v.relative_tolerance = as_double(*x, join(path, "relative_tolerance"));
  }
  if (auto* x = find(j, "l_values")) v.l_values = as_u64s(*x, join(path, "l_values"));
  if (auto* x = find(j, "superadditivity_l")) {
    v.superadditivity_l = as_u64(*x, join(path, "superadditivity_l"));
  }
  if (auto* x = find(j, "generations")) v.generations = as_u64(*x, join(path, "generations"));
  if (auto* x = find(j, "level")) {
    v.level = as_double(*x, join(path, "level"));
    if (!(v.level > 0.0 && v.level < 1.0)) fail(join(path, "level"), "must lie in (0, 1)");
  }
  if (auto* x = find(j, "budget")) v.budget = as_u64(*x, join(path, "budget"));
  if (auto* x = find(j, "t_values")) v.t_values = as_u64s(*x, join(path, "t_values"));
}

void dump_into(std::string& s, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    s += '\n';
    s.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        s += "{}";
        return;
      }
      s += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) s += ',';
        first = false;
        newline(depth + 1);
        s += Json(key).dump();
        s += indent < 0 ? ":" : ": ";
        dump_into(s, value, indent, depth + 1);
      }
      newline(depth);
      s += '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        s += "[]";
        return;
      }
      s += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) s += ',';
        newline(depth + 1);
        dump_into(s, j[i], indent, depth + 1);
      }
      newline(depth);
      s += ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      s += std::isfinite(x) ? format_double(x) : "null";
      return;
    }
    default:
      s += j.dump();
  }
}

Json optional_json(const std::optional<double>& x) { return x ? Json(*x) : Json(nullptr); }

Json classification_json(const Classification& c) {
  return Json{{"verdict", std::string(to_string(c.verdict))},
              {"basis", c.basis},
              {"decisive_quantity", optional_json(c.decisive_quantity)}};
}

Json estimate_json(const ExtinctionEstimate& e) {
  return Json{{"p_hat", e.p_hat},         {"ci_low", e.ci_low},
              {"ci_high", e.ci_high},     {"n_extinct", e.n_extinct},
              {"n_alive", e.n_alive},     {"n_exploded", e.n_exploded},
              {"replicates", e.replicates()}};
}

Json sizes_json(const Trajectory& t) { return Json(t.sizes); }

PriorityPolicy policy_of(const std::string& token) {
  auto p = PriorityPolicy::from_token(token);
  if (!p) throw ConfigurationError(fmt::format("unknown policy '{}'", token));
  return *p;
}

// Runs one check body and records library errors in the report instead of
// aborting the whole verification.
template <class Fn>
Json guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigurationError&) {
    throw;
  } catch (const Error& e) {
    return Json{{"pass", false}, {"error", e.what()}};
  }
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(fmt::format("cannot write {}", path.string()));
  f << text;
  if (!f) throw Error(fmt::format("failed writing {}", path.string()));
}

}  // namespace

ProcessSpec RunConfig::process_spec() const {
  return ProcessSpec{laws, policy_of(policy), initial_size, horizon, explosion_cap};
}

McConfig RunConfig::mc_config(unsigned threads) const {
  McConfig mc;
  mc.replicates = replicates;
  mc.horizon = horizon;
  mc.explosion_cap = explosion_cap;
  mc.base_seed = seed;
  mc.confidence = confidence;
  mc.threads = threads;
  return mc;
}

RunConfig parse_config(const Json& j) {
  RunConfig c;
  expect_object(j, "", {"laws", "policy", "process", "mc", "curve", "verify", "output"});
  const Json& laws = require(j, "laws", "");
  expect_object(laws, "laws", {"offspring", "claim", "resource"});
  c.laws = LawTriple{parse_offspring(require(laws, "offspring", "laws"), "laws.offspring"),
                     parse_claim(require(laws, "claim", "laws"), "laws.claim"),
                     parse_resource(require(laws, "resource", "laws"), "laws.resource")};
  if (auto* p = find(j, "policy")) c.policy = as_policy(*p, "policy");
  if (auto* p = find(j, "process")) {
    expect_object(*p, "process", {"initial_size", "horizon", "explosion_cap"});
    if (auto* x = find(*p, "initial_size")) c.initial_size = as_u64(*x, "process.initial_size");
    if (auto* x = find(*p, "horizon")) c.horizon = as_u64(*x, "process.horizon");
    if (auto* x = find(*p, "explosion_cap")) c.explosion_cap = as_u64(*x, "process.explosion_cap");
  }
  if (auto* p = find(j, "mc")) {
    expect_object(*p, "mc", {"replicates", "confidence", "seed"});
    if (auto* x = find(*p, "replicates")) c.replicates = as_u64(*x, "mc.replicates");
    if (auto* x = find(*p, "confidence")) c.confidence = as_double(*x, "mc.confidence");
    if (auto* x = find(*p, "seed")) c.seed = as_seed(*x, "mc.seed");
  }
  if (auto* p = find(j, "curve")) {
    expect_object(*p, "curve", {"m_grid"});
    if (auto* x = find(*p, "m_grid")) c.m_grid = as_doubles(*x, "curve.m_grid");
  }
  if (auto* p = find(j, "verify")) parse_verify(*p, "verify", c.verify);
  if (auto* p = find(j, "output")) {
    expect_object(*p, "output", {"dir"});
    if (auto* x = find(*p, "dir")) c.out_dir = as_string(*x, "output.dir");
  }

  // Semantic checks reuse the library validators.
  try {
    c.process_spec().validate();
  } catch (const ConfigurationError& e) {
    fail("process", e.what());
  }
  try {
    c.mc_config(1).validate();
  } catch (const ConfigurationError& e) {
    fail("mc", e.what());
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigurationError(fmt::format("{}: cannot open config file", path));
  Json j;
  try {
    j = Json::parse(f);
  } catch (const Json::parse_error& e) {
    throw ConfigurationError(fmt::format("{}: invalid JSON: {}", path, e.what()));
  }
  return parse_config(j);
}

Json law_to_json(const OffspringLaw& law) {
  const auto p = law.probabilities();
  return Json{{"kind", "discrete"},
              {"params", {{"probabilities", std::vector<double>(p.begin(), p.end())}}}};
}

Json law_to_json(const ClaimLaw& law) {
  switch (law.kind()) {
    case LawKind::Uniform:
      return Json{{"kind", "uniform"}, {"params", {{"d", law.d()}}}};
    case LawKind::ScaledBeta:
      return Json{{"kind", "scaled_beta"},
                  {"params", {{"a", law.alpha()}, {"b", law.beta()}, {"scale", law.scale()}}}};
    case LawKind::Exponential:
      return Json{{"kind", "exponential"}, {"params", {{"lambda", law.rate()}}}};
    case LawKind::Constant:
      return Json{{"kind", "constant"}, {"params", {{"c", law.value()}}}};
  }
  throw UnsupportedKind("unknown claim law kind");
}

Json law_to_json(const ResourceLaw& law) {
  switch (law.kind()) {
    case LawKind::Uniform:
      return Json{{"kind", "uniform"}, {"params", {{"lo", law.lo()}, {"hi", law.hi()}}}};
    case LawKind::ScaledBeta:
      return Json{{"kind", "scaled_beta"},
                  {"params", {{"a", law.alpha()}, {"b", law.beta()}, {"scale", law.scale()}}}};
    case LawKind::Constant:
      return Json{{"kind", "constant"}, {"params", {{"r", law.value()}}}};
    case LawKind::Exponential:
      break;
  }
  throw UnsupportedKind("resource laws have no exponential kind");
}

Json to_json(const RunConfig& c) {
  const auto& v = c.verify;
  return Json{
      {"laws",
       {{"offspring", law_to_json(c.laws.offspring)},
        {"claim", law_to_json(c.laws.claim)},
        {"resource", law_to_json(c.laws.resource)}}},
      {"policy", c.policy},
      {"process",
       {{"initial_size", c.initial_size},
        {"horizon", c.horizon},
        {"explosion_cap", c.explosion_cap}}},
      {"mc", {{"replicates", c.replicates}, {"confidence", c.confidence}, {"seed", c.seed.value}}},
      {"curve", {{"m_grid", c.m_grid}}},
      {"verify",
       {{"checks", v.checks},
        {"dominance_policies", v.dominance_policies},
        {"envelope_policies", v.envelope_policies},
        {"min_size", v.min_size},
        {"slack", v.slack},
        {"relative_tolerance", v.relative_tolerance},
        {"l_values", v.l_values},
        {"superadditivity_l", v.superadditivity_l},
        {"generations", v.generations},
        {"level", v.level},
        {"budget", v.budget},
        {"t_values", v.t_values}}},
      {"output", {{"dir", c.out_dir}}}};
}

std::string format_double(double x) { return fmt::format("{:.17g}", x); }

std::string dump(const Json& j, int indent) {
  std::string s;
  dump_into(s, j, indent, 0);
  return s;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string s = "generation,size\n";
  for (std::size_t n = 0; n < traj.sizes.size(); ++n) {
    s += fmt::format("{},{}\n", n, traj.sizes[n]);
  }
  s += fmt::format("# outcome {}\n", to_string(traj.outcome));
  return s;
}

Json trajectory_json(const Trajectory& traj) {
  std::string kind;
  switch (traj.outcome.kind) {
    case OutcomeKind::Extinct:
      kind = "Extinct";
      break;
    case OutcomeKind::AliveAtHorizon:
      kind = "AliveAtHorizon";
      break;
    case OutcomeKind::Exploded:
      kind = "Exploded";
      break;
  }
  return Json{{"sizes", traj.sizes},
              {"outcome",
               {{"kind", kind},
                {"generation", traj.outcome.generation},
                {"label", to_string(traj.outcome)}}},
              {"ratios", traj.growth_ratios}};
}

Json report_json(const CriticalReport& r) {
  Json j{{"m", r.m},
         {"r", r.r},
         {"mu", r.mu},
         {"tau", optional_json(r.tau)},
         {"theta", optional_json(r.theta)},
         {"effective_mean_wf", optional_json(r.effective_mean_wf)},
         {"effective_mean_sf", optional_json(r.effective_mean_sf)},
         {"r_wc", optional_json(r.r_wc)},
         {"r_uc", r.r_uc},
         {"r_sc", optional_json(r.r_sc)},
         {"verdicts",
          {{"wf", classification_json(r.wf)},
           {"sf", classification_json(r.sf)},
           {"fcfs", classification_json(r.fcfs)}}}};
  j["shortcuts"] = Json{
      {"wf", r.wf_shortcut ? classification_json(*r.wf_shortcut) : Json(nullptr)},
      {"sf", r.sf_shortcut ? classification_json(*r.sf_shortcut) : Json(nullptr)}};
  return j;
}

std::string curve_csv(const std::vector<CurveRow>& rows) {
  std::string s = "m,r_wc,r_uc,r_sc\n";
  for (const auto& row : rows) {
    s += fmt::format("{},{},{},{}\n", format_double(row.m), format_double(row.r_wc),
                     format_double(row.r_uc), row.r_sc ? format_double(*row.r_sc) : "");
  }
  return s;
}

VerifyOutcome run_verify(const RunConfig& config, unsigned threads) {
  const auto& v = config.verify;
  if (v.checks.empty()) throw ConfigurationError("verify.checks: must name at least one check");
  const auto mc = config.mc_config(threads);
  const auto& laws = config.laws;
  VerifyOutcome outcome;
  Json checks = Json::object();

  for (const auto& name : v.checks) {
    if (name == "dominance") {
      Json rows = Json::array();
      bool pass = true;
      for (const auto& token : v.dominance_policies) {
        const auto d = dominance_check(policy_of(token), laws, mc);
        const bool ok = d.violations == 0;
        pass = pass && ok;
        rows.push_back(Json{{"policy", d.policy},
                            {"replicates", d.replicates},
                            {"generations_compared", d.generations_compared},
                            {"violations", d.violations},
                            {"pass", ok}});
      }
      if (!pass) outcome.hard_failure = true;
      checks[name] = Json{{"hard", true}, {"pass", pass}, {"policies", rows}};
    } else if (name == "envelope") {
      Json rows = Json::array();
      bool pass = true;
      for (const auto& token : v.envelope_policies) {
        Json row = guarded([&] {
          const auto e = envelope_check(policy_of(token), laws, mc, v.min_size, v.slack);
          const bool ok = e.relative_error ? *e.relative_error <= v.relative_tolerance
                                           : e.fraction_inside >= 1.0 - config.confidence;
          return Json{{"mean_ratio", e.growth.mean_ratio},
                      {"dispersion", e.growth.dispersion},
                      {"n_contributing", e.growth.n_contributing},
                      {"n_ratios", e.growth.n_ratios},
                      {"target", optional_json(e.growth.target)},
                      {"relative_error", optional_json(e.relative_error)},
                      {"lower", e.lower},
                      {"upper", e.upper},
                      {"slack", e.slack},
                      {"fraction_inside", e.fraction_inside},
                      {"pass", ok}};
        });
        row["policy"] = token;
        pass = pass && row["pass"].get<bool>();
        rows.push_back(row);
      }
      checks[name] = Json{{"hard", false}, {"pass", pass}, {"policies", rows}};
    } else if (name == "safe_haven") {
      checks[name] = guarded([&] {
        const auto s = safe_haven_check(laws, v.l_values, mc);
        Json rows = Json::array();
        for (const auto& row : s.rows) {
          rows.push_back(Json{{"initial_size", row.initial_size},
                              {"estimate", estimate_json(row.estimate)},
                              {"bound", row.bound},
                              {"pass", row.pass}});
        }
        return Json{{"single", estimate_json(s.single)},
                    {"rows", rows},
                    {"monotone", s.monotone},
                    {"pass", s.pass()}};
      });
      checks[name]["hard"] = false;
    } else if (name == "superadditivity") {
      checks[name] = guarded([&] {
        const auto s = superadditivity_check(laws, v.superadditivity_l, v.generations, mc, v.level);
        return Json{{"initial_size", s.initial_size},
                    {"generations", s.generations},
                    {"max_cdf_excess", s.max_cdf_excess},
                    {"critical_value", s.critical_value},
                    {"dominance_pass", s.dominance_pass},
                    {"zero_from_l", estimate_json(s.zero_from_l)},
                    {"zero_from_one", estimate_json(s.zero_from_one)},
                    {"zero_bound_pass", s.zero_bound_pass},
                    {"pass", s.pass()}};
      });
      checks[name]["hard"] = false;
    } else if (name == "counterexample") {
      checks[name] = guarded([&] {
        const auto c = counterexample_search(laws, mc, v.budget);
        Json j{{"found", c.found}, {"scanned", c.scanned}, {"pass", c.found}};
        if (c.found) {
          j["seed"] = c.seed.value;
          j["replicate_id"] = c.replicate_id;
          j["policy_sizes"] = sizes_json(c.policy_trajectory);
          j["sf_sizes"] = sizes_json(c.sf_trajectory);
        }
        return j;
      });
      checks[name]["hard"] = false;
    } else if (name == "monotonicity") {
      checks[name] = guarded([&] {
        const auto p = sf_monotonicity_probe(laws, v.t_values, mc);
        Json cells = Json::array();
        for (const auto& cell : p.cells) {
          cells.push_back(Json{{"t", cell.t},
                               {"v", cell.v},
                               {"p_hat", cell.p_hat},
                               {"ci_low", cell.ci.low},
                               {"ci_high", cell.ci.high}});
        }
        Json violations = Json::array();
        for (const auto& viol : p.violations) {
          violations.push_back(Json{{"t_from", viol.t_from}, {"t_to", viol.t_to}, {"v", viol.v}});
        }
        return Json{{"exploratory", MonotonicityProbe::exploratory},
                    {"cells", cells},
                    {"violations", violations},
                    {"pass", nullptr}};
      });
      checks[name]["hard"] = false;
    } else if (name == "extinction") {
      checks[name] = guarded([&] {
        const auto e = estimate_extinction(config.process_spec(), mc);
        Json j = estimate_json(e);
        j["policy"] = config.policy;
        j["explosion_frequency"] = e.explosion_frequency();
        j["pass"] = nullptr;
        return j;
      });
      checks[name]["hard"] = false;
    } else {
      throw ConfigurationError(fmt::format("verify.checks: unknown check '{}'", name));
    }
  }
  outcome.report = Json{{"seed", config.seed.value},
                        {"replicates", config.replicates},
                        {"checks", checks},
                        {"hard_invariants_hold", !outcome.hard_failure}};
  return outcome;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Resource dependent branching processes: simulation, criteria and checks", "rdbp"};
  app.require_subcommand(1);
  std::string config_path;
  std::string seed_text;
  std::string out_dir;
  unsigned threads = 1;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--seed", seed_text, "Seed, decimal or 0x-hex (overrides mc.seed)");
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--threads", threads, "Worker threads; results do not depend on it")
        ->check(CLI::PositiveNumber);
  };
  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate one trajectory");
  auto* classify_cmd = app.add_subcommand("classify", "Solve the extinction criteria");
  auto* curve_cmd = app.add_subcommand("curve", "Critical resource curves over an m grid");
  auto* verify_cmd = app.add_subcommand("verify", "Run Monte Carlo property checks");
  for (auto* sub : {simulate_cmd, classify_cmd, curve_cmd, verify_cmd}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    RunConfig config = load_config(config_path);
    if (!seed_text.empty()) {
      const auto seed = parse_seed(seed_text);
      if (!seed) throw ConfigurationError(fmt::format("--seed: cannot parse '{}'", seed_text));
      config.seed = *seed;
    }
    if (!out_dir.empty()) config.out_dir = out_dir;
    const std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);

    if (*simulate_cmd) {
      const auto spec = config.process_spec();
      const auto traj = simulate(spec, Universe(config.seed, config.laws));
      write_file(dir / "trajectory.csv", trajectory_csv(traj));
      write_file(dir / "trajectory.json", dump(trajectory_json(traj)) + "\n");
      out << fmt::format("outcome {} final_size {} generations {}\n", to_string(traj.outcome),
                         traj.sizes.back(), traj.sizes.size() - 1);
    } else if (*classify_cmd) {
      const auto text = dump(report_json(critical_report(config.laws))) + "\n";
      write_file(dir / "classify.json", text);
      out << text;
    } else if (*curve_cmd) {
      if (config.m_grid.empty()) throw ConfigurationError("curve.m_grid: must not be empty");
      const auto text = curve_csv(critical_curve(config.laws.claim, config.m_grid));
      write_file(dir / "curve.csv", text);
      out << text;
    } else if (*verify_cmd) {
      const auto result = run_verify(config, threads);
      const auto text = dump(result.report) + "\n";
      write_file(dir / "verify.json", text);
      out << text;
      if (result.hard_failure) {
        err << "hard invariant violated: dominance\n";
        return kExitInvariant;
      }
    }
    return kExitOk;
  } catch (const ConfigurationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace rdbp::cli
