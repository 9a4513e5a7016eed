#include "liees/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace liees::cli {

namespace {

using nlohmann::json;

// Typed access to one JSON object; every error names the dotted field path.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed)
      : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "must be an object");
    for (const auto& [k, v] : j_.items())
      if (!allowed.count(k)) throw ValidationError(field(k), "unknown field");
  }

  std::string field(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  bool has(const std::string& k) const { return j_.contains(k); }
  const json& raw(const std::string& k) const { return j_.at(k); }

  const json& required(const std::string& k) const {
    if (!has(k)) throw ValidationError(field(k), "missing required field");
    return j_.at(k);
  }

  double number(const std::string& k, std::optional<double> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      required(k);
    }
    const json& v = j_.at(k);
    if (!v.is_number()) throw ValidationError(field(k), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ValidationError(field(k), "must be finite");
    return d;
  }

  int integer(const std::string& k, std::optional<int> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      required(k);
    }
    const json& v = j_.at(k);
    if (!v.is_number_integer()) throw ValidationError(field(k), "must be an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    if (!j_.at(k).is_boolean()) throw ValidationError(field(k), "must be true or false");
    return j_.at(k).get<bool>();
  }

  std::string string(const std::string& k, std::optional<std::string> def = std::nullopt) const {
    if (!has(k)) {
      if (def) return *def;
      required(k);
    }
    if (!j_.at(k).is_string()) throw ValidationError(field(k), "must be a string");
    return j_.at(k).get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

void check(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

ShapeConfig parse_shape(const json& j, const std::string& path, ShapeConfig def) {
  Section s(j, path, {"shape", "gain"});
  def.shape = s.string("shape", def.shape);
  def.gain = s.number("gain", def.gain);
  try {
    (void)Shape::by_name(def.shape, def.gain);
  } catch (const Error&) {
    throw ValidationError(s.field("shape"), "unknown shape '" + def.shape + "'");
  }
  return def;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("<root>", std::string("malformed JSON: ") + e.what());
  }
  Section top(root, "", {"cost", "system", "integrator", "analysis", "output"});
  ExperimentConfig c;

  Section cost(top.required("cost"), "cost", {"name", "alpha", "xstar", "m"});
  c.cost.name = cost.string("name");
  check(c.cost.name == "power", "cost.name", "only 'power' costs are configurable");
  c.cost.alpha = cost.number("alpha");
  check(c.cost.alpha > 0, "cost.alpha", "must be > 0");
  c.cost.xstar = cost.number("xstar");
  c.cost.m = cost.integer("m");
  check(c.cost.m >= 2, "cost.m", "must be >= 2");

  Section sys(top.required("system"), "system",
              {"builder", "N", "kappa", "gain", "phi2", "seed", "zdomain", "kappa12", "kappa1222",
               "gamma1", "gamma3"});
  auto& s = c.system;
  s.builder = sys.string("builder");
  static const std::set<std::string> builders{"two_input", "three_input", "mixed", "classic_durr",
                                              "fourth_order_we"};
  check(builders.count(s.builder) > 0, "system.builder",
        "must be one of two_input, three_input, mixed, classic_durr, fourth_order_we");
  s.kappa = sys.integer("kappa", 1);
  check(s.kappa >= 1, "system.kappa", "must be >= 1");
  if (s.builder == "two_input") {
    s.N = sys.integer("N");
    check(s.N >= 2 && s.N <= 4, "system.N", "must be 2, 3 or 4");
    s.gain = sys.number("gain", 1.0);
    check(s.gain > 0, "system.gain", "must be > 0");
  } else if (s.builder == "three_input") {
    s.phi2 = parse_shape(sys.required("phi2"), "system.phi2", {});
    if (sys.has("seed")) s.seed = parse_shape(sys.raw("seed"), "system.seed", {});
    if (sys.has("zdomain")) {
      const json& z = sys.raw("zdomain");
      check(z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number(), "system.zdomain",
            "must be [lo, hi]");
      s.zdomain = {z[0].get<double>(), z[1].get<double>()};
      check(s.zdomain.hi > s.zdomain.lo, "system.zdomain", "must satisfy lo < hi");
    }
  } else if (s.builder == "mixed") {
    s.kappa12 = sys.integer("kappa12");
    check(s.kappa12 >= 1, "system.kappa12", "must be >= 1");
    s.kappa1222 = sys.integer("kappa1222");
    check(s.kappa1222 >= 1, "system.kappa1222", "must be >= 1");
    s.gamma1 = sys.number("gamma1", 1.0);
    check(s.gamma1 > 0, "system.gamma1", "must be > 0");
    s.gamma3 = sys.number("gamma3", 1.0);
    check(s.gamma3 > 0, "system.gamma3", "must be > 0");
  }

  Section in(top.required("integrator"), "integrator", {"epsilon", "steps_per_period", "total_time", "x0"});
  c.integrator.epsilon = in.number("epsilon");
  check(c.integrator.epsilon > 0, "integrator.epsilon", "must be > 0");
  c.integrator.steps_per_period = in.integer("steps_per_period", 4096);
  check(c.integrator.steps_per_period >= 16, "integrator.steps_per_period", "must be >= 16");
  c.integrator.total_time = in.number("total_time");
  check(c.integrator.total_time > 0, "integrator.total_time", "must be > 0");
  check(c.integrator.total_time / c.integrator.epsilon <= 1e9, "integrator.total_time",
        "spans too many periods");
  c.integrator.x0 = in.number("x0", 0.0);

  if (top.has("analysis")) {
    Section an(top.raw("analysis"), "analysis", {"fit", "lbs_compare", "band"});
    c.analysis.fit = an.boolean("fit", true);
    c.analysis.lbs_compare = an.boolean("lbs_compare", false);
    c.analysis.band = an.number("band", 0.05);
    check(c.analysis.band > 0, "analysis.band", "must be > 0");
  }

  if (top.has("output")) {
    Section out(top.raw("output"), "output", {"trajectory_csv", "summary_json", "decimation"});
    c.output.trajectory_csv = out.string("trajectory_csv", "");
    c.output.summary_json = out.string("summary_json", "");
    c.output.decimation = out.integer("decimation", 1);
    check(c.output.decimation >= 1, "output.decimation", "must be >= 1");
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("config", "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

CostFunction make_cost(const CostConfig& c) { return make_power_cost(c.alpha, c.xstar, c.m); }

ESSystem make_system(const ExperimentConfig& c) {
  const CostFunction J = make_cost(c.cost);
  const auto& s = c.system;
  const double eps = c.integrator.epsilon;
  if (s.builder == "two_input") return build_two_input(J, s.N, s.kappa, eps, s.gain);
  if (s.builder == "classic_durr") return build_classic_durr(J, eps);
  if (s.builder == "fourth_order_we") return build_fourth_order_we(J, eps, s.kappa);
  if (s.builder == "three_input")
    return build_three_input(J, Shape::by_name(s.phi2.shape, s.phi2.gain), eps, s.kappa,
                             Shape::by_name(s.seed.shape, s.seed.gain), s.zdomain);
  return build_mixed(J, s.kappa12, s.kappa1222, s.gamma1, s.gamma3, eps);
}

}  // namespace liees::cli
