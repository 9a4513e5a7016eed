#include "liees/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace liees::cli {

namespace {

using ojson = nlohmann::ordered_json;

ojson number_or_null(std::optional<double> v) { return v ? ojson(*v) : ojson(nullptr); }

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("output", "cannot write '" + path + "'");
  f << content;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const Error& e) {
    err << "liees: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "liees: " << e.what() << "\n";
    return exit_numeric;
  }
}

void apply_overrides(ExperimentConfig& c, std::optional<int> decimate, std::optional<int> spp) {
  if (decimate) {
    if (*decimate < 1) throw ValidationError("--decimate", "must be >= 1");
    c.output.decimation = *decimate;
  }
  if (spp) {
    if (*spp < 16) throw ValidationError("--steps-per-period", "must be >= 16");
    c.integrator.steps_per_period = *spp;
  }
}

std::optional<double> band_time(const Trajectory& t, double xstar, double band) {
  if (t.final_time() / t.epsilon < 20.0 - 1e-6) return std::nullopt;
  return time_to_band(envelope(t, xstar), band);
}

BracketIndex default_target(DitherKind k) {
  switch (k) {
    case DitherKind::second122:
    case DitherKind::second122_abs: return {1, 2, 2};
    case DitherKind::third1222: return {1, 2, 2, 2};
    case DitherKind::triple123: return {1, 2, 3};
    default: return {1, 2};
  }
}

}  // namespace

int exit_code_for(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::numeric_failure:
    case ErrorKind::divergence:
    case ErrorKind::insufficient_signal:
    case ErrorKind::calibration: return exit_numeric;
    default: return exit_invalid;
  }
}

RunResult run_experiment(const ExperimentConfig& c) {
  RunResult r;
  r.config = c;
  const ESSystem sys = make_system(c);
  IntegratorConfig ic;
  ic.steps_per_period = c.integrator.steps_per_period;
  ic.total_time = c.integrator.total_time;
  ic.decimation = c.output.decimation;
  r.trajectory = integrate(sys, c.integrator.x0, ic);
  if (c.analysis.fit) r.rate = fit_rate(envelope(r.trajectory, c.cost.xstar));
  r.time_to_band = band_time(r.trajectory, c.cost.xstar, c.analysis.band);
  if (c.analysis.lbs_compare) {
    const int steps = static_cast<int>(std::llround(c.integrator.total_time / c.integrator.epsilon));
    const Trajectory avg = integrate_averaged(sys, c.integrator.x0, c.integrator.total_time, std::max(steps, 1));
    r.lbs_closeness = closeness(r.trajectory, avg);
  }
  return r;
}

std::string summary_json(const RunResult& r) {
  const auto& c = r.config;
  ojson j;
  j["system"] = r.trajectory.meta;
  j["epsilon"] = c.integrator.epsilon;
  j["steps_per_period"] = c.integrator.steps_per_period;
  j["total_time"] = c.integrator.total_time;
  j["x0"] = c.integrator.x0;
  j["xstar"] = c.cost.xstar;
  j["final_time"] = r.trajectory.final_time();
  j["final_state"] = r.trajectory.final_state();
  j["samples"] = r.trajectory.size();
  if (r.rate) {
    const auto& e = *r.rate;
    j["rate_class"] = to_string(e.rate_class);
    j["lambda"] = e.lambda_valid ? ojson(e.lambda) : ojson(nullptr);
    j["power_exponent"] = e.power_valid ? ojson(e.power_exponent) : ojson(nullptr);
    j["r_squared"] = e.r_squared;
    j["r_squared_exp"] = e.r_squared_exp;
    j["r_squared_poly"] = e.r_squared_poly;
    j["rho"] = e.rho;
    j["decrease"] = e.decrease;
  }
  j["band"] = c.analysis.band;
  j["time_to_band"] = number_or_null(r.time_to_band);
  if (c.analysis.lbs_compare) j["lbs_closeness"] = number_or_null(r.lbs_closeness);
  return j.dump(2) + "\n";
}

void write_trajectory_csv(const Trajectory& t, std::ostream& os) {
  os << "t,x,J\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    os << fmt17(t.times[i]) << ',' << fmt17(t.states[i]) << ',' << fmt17(t.cost_values[i]) << '\n';
}

Trajectory read_trajectory_csv(std::istream& is, double epsilon) {
  Trajectory t;
  t.epsilon = epsilon;
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,x", 0) != 0)
    throw ValidationError("--in", "expected a 't,x,J' header");
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string a, b, c;
    std::getline(ls, a, ',');
    std::getline(ls, b, ',');
    std::getline(ls, c, ',');
    try {
      t.times.push_back(std::stod(a));
      t.states.push_back(std::stod(b));
      t.cost_values.push_back(c.empty() ? 0.0 : std::stod(c));
    } catch (const std::exception&) {
      throw ValidationError("--in", "unreadable row " + std::to_string(row));
    }
    if (t.size() > 1 && !(t.times.back() > t.times[t.size() - 2]))
      throw ValidationError("--in", "times must increase (row " + std::to_string(row) + ")");
  }
  return t;
}

int cmd_run(const RunOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig c = load_config(o.config);
    apply_overrides(c, o.decimate, o.steps_per_period);
    const RunResult r = run_experiment(c);
    if (!c.output.trajectory_csv.empty()) {
      std::ostringstream csv;
      write_trajectory_csv(r.trajectory, csv);
      write_file(c.output.trajectory_csv, csv.str());
    }
    const std::string summary = summary_json(r);
    const std::string path = o.out.value_or(c.output.summary_json);
    if (path.empty())
      out << summary;
    else
      write_file(path, summary);
    return int(exit_ok);
  });
}

int cmd_compare(const CompareOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ExperimentConfig a = load_config(o.config_a), b = load_config(o.config_b);
    apply_overrides(a, o.decimate, o.steps_per_period);
    apply_overrides(b, o.decimate, o.steps_per_period);
    if (std::abs(a.integrator.epsilon - b.integrator.epsilon) > 1e-15 * a.integrator.epsilon)
      throw ValidationError("integrator.epsilon", "configs must share epsilon");
    if (std::abs(a.integrator.total_time - b.integrator.total_time) > 1e-12 * a.integrator.total_time)
      throw ValidationError("integrator.total_time", "configs must share total_time");
    a.analysis.fit = b.analysis.fit = false;
    a.analysis.lbs_compare = b.analysis.lbs_compare = false;
    const RunResult ra = run_experiment(a), rb = run_experiment(b);
    const CostFunction Jb = make_cost(b.cost);

    std::ostringstream csv;
    csv << "t,x_a,x_b,J_a,J_b\n";
    const auto& ta = ra.trajectory;
    const bool same_grid = ta.times == rb.trajectory.times;
    for (std::size_t i = 0; i < ta.size(); ++i) {
      const double xb = same_grid ? rb.trajectory.states[i] : rb.trajectory.state_at(ta.times[i]);
      const double jb = same_grid ? rb.trajectory.cost_values[i] : Jb(xb);
      csv << fmt17(ta.times[i]) << ',' << fmt17(ta.states[i]) << ',' << fmt17(xb) << ','
          << fmt17(ta.cost_values[i]) << ',' << fmt17(jb) << '\n';
    }
    write_file(o.out_csv, csv.str());

    const double band = 0.05;
    const auto tba = band_time(ta, a.cost.xstar, band), tbb = band_time(rb.trajectory, b.cost.xstar, band);
    ojson v;
    v["band"] = band;
    v["time_to_band_a"] = number_or_null(tba);
    v["time_to_band_b"] = number_or_null(tbb);
    std::string faster = "none";
    if (tba && (!tbb || *tba < *tbb)) faster = "a";
    else if (tbb && (!tba || *tbb < *tba)) faster = "b";
    else if (tba && tbb) faster = "tie";
    v["faster"] = faster;
    const std::string s = v.dump(2) + "\n";
    if (o.summary) write_file(*o.summary, s);
    out << s;
    return int(exit_ok);
  });
}

int cmd_coeffs(const CoeffsOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    std::vector<DitherSpec> dithers;
    std::vector<BracketIndex> targets;
    if (o.config) {
      const ESSystem sys = make_system(load_config(*o.config));
      dithers = sys.dithers();
      targets = sys.targets;
    } else {
      DitherKind kind;
      try {
        kind = dither_kind_from_string(o.kind);
      } catch (const Error&) {
        throw ValidationError("--kind", "unknown dither kind '" + o.kind + "'");
      }
      if (o.kappa < 1) throw ValidationError("--kappa", "must be >= 1");
      if (!(o.epsilon > 0)) throw ValidationError("--epsilon", "must be > 0");
      dithers = dither_family(kind, o.kappa, o.epsilon);
      targets = {default_target(kind)};
    }
    if (o.target) {
      try {
        targets = {BracketIndex::parse(*o.target)};
      } catch (const Error&) {
        throw ValidationError("--target", "expected dotted indices such as 1.2.2");
      }
    }
    if (o.depth < 1 || o.depth > 4) throw ValidationError("--depth", "must be in 1..4");
    if (!(o.tol > 0)) throw ValidationError("--tol", "must be > 0");
    int depth = o.depth;
    for (const auto& t : targets) depth = std::max(depth, t.length());

    const auto coeffs = log_signature(compute_signature(dithers, depth));
    std::ostringstream csv;
    csv << "bracket_word,coefficient,epsilon_order,per_period\n";
    for (const auto& it : coeffs.items)
      csv << it.index.str() << ',' << fmt17(it.scale_free) << ',' << fmt17(it.epsilon_order) << ','
          << fmt17(it.per_period) << '\n';

    const auto rep = verify_excitation(dithers, targets, o.tol);
    ojson v;
    ojson tj = ojson::array();
    for (const auto& t : rep.targets) tj.push_back(t.str());
    v["target"] = targets.size() == 1 ? ojson(targets.front().str()) : tj;
    v["target_coeff"] = rep.target_coeff;
    v["target_coeffs"] = rep.target_coeffs;
    v["max_offtarget"] = rep.max_offtarget;
    v["worst_offtarget"] = rep.worst_offtarget.idx.empty() ? ojson(nullptr) : ojson(rep.worst_offtarget.str());
    v["max_remainder"] = rep.max_remainder;
    v["tol"] = rep.tol;
    v["ok"] = rep.ok;
    if (o.out) {
      write_file(*o.out, csv.str());
    } else {
      out << csv.str() << '\n';
    }
    out << v.dump(2) << '\n';
    if (!rep.ok) err << "liees: excitation check failed for " << v.at("target").get<std::string>() << "\n";
    return int(rep.ok ? exit_ok : exit_failed);
  });
}

int cmd_rate(const RateOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(o.epsilon > 0)) throw ValidationError("--epsilon", "must be > 0");
    std::ifstream f(o.in);
    if (!f) throw ValidationError("--in", "cannot read '" + o.in + "'");
    const Trajectory t = read_trajectory_csv(f, o.epsilon);
    const RateEstimate e = fit_rate(envelope(t, o.xstar));
    ojson j;
    j["rate_class"] = to_string(e.rate_class);
    j["lambda"] = e.lambda_valid ? ojson(e.lambda) : ojson(nullptr);
    j["power_exponent"] = e.power_valid ? ojson(e.power_exponent) : ojson(nullptr);
    j["r_squared"] = e.r_squared;
    j["rho"] = e.rho;
    const std::string s = j.dump(2) + "\n";
    if (o.out)
      write_file(*o.out, s);
    else
      out << s;
    return int(exit_ok);
  });
}

}  // namespace liees::cli
