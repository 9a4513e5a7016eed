#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <json.hpp>

#include "liees/cli/commands.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace liees;
using namespace liees::cli;

namespace {

const std::string config_dir = LIEES_CONFIG_DIR;

// Scratch directory that is also the working directory while alive.
struct Scratch {
  fs::path dir;
  fs::path previous;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("liees_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    previous = fs::current_path();
    fs::current_path(dir);
  }
  ~Scratch() {
    fs::current_path(previous);
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json base_config(const std::string& stem) {
  return json{
      {"cost", {{"name", "power"}, {"alpha", 1.0}, {"xstar", 1.0}, {"m", 4}}},
      {"system", {{"builder", "fourth_order_we"}, {"kappa", 1}}},
      {"integrator",
       {{"epsilon", 1e-3}, {"steps_per_period", 256}, {"total_time", 0.2}, {"x0", 0.0}}},
      {"analysis", {{"fit", false}, {"lbs_compare", false}}},
      {"output",
       {{"trajectory_csv", stem + ".csv"}, {"summary_json", stem + "_summary.json"},
        {"decimation", 1}}}};
}

std::string write_config(const json& j, const std::string& name) {
  std::ofstream(name) << j.dump(2);
  return name;
}

struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv read_csv(const fs::path& p) {
  Csv c;
  std::ifstream f(p);
  std::string line;
  std::getline(f, line);
  std::stringstream hs(line);
  for (std::string cell; std::getline(hs, cell, ',');) c.header.push_back(cell);
  while (std::getline(f, line)) {
    std::stringstream ls(line);
    std::vector<double> row;
    for (std::string cell; std::getline(ls, cell, ',');) row.push_back(std::stod(cell));
    c.rows.push_back(row);
  }
  return c;
}

int run_cfg(const std::string& path, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cmd_run({path, std::nullopt, std::nullopt, std::nullopt}, out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

}  // namespace

TEST_SUITE("cli.run") {
  TEST_CASE("bundled fig1_we is exponential") {
    Scratch s("we");
    REQUIRE(run_cfg(config_dir + "/fig1_we.json") == exit_ok);
    const json j = json::parse(slurp("fig1_we_summary.json"));
    CHECK(j.at("rate_class") == "exponential");
    CHECK(j.at("lambda").get<double>() > 0.0);
    CHECK(j.at("epsilon").get<double>() == 1e-4);
    CHECK(j.at("x0").get<double>() == 0.0);
    CHECK(j.at("time_to_band").is_number());
    const Csv c = read_csv("fig1_we.csv");
    CHECK(c.header == std::vector<std::string>{"t", "x", "J"});
    CHECK(c.rows.front()[0] == 0.0);
    CHECK(c.rows.back()[0] == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("bundled fig1_durr is polynomial with exponent near -1/2") {
    Scratch s("durr");
    REQUIRE(run_cfg(config_dir + "/fig1_durr.json") == exit_ok);
    const json j = json::parse(slurp("fig1_durr_summary.json"));
    CHECK(j.at("rate_class") == "polynomial");
    CHECK(j.at("power_exponent").get<double>() == doctest::Approx(-0.5).epsilon(0.2));
  }

  TEST_CASE("m = 1 is rejected with exit 2 and names the field") {
    Scratch s("m1");
    json j = base_config("m1");
    j["cost"]["m"] = 1;
    std::string err;
    CHECK(run_cfg(write_config(j, "m1.json"), &err) == exit_invalid);
    CHECK(err.find("cost.m") != std::string::npos);
    CHECK_FALSE(fs::exists("m1.csv"));
  }

  TEST_CASE("unreadable and malformed configs exit 2") {
    Scratch s("bad");
    CHECK(run_cfg("missing.json") == exit_invalid);
    std::ofstream("broken.json") << "{ \"cost\": ";
    CHECK(run_cfg("broken.json") == exit_invalid);
  }

  TEST_CASE("identical config gives bit-identical outputs") {
    Scratch s("det");
    json j = base_config("det");
    j["analysis"]["fit"] = true;
    j["analysis"]["lbs_compare"] = true;
    write_config(j, "det.json");
    REQUIRE(run_cfg("det.json") == exit_ok);
    const std::string csv1 = slurp("det.csv"), js1 = slurp("det_summary.json");
    fs::remove("det.csv");
    fs::remove("det_summary.json");
    REQUIRE(run_cfg("det.json") == exit_ok);
    CHECK(csv1 == slurp("det.csv"));
    CHECK(js1 == slurp("det_summary.json"));
    CHECK_FALSE(csv1.empty());
  }

  TEST_CASE("flag overrides") {
    Scratch s("flags");
    write_config(base_config("fl"), "fl.json");
    std::ostringstream out, err;
    REQUIRE(cmd_run({"fl.json", std::string("other.json"), 8, 128}, out, err) == exit_ok);
    CHECK(fs::exists("other.json"));
    CHECK_FALSE(fs::exists("fl_summary.json"));
    const json j = json::parse(slurp("other.json"));
    CHECK(j.at("steps_per_period") == 128);
    // 200 periods of 128 steps, every 8th step kept, plus every step of the last 10 periods.
    CHECK(read_csv("fl.csv").rows.size() == 190 * 128 / 8 + 10 * 128 + 1);
  }

  TEST_CASE("lbs_compare reports a closeness") {
    Scratch s("lbs");
    json j = base_config("lbs");
    j["system"] = {{"builder", "classic_durr"}};
    j["cost"]["m"] = 2;
    j["analysis"]["lbs_compare"] = true;
    REQUIRE(run_cfg(write_config(j, "lbs.json")) == exit_ok);
    const json r = json::parse(slurp("lbs_summary.json"));
    REQUIRE(r.contains("lbs_closeness"));
    CHECK(r.at("lbs_closeness").get<double>() < 0.1);
  }

  TEST_CASE("divergence exits 3") {
    Scratch s("div");
    json j = base_config("div");
    j["system"] = {{"builder", "two_input"}, {"N", 2}, {"gain", 1e6}};
    j["integrator"]["x0"] = 50.0;
    j["cost"]["m"] = 8;
    CHECK(run_cfg(write_config(j, "div.json")) == exit_numeric);
  }
}

TEST_SUITE("cli.compare") {
  TEST_CASE("we reaches the band before durr") {
    Scratch s("cmp");
    std::ostringstream out, err;
    REQUIRE(cmd_compare({config_dir + "/fig1_we.json", config_dir + "/fig1_durr.json", "cmp.csv",
                         std::string("verdict.json"), std::nullopt, std::nullopt},
                        out, err) == exit_ok);
    const json v = json::parse(slurp("verdict.json"));
    CHECK(v.at("band").get<double>() == 0.05);
    REQUIRE(v.at("time_to_band_a").is_number());
    if (v.at("time_to_band_b").is_number())
      CHECK(v.at("time_to_band_a").get<double>() < v.at("time_to_band_b").get<double>());
    CHECK(v.at("faster") == "a");
    CHECK(json::parse(out.str()) == v);
    const Csv c = read_csv("cmp.csv");
    CHECK(c.header == std::vector<std::string>{"t", "x_a", "x_b", "J_a", "J_b"});
  }

  TEST_CASE("identical configs give equal columns") {
    Scratch s("same");
    write_config(base_config("same"), "same.json");
    std::ostringstream out, err;
    REQUIRE(cmd_compare({"same.json", "same.json", "same_cmp.csv", std::nullopt, std::nullopt,
                         std::nullopt},
                        out, err) == exit_ok);
    const Csv c = read_csv("same_cmp.csv");
    REQUIRE(c.rows.size() > 10);
    for (const auto& r : c.rows) {
      CHECK(r[1] == r[2]);
      CHECK(r[3] == r[4]);
    }
  }

  TEST_CASE("mismatched epsilon or horizon exits 2") {
    Scratch s("mis");
    json a = base_config("a"), b = base_config("b");
    b["integrator"]["epsilon"] = 2e-3;
    write_config(a, "a.json");
    write_config(b, "b.json");
    std::ostringstream out, err;
    CHECK(cmd_compare({"a.json", "b.json", "m.csv", std::nullopt, std::nullopt, std::nullopt}, out,
                      err) == exit_invalid);
    CHECK(err.str().find("epsilon") != std::string::npos);
    b = base_config("b");
    b["integrator"]["total_time"] = 0.3;
    write_config(b, "b.json");
    CHECK(cmd_compare({"a.json", "b.json", "m.csv", std::nullopt, std::nullopt, std::nullopt}, out,
                      err) == exit_invalid);
  }
}

TEST_SUITE("cli.coeffs") {
  TEST_CASE("basic kinds pass and the table is written") {
    Scratch s("coeffs");
    for (const std::string kind : {"first12", "second122", "third1222"}) {
      CAPTURE(kind);
      CoeffsOptions o;
      o.kind = kind;
      o.out = kind + ".csv";
      std::ostringstream out, err;
      REQUIRE(cmd_coeffs(o, out, err) == exit_ok);
      const json v = json::parse(out.str());
      CHECK(v.at("ok") == true);
      CHECK(v.at("target_coeff").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
      CHECK(v.at("max_offtarget").get<double>() < 1e-3);
      const Csv c = read_csv(kind + ".csv");
      CHECK(c.header.at(0) == "bracket_word");
      CHECK(c.header.at(1) == "coefficient");
      CHECK(c.rows.size() == 8);  // free Lie algebra on 2 letters up to depth 4
    }
  }

  TEST_CASE("nominal absolute-value dither fails verification") {
    Scratch s("abs");
    CoeffsOptions o;
    o.kind = "second122_abs";
    o.out = "abs.csv";
    std::ostringstream out, err;
    CHECK(cmd_coeffs(o, out, err) == exit_failed);
    CHECK(json::parse(out.str()).at("ok") == false);
  }

  TEST_CASE("config-driven coefficients") {
    Scratch s("coeffs_cfg");
    json j = base_config("mx");
    j["system"] = {{"builder", "mixed"}, {"kappa12", 5}, {"kappa1222", 1}};
    write_config(j, "mx.json");
    CoeffsOptions o;
    o.config = "mx.json";
    o.out = "mx.csv";
    std::ostringstream out, err;
    CHECK(cmd_coeffs(o, out, err) == exit_ok);
    CHECK(json::parse(out.str()).at("target_coeffs").size() == 2);
  }

  TEST_CASE("bad arguments exit 2") {
    std::ostringstream out, err;
    CoeffsOptions o;
    o.kind = "nonsense";
    CHECK(cmd_coeffs(o, out, err) == exit_invalid);
    o = CoeffsOptions{};
    o.target = "1.x";
    CHECK(cmd_coeffs(o, out, err) == exit_invalid);
    o = CoeffsOptions{};
    o.epsilon = -1.0;
    CHECK(cmd_coeffs(o, out, err) == exit_invalid);
  }
}

TEST_SUITE("cli.rate") {
  TEST_CASE("rate on a written trajectory matches the run summary") {
    Scratch s("rate");
    json j = base_config("rt");
    j["integrator"] = {{"epsilon", 1e-3}, {"steps_per_period", 256}, {"total_time", 1.0},
                       {"x0", 0.0}};
    j["analysis"]["fit"] = true;
    REQUIRE(run_cfg(write_config(j, "rt.json")) == exit_ok);
    const json summary = json::parse(slurp("rt_summary.json"));
    std::ostringstream out, err;
    REQUIRE(cmd_rate({"rt.csv", 1.0, 1e-3, std::string("rate.json")}, out, err) == exit_ok);
    const json r = json::parse(slurp("rate.json"));
    for (const char* k : {"rate_class", "lambda", "power_exponent", "r_squared", "rho"})
      CHECK(r.contains(k));
    CHECK(r.at("rate_class") == summary.at("rate_class"));
    CHECK(r.at("rate_class") == "exponential");
  }

  TEST_CASE("missing input or bad epsilon exits 2") {
    std::ostringstream out, err;
    CHECK(cmd_rate({"no_such.csv", 1.0, 1e-3, std::nullopt}, out, err) == exit_invalid);
    CHECK(cmd_rate({"no_such.csv", 1.0, 0.0, std::nullopt}, out, err) == exit_invalid);
  }

  TEST_CASE("too short a trajectory exits 3") {
    Scratch s("short");
    std::ofstream("short.csv") << "t,x,J\n0,0,1\n0.001,0.1,0.6\n0.002,0.2,0.4\n";
    std::ostringstream out, err;
    CHECK(cmd_rate({"short.csv", 1.0, 1e-3, std::nullopt}, out, err) == exit_numeric);
  }

  TEST_CASE("csv round trip is exact") {
    Trajectory t;
    t.epsilon = 0.1;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 100; ++i) {
      t.times.push_back(0.01 * i);
      t.states.push_back(u(rng));
      t.cost_values.push_back(std::exp(u(rng)));
    }
    std::stringstream ss;
    write_trajectory_csv(t, ss);
    const Trajectory back = read_trajectory_csv(ss, 0.1);
    CHECK(back.times == t.times);
    CHECK(back.states == t.states);
    CHECK(back.cost_values == t.cost_values);
  }
}

TEST_SUITE("cli.verify") {
  TEST_CASE("every suite passes") {
    for (const std::string suite :
         {"brackets", "excitation", "lemma3", "assumptions", "signature", "integrator"}) {
      CAPTURE(suite);
      const auto res = run_verify(suite);
      CHECK_FALSE(res.empty());
      for (const auto& r : res) {
        CAPTURE(r.name);
        CAPTURE(r.detail);
        CHECK(r.pass);
        CHECK(r.suite == suite);
      }
    }
  }

  TEST_CASE("excitation covers the three basic kinds") {
    const auto res = run_verify("excitation");
    for (const std::string kind : {"first12", "second122", "third1222"}) {
      bool seen = false;
      for (const auto& r : res) seen = seen || (r.name.find(kind) != std::string::npos && r.pass);
      CHECK_MESSAGE(seen, kind);
    }
  }

  TEST_CASE("all prints a table and exits 0") {
    std::ostringstream out, err;
    CHECK(cmd_verify("all", out, err) == exit_ok);
    CHECK(out.str().find("FAIL") == std::string::npos);
    CHECK(out.str().find("checks passed") != std::string::npos);
  }

  TEST_CASE("unknown suite exits 2") {
    std::ostringstream out, err;
    CHECK(cmd_verify("nonsense", out, err) == exit_invalid);
  }
}

TEST_SUITE("cli.config") {
  TEST_CASE("bundled configs parse with the documented parameters") {
    for (const char* name : {"fig1_we.json", "fig1_durr.json"}) {
      const ExperimentConfig c = load_config(config_dir + "/" + name);
      CHECK(c.cost.m == 4);
      CHECK(c.cost.xstar == 1.0);
      CHECK(c.integrator.epsilon == 1e-4);
      CHECK(c.integrator.x0 == 0.0);
      CHECK(c.system.kappa == 1);
    }
  }

  TEST_CASE("each out-of-range field is named") {
    struct Case {
      std::string section, key;
      json value;
    };
    const std::vector<Case> cases{
        {"cost", "name", "quadratic"},       {"cost", "alpha", 0.0},
        {"cost", "alpha", -1.0},             {"cost", "m", 1},
        {"cost", "m", 2.5},                  {"cost", "xstar", "one"},
        {"system", "builder", "none"},       {"system", "kappa", 0},
        {"integrator", "epsilon", 0.0},      {"integrator", "epsilon", -1e-4},
        {"integrator", "steps_per_period", 4}, {"integrator", "total_time", 0.0},
        {"analysis", "fit", 1},              {"analysis", "band", -0.1},
        {"output", "decimation", 0},         {"integrator", "bogus", 1}};
    for (const auto& c : cases) {
      const std::string field = c.section + "." + c.key;
      CAPTURE(field);
      json j = base_config("v");
      j[c.section][c.key] = c.value;
      try {
        parse_config(j.dump());
        FAIL("accepted");
      } catch (const ValidationError& e) {
        CHECK(e.field() == field);
        CHECK(std::string(e.what()).find(field) != std::string::npos);
      }
    }
  }

  TEST_CASE("missing required fields are named") {
    for (const auto& [section, key] : std::vector<std::pair<std::string, std::string>>{
             {"cost", "m"}, {"cost", "alpha"}, {"system", "builder"}, {"integrator", "epsilon"},
             {"integrator", "total_time"}}) {
      const std::string field = section + "." + key;
      CAPTURE(field);
      json j = base_config("v");
      j[section].erase(key);
      try {
        parse_config(j.dump());
        FAIL("accepted");
      } catch (const ValidationError& e) {
        CHECK(e.field() == field);
      }
    }
  }

  TEST_CASE("builder parameters are validated") {
    json j = base_config("v");
    j["system"] = {{"builder", "two_input"}, {"N", 5}};
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
    j["system"] = {{"builder", "three_input"}, {"phi2", {{"shape", "tan"}}}};
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
    j["system"] = {{"builder", "three_input"}, {"phi2", {{"shape", "linear"}}}, {"zdomain", {1, 0}}};
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
    j["system"] = {{"builder", "mixed"}, {"kappa12", 0}, {"kappa1222", 1}};
    CHECK_THROWS_AS(parse_config(j.dump()), ValidationError);
  }

  TEST_CASE("random valid configs are accepted and sign flips are rejected") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> pos(1e-6, 10.0);
    std::uniform_int_distribution<int> m(2, 8), spp(16, 8192), dec(1, 1000);
    for (int trial = 0; trial < 200; ++trial) {
      json j = base_config("r");
      j["cost"]["alpha"] = pos(rng);
      j["cost"]["m"] = m(rng);
      j["integrator"]["epsilon"] = pos(rng) * 1e-3;
      j["integrator"]["steps_per_period"] = spp(rng);
      j["integrator"]["total_time"] = pos(rng);
      j["output"]["decimation"] = dec(rng);
      CHECK_NOTHROW(parse_config(j.dump()));
      static const std::vector<std::pair<const char*, const char*>> numeric{
          {"cost", "alpha"}, {"integrator", "epsilon"}, {"integrator", "total_time"}};
      const auto& [section, key] = numeric[trial % numeric.size()];
      j[section][key] = -j[section][key].get<double>();
      try {
        parse_config(j.dump());
        FAIL("accepted");
      } catch (const ValidationError& e) {
        CHECK(e.field() == std::string(section) + "." + key);
      }
    }
  }

  TEST_CASE("make_system builds every builder") {
    json j = base_config("v");
    const std::vector<json> systems{
        {{"builder", "two_input"}, {"N", 2}},
        {{"builder", "two_input"}, {"N", 3}, {"kappa", 2}},
        {{"builder", "two_input"}, {"N", 4}},
        {{"builder", "classic_durr"}},
        {{"builder", "fourth_order_we"}},
        {{"builder", "three_input"}, {"phi2", {{"shape", "constant"}}}},
        {{"builder", "mixed"}, {"kappa12", 5}, {"kappa1222", 1}}};
    for (const auto& sys : systems) {
      CAPTURE(sys.dump());
      j["system"] = sys;
      const ExperimentConfig c = parse_config(j.dump());
      CHECK_NOTHROW(make_system(c));
    }
  }
}
