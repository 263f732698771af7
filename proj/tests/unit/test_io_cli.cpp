#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "active/cli.hpp"
#include "active/error.hpp"
#include "active/io.hpp"

using namespace active;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = active::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("active_stats_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

}  // namespace

TEST_CASE("CSV parsing") {
  const auto t = io::parse_csv("id, Proxy ,true\r\n\n1,0.1,0.2\n2,1e-3,+0.5\n");
  CHECK(t.header == std::vector<std::string>{"id", "Proxy", "true"});
  CHECK(t.rows.size() == 2);
  CHECK(t.lines == std::vector<std::size_t>{3, 4});
  CHECK(*t.column("proxy") == 1);
  CHECK(t.number(1, 1) == 1e-3);
  CHECK(t.number(1, 2) == 0.5);

  try {
    io::parse_csv("a,b\n1,2\n3\n");
    FAIL("ragged row accepted");
  } catch (const DataError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(io::parse_number("0.5x", 2), DataError);
  CHECK_THROWS_AS(io::parse_number("nan", 2), DataError);
  CHECK_THROWS_AS(io::parse_csv(""), DataError);
}

TEST_CASE("panel round trip") {
  const auto dir = scratch("panel");
  SemConfig c;
  c.n = 20;
  c.d = 2;
  const PanelData p = simulate_sem(c);
  io::write_panel_csv(dir / "x.csv", p);
  const PanelData q = io::read_panel_csv(dir / "x.csv");
  CHECK(p.y == q.y);
  CHECK(p.a == q.a);
  CHECK(p.z == q.z);
  CHECK(p.w == q.w);
  const auto panels = io::read_panels(dir);
  REQUIRE(panels.size() == 1);
  CHECK(panels[0].id == "x");
}

TEST_CASE("fitted models round trip through JSON") {
  GridDensity d{{0.0, 0.5, 1.0}, {0.5, 1.5}};
  const auto back = io::grid_density_from_json(io::to_json(d));
  CHECK(back.bin_edges == d.bin_edges);
  CHECK(back.bin_values == d.bin_values);
  CondCdfEstimate e{{0.0, 1.0}, {0.0, 1.0}, {{0.0, 1.0}}};
  const auto e2 = io::cond_cdf_from_json(io::Json::parse(io::to_json(e).dump()));
  CHECK(e2.cdf == e.cdf);
  CHECK_THROWS_AS(io::cond_cdf_from_json(io::Json::parse(R"({"q_bin_edges":[0,1]})")), DataError);
}

TEST_CASE("CLI test subcommand") {
  const auto dir = scratch("test");
  write(dir / "s.csv", "id,proxy,true\n1,0.01,0.01\n2,0.02,0.03\n3,0.5,0.6\n4,0.9,0.8\n");

  auto r = run_cli({"test", "bh", "--input", (dir / "s.csv").string(), "--alpha", "0.1"});
  REQUIRE(r.code == 0);
  auto j = io::Json::parse(r.out);
  CHECK(j["rejected_ids"] == io::Json::array({"1", "2"}));
  CHECK(j["k_star"] == 2);
  CHECK(j["query_count"] == 0);

  r = run_cli({"--seed", "3", "test", "active-ebh", "--input", (dir / "s.csv").string(), "--gamma", "1"});
  REQUIRE(r.code == 0);
  j = io::Json::parse(r.out);
  for (std::size_t i = 0; i < 4; ++i) {
    if (j["query_mask"][i].get<bool>()) CHECK(j["statistics"][i] == 0.0);
  }

  write(dir / "bad.csv", "id,proxy\n1,0.1\n2,zero\n");
  r = run_cli({"test", "bh", "--input", (dir / "bad.csv").string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("line 3") != std::string::npos);

  write(dir / "noproxy.csv", "id,value\n1,0.1\n");
  CHECK(run_cli({"test", "bh", "--input", (dir / "noproxy.csv").string()}).code == 3);

  // no true column: a procedure that needs to query cannot run
  write(dir / "proxy_only.csv", "id,proxy\n1,0.1\n2,0.2\n");
  CHECK(run_cli({"test", "active-bh", "--input", (dir / "proxy_only.csv").string(), "--gamma", "0"}).code == 2);
  CHECK(run_cli({"test", "bh", "--input", (dir / "proxy_only.csv").string()}).code == 0);
}

TEST_CASE("CLI usage errors") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
  CHECK(run_cli({"test", "holm", "--input", "x.csv"}).code == 2);
  const auto dir = scratch("usage");
  const auto r = run_cli({"simulate", "sem", "--hypotheses", "2"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--out-dir") != std::string::npos);
  CHECK(fs::is_empty(dir));
  CHECK(run_cli({"simulate", "gaussian", "--rho", "1.5", "--trials", "10"}).code == 2);
}

TEST_CASE("CLI 2sls pipeline") {
  const auto dir = scratch("tsls");
  const auto data = dir / "sem";
  auto r = run_cli({"--seed", "4", "simulate", "sem", "--out-dir", data.string(), "--hypotheses", "3", "-n", "300"});
  REQUIRE(r.code == 0);
  r = run_cli({"--seed", "4", "2sls", "--data", data.string(), "--gamma", "0", "--no-timings"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = io::Json::parse(line);
    CHECK(j["queried"] == true);
    CHECK(j["P"].is_number());
    CHECK(j["elapsed_proxy_s"].is_null());
    ++count;
  }
  CHECK(count == 3);
  const auto again = run_cli({"--seed", "4", "--threads", "2", "2sls", "--data", data.string(), "--gamma", "0",
                          "--no-timings"});
  CHECK(again.out == r.out);

  SemConfig tiny;
  tiny.n = 20;
  tiny.d = 2;
  PanelData p = simulate_sem(tiny);
  p.y.conservativeResize(6);
  p.a.conservativeResize(6);
  p.a << 0, 1, 0, 1, 0, 1;
  p.z.conservativeResize(6, 2);
  p.w.conservativeResize(6, 2);
  io::write_panel_csv(dir / "tiny.csv", p);
  r = run_cli({"2sls", "--data", (dir / "tiny.csv").string(), "--gamma", "0.5"});
  CHECK(r.code == 2);
  CHECK(r.err.find("2d + 2") != std::string::npos);
}

TEST_CASE("CLI tune") {
  const auto dir = scratch("tune");
  std::string rows = "proxy,true\n";
  for (int i = 0; i < 10; ++i) rows += "1e12,2.718281828459045\n";
  write(dir / "pairs.csv", rows);
  auto r = run_cli({"tune", "--samples", (dir / "pairs.csv").string(), "--budget", "1"});
  REQUIRE(r.code == 0);
  auto j = io::Json::parse(r.out);
  CHECK(j["gamma_star"] == 1.0);
  CHECK(j["feasible"] == true);
  const auto again = run_cli({"tune", "--samples", (dir / "pairs.csv").string(), "--budget", "1"});
  CHECK(again.out == r.out);

  r = run_cli({"tune", "--samples", (dir / "pairs.csv").string(), "--budget", "0"});
  REQUIRE(r.code == 0);
  CHECK(io::Json::parse(r.out)["feasible"] == false);

  r = run_cli({"tune", "--budget", "0.9", "--ell-f", "0.1876"});
  REQUIRE(r.code == 0);
  CHECK(io::Json::parse(r.out)["eta_star"].get<double>() == doctest::Approx(0.533).epsilon(1e-3));
  CHECK(run_cli({"tune", "--budget", "0.5"}).code == 2);
}

TEST_CASE("CLI density and joint fits") {
  const auto dir = scratch("fits");
  std::string values = "q\n", pairs = "q,p\n", stats = "id,proxy\n";
  for (int i = 0; i < 400; ++i) {
    const double u = (i + 0.5) / 400.0;
    values += std::to_string(u) + "\n";
    pairs += std::to_string(u) + "," + std::to_string(1.0 - u) + "\n";
    if (i % 40 == 0) stats += std::to_string(i) + "," + std::to_string(u) + "\n";
  }
  write(dir / "values.csv", values);
  write(dir / "pairs.csv", pairs);
  write(dir / "stats.csv", stats);

  auto r = run_cli({"fit-density", "--input", (dir / "values.csv").string(), "--bins", "10", "-o",
                (dir / "density.json").string()});
  REQUIRE(r.code == 0);
  const auto d = io::grid_density_from_json(io::read_json(dir / "density.json"));
  CHECK(d.bin_values.size() == 10);

  r = run_cli({"fit-joint", "--input", (dir / "pairs.csv").string(), "-o", (dir / "joint.json").string()});
  REQUIRE(r.code == 0);
  r = run_cli({"--seed", "1", "correct-joint", "--model", (dir / "joint.json").string(), "--input",
           (dir / "stats.csv").string()});
  REQUIRE(r.code == 0);
  const auto j = io::Json::parse(r.out);
  CHECK(j["records"].size() == 10);
  CHECK(j["query_count"] == 0);

  CHECK(run_cli({"fit-density", "--input", (dir / "missing.csv").string()}).code == 3);
}

TEST_CASE("CLI simulations are deterministic") {
  const std::vector<std::string> args = {"--seed", "7", "simulate", "gaussian", "--trials", "200"};
  auto a = run_cli(args);
  auto with_threads = args;
  with_threads.insert(with_threads.begin(), {"--threads", "3"});
  auto b = run_cli(with_threads);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = io::Json::parse(a.out);
  CHECK(j["methods"].size() == 8);

  const auto dir = scratch("csv");
  CHECK(run_cli({"simulate", "beta", "-K", "200", "--replications", "2", "--json", (dir / "b.json").string(),
             "--csv", (dir / "b.csv").string()})
            .code == 0);
  CHECK(fs::exists(dir / "b.csv"));
  CHECK(io::read_json(dir / "b.json").contains("false_positive_rate"));
}
