#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "ihse/io.hpp"

using ihse::Json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run ihse_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ihse");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = ihse::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "ihse_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTwoBody = R"({"d": 2, "particles": [{"x": [0, 0], "v": [1, 0]}, {"x": [3, 0], "v": [0, 0]}]})";

}  // namespace

TEST_CASE("flow subcommand reproduces the hand-evaluated emission") {
  const auto cfg = write_file("two_body.json", kTwoBody);
  const auto r = ihse_cli({"flow", "--config", cfg, "--tau", "3", "--eps0", "0.1875"});
  REQUIRE(r.code == 0);
  const Json doc = Json::parse(r.out);
  CHECK(doc["schema"] == "ihse/1");
  CHECK(doc["config"]["params"]["epsilon0"] == 0.1875);
  const Json& res = doc["result"];
  CHECK(res["classification"]["kind"] == "Inelastic");
  CHECK(res["collision"]["t_c"] == 2.0);
  CHECK(res["final"]["particles"][0]["v"] == Json::array({0.25, 0.0}));
  CHECK(res["final"]["particles"][1]["x"] == Json::array({3.75, 0.0}));
  CHECK(res["jacobian"]["det"].get<double>() == doctest::Approx(0.5));
}

TEST_CASE("tensor-lemma and jacobian summaries") {
  auto r = ihse_cli({"tensor-lemma", "--samples", "10000", "--seed", "1"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["summary"]["max_abs_diff"].get<double>() <= 1e-12);

  r = ihse_cli({"jacobian", "--dim", "2", "--samples", "100", "--seed", "7", "--format", "jsonl"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string line;
  std::size_t n = 0;
  Json last;
  while (std::getline(lines, line)) {
    last = Json::parse(line);
    ++n;
  }
  CHECK(n == 101);
  CHECK(last["type"] == "summary");
  CHECK(last["succeeded"] == 100);
  CHECK(last["max_residual"].get<double>() <= 1e-5);
}

TEST_CASE("exit statuses") {
  CHECK(ihse_cli({}).code == 2);
  CHECK(ihse_cli({"nonsense"}).code == 2);
  CHECK(ihse_cli({"flow", "--tau", "1"}).code == 2);  // no configuration
  CHECK(ihse_cli({"flow", "--config", "/nonexistent.json"}).code == 2);
  CHECK(ihse_cli({"tensor-lemma", "--grazing-tol", "-1"}).code == 2);
  CHECK(ihse_cli({"measure", "--delta", "0.9"}).code == 2);
  CHECK(ihse_cli({"simulate", "--eps0", "0"}).code == 2);

  const auto grazing = write_file("grazing.json",
                                  R"({"d": 2, "particles": [{"x": [0, 0], "v": [1, 0]}, {"x": [3, 1], "v": [0, 0]}]})");
  auto r = ihse_cli({"flow", "--config", grazing, "--tau", "5"});
  CHECK(r.code == 3);
  CHECK(r.err.find("Grazing") != std::string::npos);
  r = ihse_cli({"simulate", "--config", grazing, "--T", "5"});
  CHECK(r.code == 3);
  CHECK(Json::parse(r.out)["result"]["halted"]["reason"] == "Grazing");
  CHECK(ihse_cli({"classify", "--config", grazing, "--tau", "5"}).code == 0);
}

TEST_CASE("outputs are written atomically, reproducibly and with a timestamp sidecar") {
  const fs::path out = scratch() / "lemma.json";
  fs::remove(out);
  REQUIRE(ihse_cli({"tensor-lemma", "--samples", "50", "--seed", "4", "--out", out.string()}).code == 0);
  const std::string first = read_file(out);
  CHECK(fs::exists(out.string() + ".meta.json"));
  CHECK(Json::parse(read_file(out.string() + ".meta.json")).contains("generated_at"));
  REQUIRE(ihse_cli({"tensor-lemma", "--samples", "50", "--seed", "4", "--out", out.string()}).code == 0);
  CHECK(read_file(out) == first);
  for (const auto& e : fs::directory_iterator(scratch())) {
    CHECK(e.path().string().find(".tmp.") == std::string::npos);
  }
}

TEST_CASE("config file supplies defaults and flags override it") {
  const auto cfg = write_file("with_options.json",
                              R"({"d": 2, "particles": [{"x": [0, 0], "v": [1, 0]}, {"x": [3, 0], "v": [0, 0]}],
                                  "options": {"tau": 3, "eps0": 0.1875}})");
  auto r = ihse_cli({"flow", "--config", cfg});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["classification"]["kind"] == "Inelastic");

  r = ihse_cli({"flow", "--config", cfg, "--eps0", "0.75"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["result"]["classification"]["kind"] == "Elastic");

  const auto opts = write_file("lemma_opts.json", R"({"samples": 7, "seed": 3})");
  r = ihse_cli({"tensor-lemma", "--config", opts});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["config"]["samples"] == 7);
  CHECK(Json::parse(r.out)["config"]["seed"] == 3);
}

TEST_CASE("csv and json agree exactly") {
  const auto js = ihse_cli({"scatter-check", "--samples", "20", "--seed", "9", "--eps0", "0.75"});
  const auto cs = ihse_cli({"scatter-check", "--samples", "20", "--seed", "9", "--eps0", "0.75", "--format", "csv"});
  REQUIRE(js.code == 0);
  REQUIRE(cs.code == 0);
  const Json doc = Json::parse(js.out);
  std::istringstream rows(cs.out);
  std::string row;
  std::getline(rows, row);
  CHECK(row == "index,kind,fd_det,analytic_det,residual,energy_loss,momentum_error");
  for (std::size_t k = 0; k < 20; ++k) {
    REQUIRE(std::getline(rows, row));
    std::vector<std::string> cells;
    std::stringstream ss(row);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() >= 3);
    CHECK(cells[2] == doc["samples"][k]["fd_det"].dump());
  }
  CHECK(Json::parse(js.out)["summary"]["max_abs_det_deviation"].get<double>() <= 1e-6);
}

TEST_CASE("measure appends sweep rows and is thread-count independent") {
  const fs::path csv = scratch() / "sweep.csv";
  fs::remove(csv);
  for (const char* delta : {"0.2", "0.1"}) {
    REQUIRE(ihse_cli({"measure", "--family", "E", "--N", "3", "--delta", delta, "--R1", "2.5", "--R2", "1",
                      "--eps0", "0.1", "--samples", "20000", "--seed", "5", "--csv", csv.string()})
                .code == 0);
  }
  std::istringstream lines(read_file(csv));
  std::string line;
  std::vector<std::string> all;
  while (std::getline(lines, line)) all.push_back(line);
  REQUIRE(all.size() == 3);
  CHECK(all[0] == "delta,mu,estimate,ci95");

  setenv("IHSE_THREADS", "1", 1);
  const auto one = ihse_cli({"measure", "--family", "P", "--mu", "0.25", "--delta", "0.2", "--samples", "30000"});
  setenv("IHSE_THREADS", "3", 1);
  const auto three = ihse_cli({"measure", "--family", "P", "--mu", "0.25", "--delta", "0.2", "--samples", "30000"});
  unsetenv("IHSE_THREADS");
  REQUIRE(one.code == 0);
  CHECK(Json::parse(one.out)["result"]["hits"] == Json::parse(three.out)["result"]["hits"]);
}

TEST_CASE("simulate and volume subcommands") {
  const auto cfg = write_file("two_body_sim.json", kTwoBody);
  const fs::path events = scratch() / "events.csv";
  auto r = ihse_cli({"simulate", "--config", cfg, "--T", "3", "--eps0", "0.1875", "--csv", events.string()});
  REQUIRE(r.code == 0);
  const Json res = Json::parse(r.out)["result"];
  CHECK(res["n_inelastic"] == 1);
  CHECK(res["bounds"]["ok"] == true);
  CHECK(read_file(events) == "time,i,j,kind,ke_before,ke_after\n2.0,1,2,Inelastic,0.5,0.3125\n");

  r = ihse_cli({"simulate", "--N", "3", "--R1", "3", "--R2", "2", "--T", "2", "--seed", "8", "--eps0", "0.3"});
  REQUIRE(r.code == 0);
  CHECK(Json::parse(r.out)["config"]["random_initial"]["N"] == 3);

  r = ihse_cli({"volume", "--config", cfg, "--tau", "3", "--eps0", "0.1875", "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("radius,tau,predicted,measured\n1e-05,3.0,0.5,", 0) == 0);
}
