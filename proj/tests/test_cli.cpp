#include "doctest.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const char* bin = std::getenv("CFTDIST_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string tmp_path(const std::string& name) {
  const char* d = std::getenv("TMPDIR");
  return std::string(d ? d : "/tmp") + "/cftdist_cli_" + name;
}

}  // namespace

TEST_CASE("params for the Lorentzian n = 1") {
  const Run r = run("params --family lorentzian --n 1 --b0 1 --c 1");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["alpha"].get<double>() == doctest::Approx(1.0 / 72.0).epsilon(1e-12));
  CHECK(j["beta"].get<double>() == doctest::Approx(4.18879020478639).epsilon(1e-12));
  CHECK(j["sigma"].get<double>() == doctest::Approx(0.0033157279810811).epsilon(1e-10));
  CHECK(j["qei"].get<double>() == doctest::Approx(-j["sigma"].get<double>()).epsilon(1e-6));
  CHECK(j["schema"] == "cftdist-output/1");
}

TEST_CASE("charfun of f_2 is the secant") {
  const Run r = run("charfun --builtin fn --n 2 --c 1 --t-max 5");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["variant"] == "vacuum");
  const auto t = j["t"].get<std::vector<double>>(), re = j["re"].get<std::vector<double>>(),
             im = j["im"].get<std::vector<double>>();
  REQUIRE(t.size() == re.size());
  CHECK(t.back() == doctest::Approx(5.0));
  for (size_t k = 0; k < t.size(); ++k) {
    const double want = std::pow(1.0 / std::cosh(0.5 * t[k]), 0.125);
    CHECK(std::abs(re[k] - want) < 1e-5 * want);
    CHECK(std::abs(im[k]) < 1e-8);
  }
}

TEST_CASE("highest-weight charfun via --h") {
  const Run r = run("charfun --builtin fn --n 2 --h 1 --N 64 --t-max 2 --n-t 64");
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(j["variant"] == "hw");
  CHECK(j["h"].get<double>() == 1.0);
  const auto t = j["t"].get<std::vector<double>>(), re = j["re"].get<std::vector<double>>();
  for (size_t k = 0; k < t.size(); k += 16) CHECK(re[k] == doctest::Approx(std::pow(1.0 / std::cosh(0.5 * t[k]), 9.0 / 8.0)).epsilon(1e-5));
}

TEST_CASE("selftest --quick") {
  const Run r = run("selftest --quick");
  CHECK(r.status == 0);
  CHECK(r.out.find("FAIL") == std::string::npos);
  CHECK(r.out.find("2 of 2 passed") != std::string::npos);
}

TEST_CASE("weld, flow, mgf, qei and thermal produce their documents") {
  {
    const Run r = run("weld --builtin fn --n 3 --t 0.4 --N 128");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["n_points"] == 128);
    CHECK(j["w_minus"].size() == 128);
    CHECK(j["schwarzian"].size() == 128);
    CHECK(j["junction_residual"].get<double>() < 1e-8);
  }
  {
    const Run r = run("mgf --builtin gaussian --tau 1 --mu-max 1.5 --n-mu 7");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["mu"].size() == 7);
    CHECK(j["diagnostics"]["max_relative_error"].get<double>() < 1e-5);
  }
  {
    const Run r = run("flow --builtin lorentzian --n 2 --steps 32");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["lambda"].size() == 33);
    CHECK(j["closed_width"].size() == 33);
  }
  {
    const Run r = run("qei --builtin invgamma --gamma 3");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["qei"].get<double>() == doctest::Approx(-j["params"]["sigma"].get<double>()).epsilon(1e-6));
  }
  {
    const Run r = run("thermal --builtin fn --n 2 --beta 2 --N 64 --mu-max 0.2 --n-mu 5");
    REQUIRE(r.status == 0);
    const json j = json::parse(r.out);
    CHECK(j["connected2"].get<double>() == doctest::Approx(j["connected2_modes"].get<double>()).epsilon(1e-10));
    CHECK(j["log_mgf"][2].get<double>() == 0.0);
    CHECK(j["partition"] == "free-boson");
  }
}

TEST_CASE("pdf writes CSV and metadata") {
  const std::string csv = tmp_path("pdf.csv");
  const Run r = run("pdf --builtin fn --n 2 --t-max 320 --n-t 1600 --csv " + csv);
  REQUIRE(r.status == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["mass"].get<double>() - 1.0) < 1e-4);
  CHECK(j["window"] == "raised-cosine");
  CHECK(j.contains("support_min"));
  std::ifstream in(csv);
  std::string head;
  std::getline(in, head);
  CHECK(head == "lambda,pdf");
}

TEST_CASE("config files and determinism") {
  const std::string cfg = tmp_path("cfg.json");
  {
    std::ofstream out(cfg);
    out << R"({"command":"qei","field":{"kind":"builtin","name":"lorentzian","params":{"n":2}},"c":2})";
  }
  const Run a = run("qei --config " + cfg), b = run("qei --config " + cfg);
  REQUIRE(a.status == 0);
  CHECK(a.out == b.out);
  // flags override the file
  const Run c = run("qei --config " + cfg + " --c 1");
  CHECK(json::parse(c.out)["qei"].get<double>() == doctest::Approx(0.5 * json::parse(a.out)["qei"].get<double>()));
  const std::string field = tmp_path("field.json");
  {
    std::ofstream out(field);
    out << R"({"kind":"samples","grid":{"kind":"periodic","n_points":8},"values":[0.1,0.2,0.1,0,-0.1,-0.2,-0.1,0]})";
  }
  const Run w = run("weld --field " + field + " --t 0.2 --N 64");
  CHECK(w.status == 0);
}

TEST_CASE("exit codes") {
  CHECK(run("params --builtin gaussian --c -1").status == 1);
  CHECK(run("params --builtin nope").status == 1);
  CHECK(run("weld --builtin fn --n 2 --N 100").status == 1);
  CHECK(run("charfun --builtin fn --n 2 --n-t 8").status == 1);
  CHECK(run("frobnicate").status == 1);
  CHECK(run("qei").status == 1);
  // the Gaussian law has an integrable singularity at its edge; the
  // truncated inversion rings there and fails the nonnegativity check
  CHECK(run("pdf --builtin gaussian --t-max 400 --n-t 4000").status == 2);
  // flow past the blow-up point
  CHECK(run("flow --builtin gaussian --lambda-max 4 --steps 16").status == 2);
}
