#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "opmap/cli.hpp"
#include "opmap/map_spec.hpp"

using namespace opmap;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "opmap");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return std::string(OPMAP_TEST_DATA) + "/" + name; }

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "opmap_test_cli";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(run({"check", data("kraus.json"), "--notion", "type2", "--n", "2"}).code == 0);
  auto v = run({"check", data("transpose_tensor.json"), "--notion", "type2", "--n", "2"});
  CHECK(v.code == 1);
  auto j = json::parse(v.out);
  CHECK(j["report"]["verdict"] == "violated");
  CHECK(j["report"]["witness_trial"] == -1);
  CHECK(j["report"]["min_eig"].get<double>() == doctest::Approx(-1.0));
  // Theta itself is positive.
  CHECK(run({"check", data("transpose_tensor.json"), "--n", "1"}).code == 0);
  auto bad = run({"check", data("kraus.json"), "--n", "0"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("error") != std::string::npos);
  CHECK(run({"check", data("nosuch.json")}).code == 2);
  CHECK(run({"check", data("kraus.json"), "--notion", "type9"}).code == 2);
  CHECK(run({"check"}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("malformed and refuted specs") {
  auto p = scratch("bad.json");
  std::ofstream(p) << "{\"kind\": \"transpose\", \"params\": {\"dim\": 2}, \"claims\": {\"tracial\": true}}";
  auto r = run({"decompose", p.string()});
  CHECK(r.code == 2);
  std::ofstream(p, std::ios::trunc) << "{\"kind\": \"transpose\", \"params\": {}}";
  CHECK(run({"check", p.string()}).code == 2);
  std::ofstream(p, std::ios::trunc) << "{ not json";
  CHECK(run({"check", p.string()}).code == 2);
  // Not flagged tracial: a precondition failure, not a violation.
  CHECK(run({"decompose", data("kraus.json")}).code == 2);
}

TEST_CASE("decompose") {
  auto r = run({"decompose", data("tracial_linear.json")});
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  for (const char* k : {"phi1", "phi2", "residual", "certified", "condition_number"}) CHECK(j.contains(k));
  CHECK(j["residual"].get<double>() <= 1e-9);
  CHECK(j["certified"].get<bool>());
  // The components reassemble the map.
  auto phi2 = build_map_unregistered(j["phi2"]);
  CHECK(phi2.arity() == 1);

  auto nl = run({"decompose", data("nonlinear_tracial.json"), "-D", "2"});
  CHECK(nl.code == 0);
  auto jn = json::parse(nl.out);
  CHECK(jn["residual"].get<double>() <= 1e-9);
  CHECK(jn["components"].size() == 6);
  for (const auto& c : jn["components"]) {
    bool present = (c["m"] == 1 && c["n"] == 1) || (c["m"] == 0 && c["n"] == 0);
    if (!present) CHECK(c["norm_at_identity"].get<double>() <= 1e-8);
  }
}

TEST_CASE("uncertainty") {
  auto r = run({"uncertainty", data("bundle_schrodinger.json")});
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  REQUIRE(j.is_array());
  CHECK(j[0]["quantity"] == "schrodinger");
  for (const auto& rep : j) CHECK(rep["seed"] == 7);
  auto v = run({"uncertainty", data("bundle_vc_transpose.json")});
  CHECK(v.code == 1);
  auto jv = json::parse(v.out);
  CHECK(jv[0]["verdict"] == "violated");
  CHECK(jv[0]["witness"].contains("a"));
  // Var_T vanishes and Cov_T(Z, X) = [Z, X]^T, whose singular values are 2.
  CHECK(jv[0]["margin"].get<double>() == doctest::Approx(-2.0));
  CHECK(run({"uncertainty", data("bundle_schrodinger.json"), "--checks", "bogus"}).code == 2);
  // Checks that do not apply to the map are reported, not fatal.
  auto all = run({"uncertainty", data("bundle_schrodinger.json"), "--checks",
                  "vc,schrodinger,heisenberg,pvc,composite,skew,varbound,tensor_bound"});
  CHECK(all.code == 0);
  auto ja = json::parse(all.out);
  bool na = false;
  for (const auto& rep : ja) na = na || rep["verdict"] == "not_applicable";
  CHECK(na);
}

TEST_CASE("gallery") {
  CHECK(run({"gallery", "run", "theta_transpose_tensor"}).code == 0);
  auto bad = run({"gallery", "run", "nosuch"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("unknown case") != std::string::npos);
  auto l = run({"gallery", "list"});
  CHECK(l.code == 0);
  CHECK(json::parse(l.out).size() >= 8);
  auto p = run({"gallery", "run", "hadamard_power_threshold", "--param", "m=2", "--param", "n=2",
                "--param", "alpha=1.5", "--trials", "200"});
  CHECK(p.code == 0);
  CHECK(json::parse(p.out)["observed"] == "violated");
  CHECK(run({"gallery", "run", "projection_Lambda", "--param", "k"}).code == 2);
  CHECK(run({"gallery", "run", "projection_Lambda", "--param", "q=2"}).code == 2);
  auto all = run({"gallery", "all", "--trials", "300", "--format", "csv"});
  CHECK(all.code == 0);
  CHECK(all.out.rfind("check,verdict,margin,seed,trials\n", 0) == 0);
}

TEST_CASE("config flags") {
  auto a = run({"check", data("kraus.json"), "--notion", "type1", "--n", "2", "--seed", "0xC5A1", "--trials", "300"});
  auto b = run({"check", data("kraus.json"), "--notion", "type1", "--n", "2", "--seed", "50593", "--trials", "300",
                "--threads", "8"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  auto j = json::parse(a.out);
  CHECK(j["report"]["seed"] == 0xC5A1);
  CHECK(j["report"]["trials"] == 300);
  CHECK(j["tolerance"]["psd_tol"] == 1e-9);
  auto t = json::parse(run({"check", data("kraus.json"), "--tol", "1e-7", "--trials", "10"}).out);
  CHECK(t["tolerance"]["psd_tol"] == 1e-7);
  CHECK(run({"check", data("kraus.json"), "--tol", "-1"}).code == 2);
  CHECK(run({"check", data("kraus.json"), "--seed", "zz"}).code == 2);
  CHECK(run({"check", data("kraus.json"), "--format", "xml"}).code == 2);

  auto out = scratch("report.csv");
  auto c = run({"check", data("kraus.json"), "--trials", "50", "--format", "csv", "--out", out.string()});
  CHECK(c.code == 0);
  CHECK(c.out.empty());
  std::ifstream f(out);
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  CHECK(header == "check,verdict,margin,seed,trials");
  CHECK(row.rfind("positivity:", 0) == 0);

  setenv("OPMAP_DEFAULT_TOL", "1e-6", 1);
  auto e = json::parse(run({"check", data("kraus.json"), "--trials", "10"}).out);
  CHECK(e["tolerance"]["psd_tol"] == 1e-6);
  setenv("OPMAP_DEFAULT_TOL", "bogus", 1);
  CHECK(run({"check", data("kraus.json")}).code == 2);
  unsetenv("OPMAP_DEFAULT_TOL");
}

TEST_CASE("fuzz") {
  auto cp = scratch("cp.ckpt");
  auto r = run({"fuzz", data("kraus.json"), "--notions", "type2(1),type1(2)", "--budget", "4000",
                "--checkpoint", cp.string()});
  CHECK(r.code == 0);
  CHECK(fs::exists(cp));
  CHECK_FALSE(fs::exists(cp.string() + ".tmp"));
  auto j = json::parse(r.out);
  CHECK(j["spent"] == 4000);
  CHECK(j["verdict"] == "no_violation");

  auto h = run({"fuzz", data("hadamard_half.json"), "--notions", "type2(1),type2(2)", "--budget", "100000"});
  CHECK(h.code == 1);
  CHECK(json::parse(h.out)["spent"].get<long>() < 100000);

  // Interrupted and resumed runs see the same trial stream as a single run.
  auto whole = json::parse(run({"fuzz", data("kraus.json"), "--notions", "type2(1),type1(1)", "--budget", "5000",
                                "--chunk", "700"}).out);
  auto ck = scratch("resume.ckpt");
  auto part = run({"fuzz", data("kraus.json"), "--notions", "type2(1),type1(1)", "--budget", "2100",
                   "--chunk", "700", "--checkpoint", ck.string()});
  CHECK(json::parse(part.out)["spent"] == 2100);
  auto resumed = json::parse(run({"fuzz", data("kraus.json"), "--notions", "type2(1),type1(1)", "--budget",
                                  "5000", "--chunk", "700", "--checkpoint", ck.string()}).out);
  CHECK(resumed["reports"] == whole["reports"]);
  CHECK(resumed["spent"] == whole["spent"]);
  CHECK(resumed["rounds"] == whole["rounds"]);

  // A different tolerance or seed is refused.
  auto refused = run({"fuzz", data("kraus.json"), "--notions", "type2(1),type1(1)", "--budget", "5000",
                      "--chunk", "700", "--checkpoint", ck.string(), "--tol", "1e-6"});
  CHECK(refused.code == 2);
  CHECK(refused.err.find("different configuration") != std::string::npos);
  CHECK(run({"fuzz", data("kraus.json"), "--notions", "type2(1),type1(1)", "--budget", "5000", "--chunk",
             "700", "--checkpoint", ck.string(), "--seed", "1"}).code == 2);
}

TEST_CASE("executable exit codes") {
  auto sh = [](const std::string& args) {
    std::string cmd = std::string(OPMAP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  CHECK(sh("check " + data("kraus.json") + " --n 2") == 0);
  CHECK(sh("check " + data("transpose_tensor.json") + " --n 2") == 1);
  CHECK(sh("check " + data("kraus.json") + " --n 0") == 2);
  CHECK(sh("gallery run nosuch") == 2);
}
