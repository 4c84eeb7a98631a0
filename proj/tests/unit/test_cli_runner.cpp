#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "radwalk/cli/cli.hpp"

using namespace radwalk;
using namespace radwalk::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("radwalk_cli_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Result {
  int code;
  std::string out, err;
};

Result run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "radwalk");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

const char* kTwoPoint = R"({"family":"two_point","r_a_sq":1,"p_a":0.5,"r_b_sq":3})";

std::string small_manifest() {
  return std::string(R"({"suite":"t","seed":11,"entries":[
    {"id":"two","law":)") + kTwoPoint + R"(,"regime":"CLT_II","n":20,"p":40000,"trials":600,"fast_path":true,
     "tolerances":{"rel_limit":0.5,"rel_finite":0.5}},
    {"id":"q2","law":{"q":2,"atoms":[{"weight":0.5,"radius":[1.5,0.5,0.5,0.5]},{"weight":0.5,"radius":[1,0,0,1]}]},
     "regime":"CLT_I","n":16,"p":4,"trials":300,"fast_path":false}
  ]})";
}

}  // namespace

TEST_CASE("empty manifest writes a bare csv") {
  TempDir d("empty");
  write(d.path / "m.json", R"({"suite":"nothing","entries":[]})");
  const Result r = run_args({"clt", "--manifest", (d.path / "m.json").string(), "--out", (d.path / "o").string()});
  CHECK(r.code == kExitPass);
  const std::string csv = slurp(d.path / "o" / "nothing.csv");
  CHECK(csv.find("id,regime,n,p,q,predicted_var,empirical_var,stderr,rel_frob_err,ks_stat,verdict\n") !=
        std::string::npos);
  CHECK(csv.rfind("# radwalk ", 0) == 0);
}

TEST_CASE("clt entries report the limit variance") {
  TempDir d("clt");
  write(d.path / "m.json", small_manifest());
  RunOptions opts;
  opts.out = d.path / "o";
  opts.workers = 1;
  std::ostringstream out, err;
  cmd_clt(d.path / "m.json", opts, out, err);
  const std::string csv = slurp(d.path / "o" / "t.csv");
  CHECK(csv.find("\ntwo,CLT_II,20,40000,1,1,") != std::string::npos);
  CHECK(csv.find("\nq2,CLT_I,16,4,2,") != std::string::npos);
  CHECK(fs::exists(d.path / "o" / "two.json"));
  CHECK(fs::exists(d.path / "o" / "q2.json"));
  const std::string js = slurp(d.path / "o" / "two.json");
  CHECK(js.find("\"config_hash\"") != std::string::npos);
  CHECK(js.find("\"seed\": 11") != std::string::npos);
  // no timing in files, otherwise reruns could not match byte for byte
  CHECK(js.find("wall") == std::string::npos);
}

TEST_CASE("outputs do not depend on the worker count") {
  TempDir d("workers");
  write(d.path / "m.json", small_manifest());
  std::vector<std::string> files;
  for (unsigned w : {1u, 3u}) {
    RunOptions opts;
    opts.out = d.path / ("o" + std::to_string(w));
    opts.workers = w;
    std::ostringstream out, err;
    cmd_clt(d.path / "m.json", opts, out, err);
  }
  for (const char* f : {"t.csv", "two.json", "q2.json"})
    CHECK(slurp(d.path / "o1" / f) == slurp(d.path / "o3" / f));
}

TEST_CASE("seed override changes numbers but is recorded") {
  TempDir d("seed");
  write(d.path / "m.json", small_manifest());
  const std::string m = (d.path / "m.json").string();
  run_args({"clt", "--manifest", m, "--out", (d.path / "a").string(), "--workers", "1"});
  run_args({"clt", "--manifest", m, "--out", (d.path / "b").string(), "--workers", "1", "--seed", "12"});
  const std::string a = slurp(d.path / "a" / "t.csv"), b = slurp(d.path / "b" / "t.csv");
  CHECK(a.find("# seed 11\n") != std::string::npos);
  CHECK(b.find("# seed 12\n") != std::string::npos);
  CHECK(a != b);
  // the config hash leaves the seed out
  CHECK(a.substr(a.find("# config_hash")) .substr(0, 30) == b.substr(b.find("# config_hash")).substr(0, 30));
}

TEST_CASE("config errors exit with 2 and name the field") {
  TempDir d("bad");
  const auto check = [&](const std::string& text, const std::string& needle) {
    write(d.path / "m.json", text);
    const Result r = run_args({"clt", "--manifest", (d.path / "m.json").string(), "--out", (d.path / "o").string()});
    CHECK(r.code == kExitUsage);
    CHECK_MESSAGE(r.err.find(needle) != std::string::npos, r.err);
  };
  check(R"({"entries":[{"id":"x","law":{"q":2,"atoms":[{"weight":0.5,"radius":[1,0,0,1]},
        {"weight":0.5,"radius":[1,2,0,1]}]},"regime":"CLT_I","n":4,"p":2}]})",
        "atom 1");
  check(R"({"entries":[{"id":"x","law":{"family":"point_mass","r":1},"regime":"CLT_III","n":4,"p":2}]})", "regime");
  check(R"({"entries":[{"id":"x","law":{"family":"point_mass","r":1},"n":4,"p":2,"colour":1}]})", "colour");
  check(R"({"entries":[{"id":"x y","law":{"family":"point_mass","r":1},"n":4,"p":2}]})", "id");
  check(R"({"entries":[{"id":"x","law":{"family":"point_mass","r":1},"n":4,"p":2},
        {"id":"x","law":{"family":"point_mass","r":1},"n":4,"p":2}]})",
        "x");
  check("{not json", "");
  CHECK(run_args({"clt", "--manifest", (d.path / "absent.json").string()}).code == kExitUsage);
}

TEST_CASE("law documents") {
  CHECK(r2(parse_law(kTwoPoint))(0, 0) == doctest::Approx(2.0));
  CHECK(r2(parse_law(R"({"family":"two_point","r_a":1,"p_a":0.5,"r_b":{"sqrt":3}})"))(0, 0) ==
        doctest::Approx(2.0));
  CHECK(parse_law(R"({"family":"uniform_interval","a":0,"b":1})").q() == 1);
  CHECK_THROWS_AS(parse_law(R"({"family":"two_point","r_a":1,"p_a":1.5,"r_b":2})"), ConfigError);
  CHECK_THROWS_AS(parse_law(R"({"q":2,"atoms":[{"weight":1,"radius":[1,0,0]}]})"), ConfigError);
  CHECK_THROWS_AS(parse_law(R"({"q":1,"atoms":[{"weight":1,"radius":[-1]}]})"), ConfigError);
}

TEST_CASE("kappa and grid specs") {
  const MultiIndex k = parse_kappa("1,1:1;2,1:2");
  CHECK(k.degree() == 3);
  CHECK_THROWS_AS(parse_kappa(""), ConfigError);
  CHECK_THROWS_AS(parse_kappa("0,1:1"), ConfigError);
  CHECK_THROWS_AS(parse_kappa("1,1"), ConfigError);
  CHECK_THROWS_AS(parse_kappa("1,1:1;1,1:2"), ConfigError);
  CHECK_THROWS_AS(parse_kappa("1,1:9"), ConfigError);
  CHECK(parse_grid("8,16,32") == std::vector<std::size_t>{8, 16, 32});
  CHECK_THROWS_AS(parse_grid("8,,16"), ConfigError);
  CHECK_THROWS_AS(parse_grid("8,-1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0"), ConfigError);
}

TEST_CASE("moments subcommand") {
  TempDir d("moments");
  write(d.path / "law.json", R"({"family":"point_mass","r":1})");
  const std::string law = (d.path / "law.json").string();

  const Result parity = run_args({"moments", "--law", law, "--kappa", "1,1:1;2,1:2", "--p-grid", "10,20,40",
                                  "--trials", "2000", "--out", d.path.string()});
  CHECK(parity.code == kExitPass);
  CHECK(parity.out.find("parity: PASS") != std::string::npos);
  CHECK(slurp(d.path / "moments.csv").find("p,estimate,stderr\n") != std::string::npos);

  const Result decay = run_args(
      {"moments", "--law", law, "--kappa", "1,1:2", "--p-grid", "8,16,32,64", "--trials", "4000", "--seed", "3"});
  CHECK(decay.code == kExitPass);
  CHECK(decay.out.find("decay: PASS") != std::string::npos);

  CHECK(run_args({"moments", "--law", law, "--kappa", "1,1:2", "--p-grid", "8"}).code == kExitUsage);
  CHECK(run_args({"moments", "--law", law, "--kappa", "1,3:2", "--p-grid", "8,16,32"}).code == kExitUsage);
  CHECK(run_args({"moments", "--law", law, "--kappa", "1,1:2", "--p-grid", "8,16,32", "--trials", "10"}).code ==
        kExitUsage);
}

TEST_CASE("selftest and its negative control") {
  std::ostringstream out;
  CHECK(cmd_selftest(std::nullopt, false, out) == kExitPass);
  CHECK(out.str().find("FAIL") == std::string::npos);
  std::ostringstream bad;
  CHECK(cmd_selftest(std::nullopt, true, bad) == kExitFail);
  CHECK(bad.str().find("kron_entry_formula: FAIL") != std::string::npos);
  // the fault is switched off again afterwards
  std::ostringstream again;
  CHECK(cmd_selftest(5, false, again) == kExitPass);
}

TEST_CASE("worker resolution") {
  ::unsetenv(kWorkersEnv);
  CHECK(resolve_workers(std::nullopt, std::nullopt) == 0);
  CHECK(resolve_workers(std::nullopt, 3u) == 3);
  ::setenv(kWorkersEnv, "2", 1);
  CHECK(resolve_workers(std::nullopt, 3u) == 2);
  CHECK(resolve_workers(5u, 3u) == 5);
  ::setenv(kWorkersEnv, "two", 1);
  CHECK_THROWS_AS(resolve_workers(std::nullopt, std::nullopt), ConfigError);
  ::unsetenv(kWorkersEnv);
}

TEST_CASE("usage errors") {
  CHECK(run_args({}).code == kExitUsage);
  CHECK(run_args({"frobnicate"}).code == kExitUsage);
  CHECK(run_args({"clt"}).code == kExitUsage);
  CHECK(run_args({"clt", "--manifest", "m.json", "--workers", "lots"}).code == kExitUsage);
  CHECK(run_args({"--help"}).code == kExitPass);
}

TEST_CASE("helpers") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(255) == "00000000000000ff");
  CHECK(std::stod(format_double(0.1)) == 0.1);
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}
