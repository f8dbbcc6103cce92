#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "affhecke/cocenter.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace ahk;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

std::string bin() {
  const char* b = std::getenv("AFFHECKE_BIN");
  return b ? b : "./affhecke";
}

Run run(const std::string& args, const std::string& cache) {
  std::string cmd = bin() + " --cache " + cache + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("affhecke-test-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d.string();
}

}  // namespace

TEST_CASE("length and validate") {
  std::string c = fresh_dir("len");
  Run r = run("--datum preset:GL8 length --elt \"t[1,1,1,1,1,0,0,0]*(1 6 3)(2 7 4 8 5)\" --oracle", c);
  CHECK(r.code == 0);
  CHECK(r.out == "1 1\n");
  r = run("--datum preset:GL3 validate", c);
  CHECK(r.code == 0);
  CHECK(nlohmann::json::parse(r.out)["valid"] == true);
}

TEST_CASE("usage errors exit with 1") {
  std::string c = fresh_dir("usage");
  CHECK(run("--datum preset:GL3 length --elt \"t[1,0]\"", c).code == 1);
  CHECK(run("--datum preset:XX validate", c).code == 1);
  CHECK(run("frobnicate", c).code == 1);
  CHECK(run("--datum preset:GL3 classes", c).code == 1);
}

TEST_CASE("classpoly matches the library and the cache is transparent") {
  std::string c = fresh_dir("cp");
  std::string args = "--datum preset:GL3 classpoly --elt \"t[1,0,0]*(1 2)\" --elt \"(1 3)\"";
  Run cold = run(args, c);
  REQUIRE(cold.code == 0);
  Run warm = run(args, c);
  CHECK(warm.out == cold.out);
  Run none = run("--no-cache " + args, c);
  CHECK(none.out == cold.out);

  Engine E(preset("GL3"));
  ConjugacyLab lab(E);
  Cocenter cc(lab);
  nlohmann::json j = nlohmann::json::parse(cold.out);
  for (size_t i = 0; i < 2; ++i) {
    Elt w = E.parse(j[i]["elt"].get<std::string>());
    nlohmann::json lib = classpolys_json(lab, cc.class_polynomials(w));
    lib["elt"] = E.format(w);
    CHECK(j[i] == lib);
  }

  // damage one entry: it is skipped, recomputed, and gc drops it
  fs::path file;
  for (const auto& e : fs::directory_iterator(c)) file = e.path();
  REQUIRE(!file.empty());
  std::ifstream in(file);
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  size_t digit = text.find_first_of("0123456789", text.find('\n') + 1);
  text[digit] = text[digit] == '9' ? '8' : static_cast<char>(text[digit] + 1);
  std::ofstream(file, std::ios::trunc) << text;
  Run after = run(args, c);
  CHECK(after.out == cold.out);
  Run gc = run("cache gc", c);
  CHECK(gc.code == 0);
  CHECK(nlohmann::json::parse(gc.out)["dropped_entries"].get<int>() >= 1);
  fs::remove_all(c);
}

TEST_CASE("verification commands") {
  std::string c = fresh_dir("verify");
  Run vc = run("--datum preset:GL3 verify-c --max-len 4", c);
  CHECK(vc.code == 0);
  auto j = nlohmann::json::parse(vc.out);
  CHECK(j["failures"] == 0);
  CHECK(j["checked"].get<int>() > 0);
  Run vc2 = run("--datum preset:GL3 verify-c --max-len 4", c);
  CHECK(vc2.out == vc.out);
  CHECK(run("--datum preset:GL3 verify-a --max-len 3", c).code == 0);
  CHECK(run("--datum preset:GL3 verify-b --max-len 3", c).code == 0);
  Run one = run("--datum preset:GL3 verify-c --elt \"t[2,1,0]\" --J \"\" --z 1", c);
  CHECK(one.code == 0);
  CHECK(run("--datum preset:GL3 verify-c --elt \"(1 2)\" --J \"\" --z 1", c).code == 1);
  Run bd = run("--datum preset:GL8 --no-cache bernstein-datum --elt \"t[1,1,1,1,1,0,0,0]*(1 6 3)(2 7 4 8 5)\"", c);
  CHECK(bd.code == 0);
  CHECK(nlohmann::json::parse(bd.out)["special_form"]["lambda"] == nlohmann::json({1, 1, 0, 1, 1, 1, 0, 0}));
  fs::remove_all(c);
}

TEST_CASE("tables") {
  std::string c = fresh_dir("tables");
  Run d = run("--datum preset:GL3 adlv-dim --elt \"(1 3)\"", c);
  CHECK(d.code == 0);
  CHECK(d.out.rfind("element,nu_bar,kappa,dimension,contributing_classes\n", 0) == 0);
  Run e = run("--datum preset:GL3 adlv-empty --max-len 3 --proper", c);
  CHECK(e.code == 0);
  CHECK(nlohmann::json::parse(e.out)["disagreements"] == 0);
  Run cl = run("--datum preset:C2 --format csv classes --max-len 3", c);
  CHECK(cl.code == 0);
  CHECK(cl.out.rfind("min_rep,min_len,nu_bar,kappa,elements\n", 0) == 0);
  Run pa = run("--datum preset:C2 palcove-scan --max-len 2", c);
  CHECK(pa.code == 0);
  CHECK(!nlohmann::json::parse(pa.out)["triples"].empty());
  fs::remove_all(c);
}
