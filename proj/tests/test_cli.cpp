#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "corpus_util.hpp"
#include "pml/frontend.hpp"

using namespace pml;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

// a scratch directory holding a private copy of a corpus file
fs::path scratch_copy(const std::string& corpus_name) {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "pml-cli-tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  fs::path dst = dir / corpus_name;
  std::ofstream(dst) << cor::read_file(cor::corpus_path(corpus_name));
  return dst;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("check accepts the corpus and rejects ill-typed input") {
  fs::path swap = scratch_copy("swap.pml");
  Run ok = cli({"check", swap.string()});
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "configurations: ok"));

  fs::path bad = swap.parent_path() / "bad.pml";
  std::ofstream(bad) << "Definition bad : nat := true.\n";
  Run r = cli({"check", bad.string()});
  CHECK(r.code == 1);
  CHECK(contains(r.err, "TypeError"));
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"bogus", "x.pml"}).code == 2);
  CHECK(cli({"check", "does-not-exist.pml"}).code == 2);
  fs::path swap = scratch_copy("swap.pml");
  CHECK(cli({"repair", swap.string(), "--from", "Old.list"}).code == 2);
  Run oob = cli({"repair", swap.string(), "--from", "Old.list", "--to", "New.list",
                 "--target", "rev_app_distr", "--mapping", "99"});
  CHECK(oob.code == 2);
  CHECK(contains(oob.err, "mapping index out of range"));
}

TEST_CASE("single-target repair emits a checking file and a replayable script") {
  fs::path swap = scratch_copy("swap.pml");
  Run r = cli({"repair", swap.string(), "--from", "Old.list", "--to", "New.list",
               "--target", "rev_app_distr", "--mapping", "0", "--suggest-tactics"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "repaired rev_app_distr -> rev_app_distr_perm_Old.list_New.list_1_0"));
  CHECK(contains(r.out, "repaired app ->"));  // the dependency closure came along

  fs::path repaired = swap.parent_path() / "swap.repaired.pml";
  fs::path script = swap.parent_path() / "swap.repaired.qtac";
  REQUIRE(fs::exists(repaired));
  REQUIRE(fs::exists(script));

  // the emitted file checks under the same frontend (self-hosting)
  CHECK(cli({"check", repaired.string()}).code == 0);

  // the sidecar script replays to a proof of the repaired statement
  LoadedFile L = load_file(load_prelude(), slurp(repaired));
  const Definition* d = L.env.definition("rev_app_distr_perm_Old.list_New.list_1_0");
  REQUIRE(d);
  QtacPtr s = parse_script(L.env, slurp(script));
  TermPtr proof = replay(L.env, Goal{Context{}, d->type}, s);
  check_type(L.env, Context{}, proof, d->type);
  CHECK(!name_occurs(d->type, "Old.list"));
  CHECK(!name_occurs(proof, "Old.list"));
}

TEST_CASE("identical runs produce byte-identical outputs") {
  fs::path swap = scratch_copy("swap.pml");
  std::vector<std::string> args = {"repair", swap.string(), "--from", "Old.list", "--to",
                                   "New.list", "--target", "rev_app_distr", "--mapping",
                                   "0", "--suggest-tactics"};
  Run r1 = cli(args);
  REQUIRE(r1.code == 0);
  std::string pml1 = slurp(swap.parent_path() / "swap.repaired.pml");
  std::string qtac1 = slurp(swap.parent_path() / "swap.repaired.qtac");
  Run r2 = cli(args);
  REQUIRE(r2.code == 0);
  CHECK(r1.out == r2.out);
  CHECK(slurp(swap.parent_path() / "swap.repaired.pml") == pml1);
  CHECK(slurp(swap.parent_path() / "swap.repaired.qtac") == qtac1);
}

TEST_CASE("a cache directory persists lifted terms across runs") {
  fs::path swap = scratch_copy("swap.pml");
  fs::path cache = swap.parent_path() / "cache";
  fs::remove_all(cache);
  fs::create_directories(cache);
  setenv("PML_CACHE_DIR", cache.c_str(), 1);
  std::vector<std::string> args = {"repair", swap.string(), "--from", "Old.list", "--to",
                                   "New.list", "--target", "rev_app_distr", "--mapping", "0"};
  Run r1 = cli(args);
  std::string pml1 = slurp(swap.parent_path() / "swap.repaired.pml");
  std::string stored = slurp(cache / "lift-cache.txt");
  Run warm = cli(args);
  unsetenv("PML_CACHE_DIR");
  REQUIRE(r1.code == 0);
  REQUIRE(warm.code == 0);
  CHECK(!stored.empty());
  CHECK(slurp(swap.parent_path() / "swap.repaired.pml") == pml1);
  CHECK(slurp(cache / "lift-cache.txt") == stored);
  CHECK(cli({"check", (swap.parent_path() / "swap.repaired.pml").string()}).code == 0);
}

TEST_CASE("repair-module ports a named set using a declared configuration") {
  fs::path swap = scratch_copy("swap.pml");
  Run r = cli({"repair-module", swap.string(), "--from", "Old.list", "--to", "New.list",
               "--target", "app", "rev", "app_nil_r", "app_assoc", "rev_app_distr",
               "rev_app_nil", "--config", "swap"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "repaired rev_app_nil -> rev_app_nil_swap"));
  CHECK(cli({"check", (swap.parent_path() / "swap.repaired.pml").string()}).code == 0);
}

TEST_CASE("annotated proofs repair through a named configuration") {
  fs::path natbin = scratch_copy("natbin.pml");
  Run r = cli({"repair", natbin.string(), "--from", "nat", "--to", "N", "--target",
               "add_n_Sm", "--config", "natbin", "--suggest-tactics"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "repaired add_n_Sm -> add_n_Sm_natbin"));
  CHECK(cli({"check", (natbin.parent_path() / "natbin.repaired.pml").string()}).code == 0);
}

TEST_CASE("transformation failures exit with code 3") {
  fs::path natbin = scratch_copy("natbin.pml");
  fs::path stuck = natbin.parent_path() / "stuck.pml";
  {
    std::istringstream in(slurp(natbin));
    std::ofstream out(stuck);
    std::string line;
    while (std::getline(in, line))
      if (line.rfind("Repair", 0) != 0 && line.rfind("Annotate", 0) != 0) out << line << "\n";
    out << "\nAxiom mystery : nat -> nat.\n"
        << "Definition uses_mystery : nat -> nat := fun (n : nat) => mystery n.\n";
  }
  Run r = cli({"repair", stuck.string(), "--from", "nat", "--to", "N", "--target",
               "uses_mystery", "--config", "natbin"});
  CHECK(r.code == 3);
  CHECK(contains(r.err, "mystery"));
}

TEST_CASE("search-config lists type-correct mappings deterministically") {
  fs::path swap = scratch_copy("swap.pml");
  Run r = cli({"search-config", swap.string(), "--from", "Old.list", "--to", "New.list"});
  CHECK(r.code == 0);
  CHECK(r.out == "0: 1 0  (name matches 2, distance 0)\n");
}

TEST_CASE("validate-config prints the report and signals failure") {
  fs::path swap = scratch_copy("swap.pml");
  Run ok = cli({"validate-config", swap.string(), "--config", "swap"});
  CHECK(ok.code == 0);
  CHECK(contains(ok.out, "configuration 'swap' is valid"));
  CHECK(cli({"validate-config", swap.string(), "--config", "nope"}).code == 2);
}

TEST_CASE("decompile prints a script and writes the sidecar") {
  fs::path swap = scratch_copy("swap.pml");
  Run r = cli({"decompile", swap.string(), "--target", "app_nil_r"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "intros T l. induction (l)."));
  CHECK(contains(r.out, "reflexivity."));
  fs::path side = swap.parent_path() / "swap.app_nil_r.qtac";
  REQUIRE(fs::exists(side));
  CHECK(slurp(side) == r.out);
}

TEST_CASE("emitted vernacular is a fixed point of load and print") {
  fs::path swap = scratch_copy("swap.pml");
  REQUIRE(cli({"repair", swap.string(), "--from", "Old.list", "--to", "New.list", "--target",
               "rev_app_distr", "--config", "swap"})
              .code == 0);
  std::string text = slurp(swap.parent_path() / "swap.repaired.pml");
  LoadedFile L = load_file(load_prelude(), text);
  std::ostringstream again;
  for (auto& c : L.commands) again << "\n" << print_vernacular(c);
  // every printed command appears verbatim in the emitted file
  CHECK(contains(text, again.str().substr(1)));
}

TEST_CASE("a file configuration is picked up when neither flag is given") {
  fs::path swap = scratch_copy("swap.pml");
  Run r = cli({"repair", swap.string(), "--from", "Old.list", "--to", "New.list", "--target",
               "app_nil_r"});
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "repaired app_nil_r -> app_nil_r_swap"));
}
