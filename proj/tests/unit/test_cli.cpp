#include <doctest.h>

#include <fstream>
#include <sstream>

#include "omega_cube/acceptance.hpp"
#include "omega_cube/cli.hpp"
#include "omega_cube/examples.hpp"
#include "support.hpp"

using namespace omega_cube;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "omega-cube");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

struct Files {
  std::filesystem::path dir = testing::scratch_dir("cli");
  std::string path(const char* name) const { return (dir / name).string(); }

  Files() {
    auto seed = fixtures::seed_presentation();
    write_json_file(path("seed.json"), seed->to_json());
    write_json_file(path("quiver.json"), fixtures::composable_quiver(3)->to_json());
    write_json_file(path("groupoid2.json"), pair_groupoid(2).to_json());
    write_json_file(path("cyclic3.json"), cyclic_group(3).to_json());
    auto target = testing::seed_into_product(seed);
    write_json_file(path("product.json"), target.product->table()->to_json());
    json assign = target.assignment->map().to_json();
    assign["presentation"] = seed->to_json();
    write_json_file(path("assign.json"), assign);
  }
  ~Files() { std::filesystem::remove_all(dir); }
};

}  // namespace

TEST_CASE("cli: usage errors exit 2") {
  CHECK(invoke({"frobnicate"}).code == kExitUsage);
  CHECK(invoke({}).code == kExitUsage);
  CHECK(invoke({"validate", "/nonexistent/file.json"}).code == kExitUsage);
  CHECK(invoke({"validate"}).code == kExitUsage);
  CHECK(invoke({"--help"}).code == kExitOk);
}

TEST_CASE("cli: validate") {
  Files files;
  Result r = invoke({"validate", files.path("product.json")});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("(strict)") != std::string::npos);
  CHECK(invoke({"validate", files.path("seed.json")}).code == kExitOk);
  CHECK(invoke({"validate", files.path("groupoid2.json")}).code == kExitOk);

  // The seed's direction-2 arrow leaves a one-direction universe.
  Result low = invoke({"validate", files.path("seed.json"), "--dirs", "1", "--max-dim", "1", "--json"});
  CHECK(low.code == kExitChecksFailed);
  json j = json::parse(low.out);
  CHECK(j["config"]["max_dim"] == 1);
  CHECK(j["config"]["dir_universe"] == 1);
  CHECK(j["seed"] == kDefaultSeed);

  std::ofstream(files.path("broken.json")) << "{\"cells\": ";
  CHECK(invoke({"validate", files.path("broken.json")}).code == kExitUsage);
}

TEST_CASE("cli: decide a unit law") {
  Files files;
  Result r = invoke({"decide", files.path("seed.json"), "--t1", "comp[1](gen(f),id[1](gen(a)))", "--t2", "gen(f)",
                     "--depth", "3", "--budget", "200000", "--json"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  CHECK(j["decision"]["verdict"] == "Equal");
  CHECK(j["config"]["term_depth"] == 3);
  CHECK_FALSE(j["decision"]["trace"].empty());

  Result sep = invoke({"decide", files.path("seed.json"), "--t1", "gen(a)", "--t2", "gen(b)", "--separator",
                       files.path("product.json"), "--assign", files.path("assign.json")});
  CHECK(sep.code == kExitOk);
  CHECK(sep.out.find("verdict: NotEqual") != std::string::npos);

  CHECK(invoke({"decide", files.path("seed.json"), "--t1", "gen(nope)", "--t2", "gen(a)"}).code == kExitUsage);
}

TEST_CASE("cli: eval") {
  Files files;
  Result r = invoke({"eval", files.path("product.json"), "--assign", files.path("assign.json"), "--term",
                     "comp[1](gen(g),gen(f))", "--json"});
  REQUIRE(r.code == kExitOk);
  json j = json::parse(r.out);
  CHECK(j["value"] == "a0_0|o");
  CHECK(j["level"] == "1/1");
}

TEST_CASE("cli: product, contract, enumerate and oracle write artifacts") {
  Files files;
  Result prod = invoke({"product", files.path("groupoid2.json"), files.path("cyclic3.json"), "--max-dim", "2", "--out",
                        files.path("table.json")});
  CHECK(prod.code == kExitOk);
  StrictCategoryTable table = StrictCategoryTable::from_json(read_json_file(files.path("table.json")));
  CHECK(table.cells().level(DirectionSet::of({1, 2})).size() == 4 * 3);

  Result con = invoke({"contract", files.path("seed.json"), "--max-dim", "2", "--depth", "2", "--out",
                       files.path("contraction.json")});
  CHECK(con.code == kExitOk);
  json cj = read_json_file(files.path("contraction.json"));
  CHECK(cj["complete"] == true);
  CHECK(cj["stages"].size() == 3);

  Result en = invoke({"enumerate", files.path("seed.json"), "--depth", "1", "--json"});
  CHECK(en.code == kExitOk);
  CHECK(json::parse(en.out)["universe_size"].get<int>() > 5);

  Result orc = invoke({"oracle", files.path("quiver.json"), "--depth", "3", "--json"});
  CHECK(orc.code == kExitOk);
  CHECK(json::parse(orc.out)["oracle"]["unknown"] == 0);
  CHECK(invoke({"oracle", files.path("seed.json")}).code == kExitUsage);
}

TEST_CASE("cli: identical inputs give identical reports") {
  Files files;
  std::vector<std::string> args{"contract", files.path("seed.json"), "--depth", "2", "--json"};
  CHECK(invoke(args).out == invoke(args).out);
}
