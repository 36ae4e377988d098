// Writes the JSON inputs used by the command-line tests and the README.
#include <filesystem>
#include <iostream>

#include "omega_cube/cli.hpp"
#include "omega_cube/examples.hpp"

using namespace omega_cube;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: write_fixtures <dir>\n";
    return 2;
  }
  std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const json& j) { write_json_file((dir / name).string(), j); };

  put("seed.json", fixtures::seed_presentation()->to_json());
  put("quiver.json", fixtures::composable_quiver(5)->to_json());
  put("exchange.json", fixtures::exchange_square()->to_json());
  put("groupoid2.json", pair_groupoid(2).to_json());
  put("cyclic3.json", cyclic_group(3).to_json());

  // A 2-factor product, with the seed presentation mapped into it.
  TruncationConfig cfg{2, 2, 3, 200000};
  ProductTable product = build_product({pair_groupoid(2), cyclic_group(3)}, cfg);
  put("product.json", product.table()->to_json());

  auto seed = fixtures::seed_presentation();
  const auto& g = product.factors()[0];
  const auto& c = product.factors()[1];
  std::string a = product.table()->name(product.cell(DirectionSet{}, {g.object("o0"), 0}));
  std::string b = product.table()->name(product.cell(DirectionSet{}, {g.object("o1"), 0}));
  std::string f = product.table()->name(product.cell(DirectionSet::of({1}), {g.arrow("a1_0"), 0}));
  std::string gb = product.table()->name(product.cell(DirectionSet::of({1}), {g.arrow("a0_1"), 0}));
  std::string k = product.table()->name(product.cell(DirectionSet::of({2}), {g.object("o0"), c.arrow("g1")}));
  json map{{"0/", {{"a", a}, {"b", b}}}, {"1/1", {{"f", f}, {"g", gb}}}, {"1/2", {{"k", k}}}};
  put("assign.json", json{{"presentation", seed->to_json()}, {"map", map}});
  return 0;
}
