#pragma once

#include <unistd.h>

#include <filesystem>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "omega_cube/examples.hpp"
#include "omega_cube/presentation.hpp"
#include "omega_cube/strict.hpp"

namespace omega_cube::testing {

inline constexpr std::uint64_t kTestSeed = 20240611;

/// A unique scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("omega_cube_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

/// Random valid cubical set of dimension <= 2 over directions {1,2}: random
/// 0-cells, random 1-cells in each direction, and 2-cells assembled from
/// squares whose corners agree.
inline std::shared_ptr<Presentation> random_cubical_set(std::mt19937_64& rng, int objects, int edges, int squares) {
  auto p = std::make_shared<Presentation>(TruncationConfig{2, 2, 2, 200000});
  std::uniform_int_distribution<int> pick_obj(0, objects - 1);
  std::vector<CellId> obj;
  for (int i = 0; i < objects; ++i) obj.push_back(p->add_cell(DirectionSet{}, "o" + std::to_string(i)));
  std::vector<CellId> h, v;  // direction 1 and direction 2 edges
  for (int i = 0; i < edges; ++i) {
    for (int dir : {1, 2}) {
      CellId e = p->add_cell(DirectionSet::of({dir}), (dir == 1 ? "h" : "v") + std::to_string(i));
      p->set_face(e, dir, Side::source, obj[pick_obj(rng)]);
      p->set_face(e, dir, Side::target, obj[pick_obj(rng)]);
      (dir == 1 ? h : v).push_back(e);
    }
  }
  std::uniform_int_distribution<std::size_t> pick_h(0, h.size() - 1), pick_v(0, v.size() - 1);
  int made = 0;
  for (int attempt = 0; attempt < 20000 && made < squares; ++attempt) {
    // Direction-1 faces are direction-2 edges and vice versa.
    CellId s1 = v[pick_v(rng)], t1 = v[pick_v(rng)];
    CellId s2 = h[pick_h(rng)], t2 = h[pick_h(rng)];
    auto f = [&](CellId c, int d, Side s) { return p->raw_face(c, d, s); };
    bool ok = f(s1, 2, Side::source) == f(s2, 1, Side::source) && f(t1, 2, Side::target) == f(t2, 1, Side::target) &&
              f(t1, 2, Side::source) == f(s2, 1, Side::target) && f(s1, 2, Side::target) == f(t2, 1, Side::source);
    if (!ok) continue;
    CellId sq = p->add_cell(DirectionSet::of({1, 2}), "sq" + std::to_string(made++));
    p->set_face(sq, 1, Side::source, s1);
    p->set_face(sq, 1, Side::target, t1);
    p->set_face(sq, 2, Side::source, s2);
    p->set_face(sq, 2, Side::target, t2);
  }
  return p;
}

/// Independent check of the four face identities on the 2-cells of a
/// presentation over directions {1,2}: returns the (cell, identity) failures.
inline std::set<std::pair<std::string, std::string>> square_identity_failures(const Presentation& p) {
  std::set<std::pair<std::string, std::string>> out;
  for (CellId c : p.level(DirectionSet::of({1, 2}))) {
    auto f = [&](CellId x, int d, Side s) { return p.raw_face(x, d, s); };
    // Corner reached by first taking the direction-1 face then the direction-2 face, both ways round.
    struct Case {
      const char* name;
      Side side1, side2;
    };
    for (Case k : {Case{"ss", Side::source, Side::source}, Case{"tt", Side::target, Side::target},
                   Case{"st", Side::target, Side::source}, Case{"ts", Side::source, Side::target}}) {
      if (f(f(c, 1, k.side1), 2, k.side2) != f(f(c, 2, k.side2), 1, k.side1)) out.insert({p.cell(c).name, k.name});
    }
  }
  return out;
}

/// The seed presentation mapped into pair_groupoid(2) x cyclic_group(3):
/// a, b to the two objects, f and g to the two non-identity arrows, k to g1.
struct SeedIntoProduct {
  std::shared_ptr<ProductTable> product;
  std::shared_ptr<const GeneratorAssignment> assignment;
};

inline SeedIntoProduct seed_into_product(PresentationPtr seed) {
  auto product = std::make_shared<ProductTable>(
      std::vector<InvolutiveOneCategory>{pair_groupoid(2), cyclic_group(3)}, TruncationConfig{2, 2, 3, 200000});
  const auto& g = product->factors()[0];
  const auto& c = product->factors()[1];
  const auto d0 = DirectionSet{};
  const auto d1 = DirectionSet::of({1});
  const auto d2 = DirectionSet::of({2});
  SetMorphism m(seed, product->table()->cells_ptr());
  m.set(*seed->find(d0, "a"), product->cell(d0, {g.object("o0"), 0}));
  m.set(*seed->find(d0, "b"), product->cell(d0, {g.object("o1"), 0}));
  m.set(*seed->find(d1, "f"), product->cell(d1, {g.arrow("a1_0"), 0}));
  m.set(*seed->find(d1, "g"), product->cell(d1, {g.arrow("a0_1"), 0}));
  m.set(*seed->find(d2, "k"), product->cell(d2, {g.object("o0"), c.arrow("g1")}));
  return {product, std::make_shared<const GeneratorAssignment>(std::move(m), product->table())};
}

}  // namespace omega_cube::testing
