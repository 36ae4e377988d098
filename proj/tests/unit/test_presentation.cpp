#include <doctest.h>

#include "omega_cube/examples.hpp"
#include "omega_cube/presentation.hpp"
#include "support.hpp"

using namespace omega_cube;

namespace {

// Square over corners w, x, y, z with both face pairs consistent.
std::shared_ptr<Presentation> good_square() {
  auto p = std::make_shared<Presentation>(TruncationConfig{2, 2, 2, 1000});
  const auto d0 = DirectionSet{};
  const auto d1 = DirectionSet::of({1});
  const auto d2 = DirectionSet::of({2});
  CellId w = p->add_cell(d0, "w"), x = p->add_cell(d0, "x"), y = p->add_cell(d0, "y"), z = p->add_cell(d0, "z");
  CellId p1 = p->add_cell(d2, "p1"), p2 = p->add_cell(d2, "p2");
  CellId q1 = p->add_cell(d1, "q1"), q2 = p->add_cell(d1, "q2");
  p->set_face(p1, 2, Side::source, w);
  p->set_face(p1, 2, Side::target, x);
  p->set_face(p2, 2, Side::source, y);
  p->set_face(p2, 2, Side::target, z);
  p->set_face(q1, 1, Side::source, w);
  p->set_face(q1, 1, Side::target, y);
  p->set_face(q2, 1, Side::source, x);
  p->set_face(q2, 1, Side::target, z);
  CellId alpha = p->add_cell(DirectionSet::of({1, 2}), "alpha");
  p->set_face(alpha, 1, Side::source, p1);
  p->set_face(alpha, 1, Side::target, p2);
  p->set_face(alpha, 2, Side::source, q1);
  p->set_face(alpha, 2, Side::target, q2);
  return p;
}

}  // namespace

TEST_CASE("direction sets are canonical") {
  auto a = DirectionSet::of({2, 1});
  auto b = DirectionSet::of({1, 2, 2});
  CHECK(a == b);
  CHECK(a.str() == "1,2");
  CHECK(DirectionSet::parse("1,2") == a);
  CHECK_THROWS_AS(DirectionSet::parse("2,1"), LoadError);
  CHECK(a.size() == 2);
  CHECK(a.index_of(2) == 1);
  CHECK_THROWS_AS(DirectionSet::of({0}), UsageError);
  CHECK_THROWS_AS(DirectionSet::of({33}), UsageError);
  CHECK(level_key(a) == "2/1,2");
  CHECK(parse_level_key("2/1,2") == a);
  CHECK_THROWS_AS(parse_level_key("3/1,2"), LoadError);
}

TEST_CASE("truncation config validation") {
  CHECK_NOTHROW(TruncationConfig{2, 2, 3, 10}.validate());
  CHECK_THROWS_AS((TruncationConfig{3, 2, 3, 10}.validate()), UsageError);
  CHECK_THROWS_AS((TruncationConfig{1, 1, 3, 0}.validate()), UsageError);
  auto cfg = TruncationConfig::from_json(json{{"max_dim", 1}, {"dir_universe", 3}});
  CHECK(cfg.max_dim == 1);
  CHECK(cfg.dir_universe == 3);
  CHECK(cfg.term_depth == TruncationConfig{}.term_depth);
  CHECK_THROWS_AS(TruncationConfig::from_json(json{{"max_dim", 4}, {"dir_universe", 2}}), LoadError);
}

TEST_CASE("single 0-cell is a valid quiver") {
  Presentation p(TruncationConfig{1, 1, 1, 10});
  p.add_cell(DirectionSet{}, "a");
  CHECK(validate_quiver(p).ok());
  CHECK(validate_cubical_axioms(p).ok());
}

TEST_CASE("face pointing into the wrong level is a typing violation naming the entry") {
  Presentation p(TruncationConfig{1, 1, 1, 10});
  CellId a = p.add_cell(DirectionSet{}, "a");
  CellId f = p.add_cell(DirectionSet::of({1}), "f");
  CellId g = p.add_cell(DirectionSet::of({1}), "g");
  p.set_face(f, 1, Side::source, g);
  p.set_face(f, 1, Side::target, a);
  p.set_face(g, 1, Side::source, a);
  p.set_face(g, 1, Side::target, a);
  Report r = validate_quiver(p);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].tag == "face-typing");
  CHECK(r.violations[0].witnesses.at(0) == "1/1/1/s:f");
}

TEST_CASE("missing faces are reported") {
  Presentation p(TruncationConfig{1, 1, 1, 10});
  p.add_cell(DirectionSet{}, "a");
  p.add_cell(DirectionSet::of({1}), "f");
  Report r = validate_quiver(p);
  CHECK(r.count("missing-face") == 2);
}

TEST_CASE("malformed identifiers are load errors") {
  Presentation p;
  CHECK_THROWS_AS(p.add_cell(DirectionSet{}, "a(b"), LoadError);
  CHECK_THROWS_AS(p.add_cell(DirectionSet{}, ""), LoadError);
  json doc{{"cells", {{"0/", {"a", "a,b"}}}}, {"faces", json::object()}};
  CHECK_THROWS_AS(Presentation::from_json(doc), LoadError);
}

TEST_CASE("presentation json round trip") {
  auto p = fixtures::seed_presentation();
  json j = p->to_json();
  Presentation back = Presentation::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.size() == p->size());
  CHECK(validate_quiver(back).ok());
}

TEST_CASE("cubical axioms: vacuous below dimension 2") {
  auto p = fixtures::composable_quiver();
  CHECK(validate_cubical_axioms(*p).ok());
  CHECK(validate_cubical_axioms(*p).checked == 0);
}

TEST_CASE("cubical axioms: a consistent square passes and one moved corner is one violation") {
  auto p = good_square();
  CHECK(validate_quiver(*p).ok());
  CHECK(validate_cubical_axioms(*p).ok());

  // Moving the source of q1 from w to x only disturbs the source-source corner.
  auto q1 = *p->find(DirectionSet::of({1}), "q1");
  p->set_face(q1, 1, Side::source, *p->find(DirectionSet{}, "x"));
  Report r = validate_cubical_axioms(*p);
  REQUIRE(r.violations.size() == 1);
  CHECK(r.violations[0].tag == "cubical-ss");
  CHECK(r.violations[0].witnesses.at(0) == "alpha");
}

TEST_CASE("product-derived presentation is valid up to dimension 2") {
  ProductTable prod = build_product({pair_groupoid(2), cyclic_group(3)}, TruncationConfig{2, 2, 2, 1000});
  const Presentation& p = prod.table()->cells();
  CHECK(validate_quiver(p).ok());
  CHECK(validate_cubical_axioms(p).ok());
}

TEST_CASE("enumerate_cells") {
  // Two factors with 2 and 3 objects; the second has 9 arrows.
  ProductTable prod = build_product({pair_groupoid(2), pair_groupoid(3)}, TruncationConfig{2, 2, 2, 1000});
  const Presentation& p = prod.table()->cells();
  CHECK(enumerate_cells(p, 0, DirectionSet{}).size() == 2 * 3);
  CHECK(enumerate_cells(p, 1, DirectionSet::of({2})).size() == 2 * 9);
  CHECK(enumerate_cells(p, 1, DirectionSet::of({1})).size() == 4 * 3);
  CHECK(enumerate_cells(p, 2, DirectionSet::of({1, 2})).size() == 4 * 9);
  CHECK_THROWS_AS(enumerate_cells(p, 1, DirectionSet::of({3})), UsageError);

  auto empty = fixtures::empty_presentation();
  CHECK(enumerate_cells(*empty, 0, DirectionSet{}).empty());
  CHECK(enumerate_cells(*empty, 1, DirectionSet::of({1})).empty());
}

TEST_CASE("identity morphism is valid") {
  auto p = fixtures::seed_presentation();
  CHECK(validate_morphism(SetMorphism::identity(p)).ok());
}

TEST_CASE("constant map onto one 0-cell") {
  auto src = std::make_shared<Presentation>(TruncationConfig{0, 1, 1, 10});
  src->add_cell(DirectionSet{}, "a");
  src->add_cell(DirectionSet{}, "b");
  src->add_cell(DirectionSet{}, "c");
  auto tgt = std::make_shared<Presentation>(TruncationConfig{0, 1, 1, 10});
  CellId star = tgt->add_cell(DirectionSet{}, "pt");
  SetMorphism f(src, tgt);
  for (CellId c = 0; c < src->size(); ++c) f.set(c, star);
  CHECK(validate_morphism(f).ok());
}

TEST_CASE("morphism that breaks a face names the direction") {
  auto src = fixtures::composable_quiver();
  auto tgt = fixtures::composable_quiver();
  SetMorphism f = SetMorphism::identity(src);
  SetMorphism bad(src, tgt);
  for (CellId c = 0; c < src->size(); ++c) bad.set(c, f(c));
  // f: a -> b goes to g: b -> c; both endpoints now disagree.
  bad.set(*src->find(DirectionSet::of({1}), "f"), *tgt->find(DirectionSet::of({1}), "g"));
  Report r = validate_morphism(bad);
  CHECK(r.count("face-commutation") == 2);
  for (const auto& v : r.violations) {
    CHECK(v.witnesses.at(0) == "f");
    CHECK(v.witnesses.at(1) == "1");
  }
  CHECK_THROWS_AS(bad.set(*src->find(DirectionSet{}, "a"), *tgt->find(DirectionSet::of({1}), "g")), LoadError);
}

TEST_CASE("morphism json round trip") {
  auto p = fixtures::seed_presentation();
  SetMorphism id = SetMorphism::identity(p);
  SetMorphism back = SetMorphism::from_json(id.to_json(), p, p);
  for (CellId c = 0; c < p->size(); ++c) CHECK(back(c) == c);
}

TEST_CASE("random morphisms are valid") {
  std::mt19937_64 rng(testing::kTestSeed);
  auto src = fixtures::composable_quiver();
  auto tgt = fixtures::seed_presentation();
  for (int i = 0; i < 10; ++i) {
    auto f = random_morphism(src, tgt, rng);
    REQUIRE(f.has_value());
    CHECK(validate_morphism(*f).ok());
  }
}
