#include <doctest.h>

#include "omega_cube/contraction.hpp"
#include "omega_cube/examples.hpp"
#include "support.hpp"

using namespace omega_cube;

namespace {

ContractionPtr contraction_of(PresentationPtr p, int depth) {
  TruncationConfig cfg = p->config();
  cfg.term_depth = depth;
  return std::make_shared<ContractionData>(build_free_contraction(p, cfg));
}

// Two parallel arrows f, g: a -> b in direction 1.
PresentationPtr parallel_pair() {
  auto p = std::make_shared<Presentation>(TruncationConfig{2, 2, 2, 200000});
  CellId a = p->add_cell(DirectionSet{}, "a");
  CellId b = p->add_cell(DirectionSet{}, "b");
  for (const char* n : {"f", "g"}) {
    CellId e = p->add_cell(DirectionSet::of({1}), n);
    p->set_face(e, 1, Side::source, a);
    p->set_face(e, 1, Side::target, b);
  }
  return p;
}

// One object o with loops u in direction 1 and v in direction 2.
PresentationPtr loops() {
  auto p = std::make_shared<Presentation>(TruncationConfig{2, 2, 2, 200000});
  CellId o = p->add_cell(DirectionSet{}, "o");
  CellId u = p->add_cell(DirectionSet::of({1}), "u");
  CellId v = p->add_cell(DirectionSet::of({2}), "v");
  p->set_face(u, 1, Side::source, o);
  p->set_face(u, 1, Side::target, o);
  p->set_face(v, 2, Side::source, o);
  p->set_face(v, 2, Side::target, o);
  return p;
}

// Index of an off-diagonal entry whose two sides share every transverse face.
std::optional<std::size_t> swappable_entry(const ContractionData& cd) {
  TermStore& s = cd.store();
  for (std::size_t i = 0; i < cd.kappa_table().size(); ++i) {
    const KappaEntry& e = cd.kappa_table()[i];
    if (e.left == e.right) continue;
    bool same = true;
    for (Direction d : s.node(e.left).dirs.to_vector())
      for (Side side : {Side::source, Side::target})
        same = same && s.boundary(e.left, d, side) == s.boundary(e.right, d, side);
    if (same && cd.kappa(e.dir, e.right, e.left)) return i;
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("level-1 kappa coincides with reflectors") {
  auto cd = contraction_of(fixtures::seed_presentation(), 3);
  TermStore& s = cd->store();
  for (const char* name : {"a", "b"}) {
    TermId x = s.gen(*s.presentation().resolve(name));
    for (Direction d : {1, 2}) {
      auto k = cd->kappa(d, x, x);
      REQUIRE(k.has_value());
      CHECK(*k == s.refl(d, x));
    }
    // Distinct 0-generators are never identified.
    TermId other = s.gen(*s.presentation().resolve(std::string(name) == "a" ? "b" : "a"));
    CHECK_FALSE(cd->kappa(1, x, other).has_value());
  }
}

TEST_CASE("no kappa over unrelated parallel generators") {
  auto p = parallel_pair();
  auto cd = contraction_of(p, 2);
  TermStore& s = cd->store();
  TermId f = s.gen(*p->resolve("f"));
  TermId g = s.gen(*p->resolve("g"));
  CHECK_FALSE(cd->same_class(f, g));
  CHECK_FALSE(cd->kappa(2, f, g).has_value());

  // A model in which f and g differ confirms the two classes are distinct.
  auto product = std::make_shared<ProductTable>(std::vector<InvolutiveOneCategory>{cyclic_group(2), terminal_category()},
                                                TruncationConfig{2, 2, 2, 200000});
  SetMorphism m(p, product->table()->cells_ptr());
  m.set(*p->resolve("a"), product->cell(DirectionSet{}, {0, 0}));
  m.set(*p->resolve("b"), product->cell(DirectionSet{}, {0, 0}));
  m.set(*p->resolve("f"), product->cell(DirectionSet::of({1}), {0, 0}));
  m.set(*p->resolve("g"), product->cell(DirectionSet::of({1}), {1, 0}));
  auto a = std::make_shared<const GeneratorAssignment>(m, product->table());
  Decision d = decide_equal(cd->session(), f, g, {make_contraction_separator(s, a, "z2")});
  CHECK(d.verdict == Verdict::not_equal);
}

TEST_CASE("unitality pair gets a kappa cell with the two terms as faces") {
  auto cd = contraction_of(fixtures::seed_presentation(), 3);
  TermStore& s = cd->store();
  TermId lhs = parse_term(s, "comp[1](gen(f),id[1](gen(a)))");
  TermId f = parse_term(s, "gen(f)");
  REQUIRE(cd->same_class(lhs, f));
  auto k = cd->kappa(2, lhs, f);
  REQUIRE(k.has_value());
  CHECK(s.node(*k).kind == TermKind::kappa);
  CHECK(s.boundary(*k, 2, Side::source) == lhs);
  CHECK(s.boundary(*k, 2, Side::target) == f);
  CHECK(cd->same_class(*k, s.refl(2, lhs)));
}

TEST_CASE("fresh free contraction validates and every stage is complete") {
  auto cd = contraction_of(fixtures::seed_presentation(), 3);
  Report r = validate_contraction(*cd);
  CHECK(r.ok());
  CHECK(r.checked > 0);
  REQUIRE(cd->stages().size() == 3);
  CHECK(cd->stages()[0].kappa_entries == 0);
  for (const auto& st : cd->stages()) {
    CHECK(st.complete());
    CHECK(st.monotone);
  }
  CHECK(cd->complete());
  CHECK(check_cubical_on_terms(cd->universe()).ok());

  json j = cd->to_json();
  for (const char* key : {"config", "stages", "complete", "level_counts", "universe", "kappa", "classes"})
    CHECK(j.contains(key));
}

TEST_CASE("swapped kappa faces give two face violations") {
  auto cd = contraction_of(fixtures::seed_presentation(), 3);
  auto i = swappable_entry(*cd);
  REQUIRE(i.has_value());
  const KappaEntry e = cd->kappa_table()[*i];
  cd->set_kappa_cell(*i, *cd->kappa(e.dir, e.right, e.left));
  Report r = validate_contraction(*cd);
  CHECK(r.violations.size() == 2);
  CHECK(r.count("kappa-source") == 1);
  CHECK(r.count("kappa-target") == 1);
}

TEST_CASE("erased kappa entry is a domain violation") {
  auto cd = contraction_of(fixtures::seed_presentation(), 3);
  std::size_t off = 0;
  while (cd->kappa_table()[off].left == cd->kappa_table()[off].right) ++off;
  cd->erase_kappa(off);
  Report r = validate_contraction(*cd);
  CHECK(r.count("kappa-domain") == 1);
}

TEST_CASE("planted non-degenerate diagonal entry") {
  auto cd = contraction_of(fixtures::seed_presentation(), 3);
  std::size_t diag = 0;
  while (cd->kappa_table()[diag].left != cd->kappa_table()[diag].right) ++diag;
  std::size_t off = 0;
  while (cd->kappa_table()[off].left == cd->kappa_table()[off].right) ++off;
  cd->set_kappa_cell(diag, cd->kappa_table()[off].cell);
  CHECK(validate_contraction(*cd).count("kappa-degeneracy") >= 1);
}

TEST_CASE("unit: generators map to their own terms and commute with faces") {
  auto p = fixtures::seed_presentation();
  auto cd = contraction_of(p, 2);
  MagmaCells magma = magma_cells(*cd);
  SetMorphism eta = unit_eta(*cd, magma);
  CHECK(validate_morphism(eta).ok());
  CHECK(validate_quiver(*magma.cells).ok());
  CHECK(validate_cubical_axioms(*magma.cells).ok());
  TermStore& s = cd->store();
  for (CellId x = 0; x < p->size(); ++x) {
    CHECK(eta(x) == magma.cell_of.at(s.gen(x)));
    for (CellId y = x + 1; y < p->size(); ++y)
      if (p->cell(x).dirs == p->cell(y).dirs) CHECK_FALSE(cd->same_class(s.gen(x), s.gen(y)));
  }
}

TEST_CASE("free functor on the identity is the identity") {
  auto p = fixtures::seed_presentation();
  auto cd = contraction_of(p, 2);
  ContractionMorphism phi = free_on_morphism(SetMorphism::identity(p), cd, cd);
  for (TermId t : cd->universe().terms()) CHECK(phi.map_term(t) == t);
  CHECK(phi.check().ok());
}

TEST_CASE("free functor preserves reflectors and is natural") {
  auto src = fixtures::seed_presentation();
  auto tgt = loops();
  SetMorphism f(src, tgt);
  for (const char* n : {"a", "b"}) f.set(*src->resolve(n), *tgt->resolve("o"));
  for (const char* n : {"f", "g"}) f.set(*src->resolve(n), *tgt->resolve("u"));
  f.set(*src->resolve("k"), *tgt->resolve("v"));
  REQUIRE(validate_morphism(f).ok());
  auto cs = contraction_of(src, 2);
  auto ct = contraction_of(tgt, 2);
  ContractionMorphism phi = free_on_morphism(f, cs, ct);
  TermStore& ss = cs->store();
  TermStore& ts = ct->store();
  TermId o = ts.gen(*tgt->resolve("o"));
  CHECK(phi.map_term(ss.refl(1, ss.gen(*src->resolve("a")))) == ts.refl(1, o));
  CHECK(phi.map_term(ss.gen(*src->resolve("f"))) == ts.gen(*tgt->resolve("u")));
  Report r = phi.check();
  CHECK(r.ok());
  CHECK(r.checked > 0);
}
