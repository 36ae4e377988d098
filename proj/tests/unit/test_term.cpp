#include <doctest.h>

#include "omega_cube/acceptance.hpp"
#include "omega_cube/examples.hpp"
#include "omega_cube/term.hpp"

using namespace omega_cube;

namespace {

PresentationPtr one_point(int max_dim, int dirs) {
  auto p = std::make_shared<Presentation>(TruncationConfig{max_dim, dirs, 3, 1000});
  p->add_cell(DirectionSet{}, "a");
  return p;
}

PresentationPtr loop() {
  auto p = std::make_shared<Presentation>(TruncationConfig{1, 1, 3, 1000});
  CellId a = p->add_cell(DirectionSet{}, "a");
  CellId f = p->add_cell(DirectionSet::of({1}), "f");
  p->set_face(f, 1, Side::source, a);
  p->set_face(f, 1, Side::target, a);
  return p;
}

TermId cell(TermStore& s, std::string_view name) { return s.gen(*s.presentation().resolve(name)); }

}  // namespace

TEST_CASE("reflector of a 0-cell is a 1-dimensional term") {
  TermStore s(one_point(1, 1));
  TermId r = s.refl(1, cell(s, "a"));
  CHECK(s.node(r).dim() == 1);
  CHECK(s.node(r).dirs == DirectionSet::of({1}));
  CHECK(s.print(r) == "id[1](gen(a))");
  CHECK_THROWS_AS(s.refl(1, r), TypingError);
}

TEST_CASE("composition domain follows source of left = target of right") {
  TermStore s(fixtures::composable_quiver());
  TermId f = cell(s, "f");
  TermId g = cell(s, "g");
  TermId gf = s.comp(1, g, f);
  CHECK(s.print(gf) == "comp[1](gen(g),gen(f))");
  CHECK(s.boundary(gf, 1, Side::source) == cell(s, "a"));
  CHECK(s.boundary(gf, 1, Side::target) == cell(s, "c"));

  try {
    (void)s.comp(1, f, f);
    FAIL("expected a composability error");
  } catch (const TypingError& e) {
    CHECK(e.kind == TypingError::Kind::composability);
    CHECK(e.left == cell(s, "a"));
    CHECK(e.right == cell(s, "b"));
  }
  CHECK_FALSE(s.try_comp(1, f, f).has_value());
}

TEST_CASE("boundary rules") {
  TermStore s(fixtures::seed_presentation());
  TermId a = cell(s, "a");
  TermId f = cell(s, "f");
  CHECK(s.boundary(s.refl(1, a), 1, Side::source) == a);
  CHECK(s.boundary(s.refl(1, a), 1, Side::target) == a);
  CHECK(s.boundary(s.dual(1, f), 1, Side::source) == s.boundary(f, 1, Side::target));
  CHECK(s.boundary(s.dual(1, f), 1, Side::target) == s.boundary(f, 1, Side::source));

  TermId g = cell(s, "g");
  TermId fg = s.comp(1, f, g);
  CHECK(s.boundary(fg, 1, Side::source) == s.boundary(g, 1, Side::source));
  CHECK(s.boundary(fg, 1, Side::target) == s.boundary(f, 1, Side::target));

  // Transverse faces of a reflector and a dual are taken inside.
  TermId rf = s.refl(2, f);
  CHECK(s.boundary(rf, 1, Side::source) == s.refl(2, a));
  TermId drf = s.dual(1, rf);
  CHECK(s.boundary(drf, 2, Side::source) == s.dual(1, f));
  CHECK_THROWS_AS(s.boundary(f, 2, Side::source), UsageError);
}

TEST_CASE("parse and print round trip exactly") {
  TermStore s(fixtures::seed_presentation());
  for (const char* text : {"gen(a)", "id[1](gen(a))", "dual[1](gen(f))", "comp[1](gen(f),gen(g))",
                           "id[2](comp[1](gen(g),gen(f)))", "dual[2](id[2](gen(f)))", "comp[2](gen(k),gen(k))"}) {
    TermId t = parse_term(s, text);
    CHECK(s.print(t) == text);
    CHECK(print_expr(parse_expr(text)) == text);
    CHECK(print_expr(to_expr(s, t)) == text);
  }
  CHECK(print_expr(parse_expr(" comp[1]( gen(f) , gen(g) ) ")) == "comp[1](gen(f),gen(g))");
}

TEST_CASE("construct rejections") {
  TermStore s(fixtures::seed_presentation());
  auto kind_of = [&](const char* text) {
    try {
      (void)parse_term(s, text);
    } catch (const TypingError& e) {
      return static_cast<int>(e.kind);
    } catch (const Error&) {
      return -1;
    }
    return -2;
  };
  CHECK(kind_of("id[1](gen(f))") == static_cast<int>(TypingError::Kind::direction));
  CHECK(kind_of("dual[2](gen(f))") == static_cast<int>(TypingError::Kind::direction));
  CHECK(kind_of("gen(nope)") == static_cast<int>(TypingError::Kind::unknown_cell));
  CHECK(kind_of("kappa[1](gen(a),gen(b))") == static_cast<int>(TypingError::Kind::kappa_in_magma));
  CHECK(kind_of("id[2](id[1](id[3](gen(a))))") != -2);
  CHECK(kind_of("comp[1](gen(f)") != -2);
  CHECK(kind_of("comp[1](gen(f),gen(f))") == static_cast<int>(TypingError::Kind::composability));
}

TEST_CASE("kappa needs a certificate and distinct sides") {
  TermStore s(fixtures::seed_presentation());
  TermId a = cell(s, "a");
  TermId b = cell(s, "b");
  PiCertificate none;
  CHECK_THROWS_AS(s.kappa(1, a, b, none), TypingError);
  PiCertificate cert{7, 0, a, b};
  TermId k = s.kappa(1, a, b, cert);
  CHECK(s.boundary(k, 1, Side::source) == a);
  CHECK(s.boundary(k, 1, Side::target) == b);
  CHECK(s.contains_kappa(k));
  CHECK(s.certificate(k)->issuer == 7);
  CHECK_THROWS_AS(s.kappa(1, a, a, PiCertificate{7, 0, a, a}), TypingError);
  CHECK(s.kappa_or_refl(1, a, a, cert) == s.refl(1, a));

  Certifier certify = [&](TermId x, TermId y) -> std::optional<PiCertificate> { return PiCertificate{7, 0, x, y}; };
  CHECK(parse_term(s, "kappa[1](gen(a),gen(b))", Mode::contraction, certify) == k);
  Certifier refuse = [](TermId, TermId) -> std::optional<PiCertificate> { return std::nullopt; };
  CHECK_THROWS_AS(parse_term(s, "kappa[1](gen(b),gen(a))", Mode::contraction, refuse), TypingError);
}

TEST_CASE("hash-consing makes construction idempotent") {
  TermStore s(fixtures::seed_presentation());
  TermId x = parse_term(s, "dual[1](comp[1](gen(f),gen(g)))");
  std::size_t before = s.size();
  TermId y = parse_term(s, "dual[1](comp[1](gen(f),gen(g)))");
  CHECK(x == y);
  CHECK(s.size() == before);
}

TEST_CASE("depth 0 enumerates generators only") {
  auto p = fixtures::seed_presentation();
  auto store = std::make_shared<TermStore>(p);
  TruncationConfig cfg = p->config();
  cfg.term_depth = 0;
  TermUniverse u = enumerate_free_magma(store, cfg);
  CHECK(u.size() == p->size());
  for (TermId t : u.terms()) CHECK(store->node(t).kind == TermKind::gen);
}

TEST_CASE("single 0-cell, one direction: counts by hand") {
  // Level 1/1 at size <= depth+1: id(a); dual(id a); dual^2(id a); then
  // dual^3(id a) and comp(id a, id a) at size 5.
  const std::size_t expected[] = {0, 1, 2, 3, 5};
  for (int depth = 1; depth <= 4; ++depth) {
    auto p = one_point(1, 1);
    auto store = std::make_shared<TermStore>(p);
    TruncationConfig cfg{1, 1, depth, 1000};
    auto counts = enumerate_free_magma(store, cfg).level_counts();
    CHECK(counts["0/"] == 1);
    CHECK(counts["1/1"] == expected[depth]);
    CHECK(counts == brute_force_level_counts(*p, 1, 1, static_cast<std::size_t>(depth) + 1));
  }
}

TEST_CASE("a composable loop composes with itself at depth 2") {
  auto p = loop();
  auto store = std::make_shared<TermStore>(p);
  TermId ff = parse_term(*store, "comp[1](gen(f),gen(f))");
  CHECK_FALSE(enumerate_free_magma(store, TruncationConfig{1, 1, 1, 1000}).contains(ff));
  CHECK(enumerate_free_magma(store, TruncationConfig{1, 1, 2, 1000}).contains(ff));
}

TEST_CASE("enumeration is ordered, closed and deterministic") {
  auto p = fixtures::seed_presentation();
  auto s1 = std::make_shared<TermStore>(p);
  auto s2 = std::make_shared<TermStore>(p);
  TermUniverse u1 = enumerate_free_magma(s1, p->config());
  TermUniverse u2 = enumerate_free_magma(s2, p->config());
  REQUIRE(u1.size() == u2.size());
  for (std::size_t i = 0; i < u1.size(); ++i) CHECK(s1->print(u1.terms()[i]) == s2->print(u2.terms()[i]));
  for (std::size_t i = 1; i < u1.size(); ++i) CHECK(s1->less(u1.terms()[i - 1], u1.terms()[i]));
  for (TermId t : u1.terms()) {
    const TermNode& n = s1->node(t);
    if (n.kind != TermKind::gen) {
      CHECK(u1.contains(n.a));
      if (n.kind == TermKind::comp) CHECK(u1.contains(n.b));
    }
    for (Direction d : n.dirs.to_vector()) {
      CHECK(u1.contains(s1->boundary(t, d, Side::source)));
      CHECK(u1.contains(s1->boundary(t, d, Side::target)));
    }
  }
}

TEST_CASE("enumeration flags truncation at the limit") {
  auto p = fixtures::seed_presentation();
  auto store = std::make_shared<TermStore>(p);
  TermUniverse u = enumerate_free_magma(store, p->config(), {}, 20);
  CHECK(u.truncated());
}

TEST_CASE("cubical identities on terms") {
  auto p = fixtures::seed_presentation();
  auto store = std::make_shared<TermStore>(p);
  Report r = check_cubical_on_terms(enumerate_free_magma(store, p->config()));
  CHECK(r.ok());
  CHECK(r.checked > 0);

  TermStore s(one_point(2, 2));
  TermId a = cell(s, "a");
  TermId rr = s.refl(2, s.refl(1, a));
  for (Side outer : {Side::source, Side::target})
    for (Side inner : {Side::source, Side::target}) {
      CHECK(s.boundary(s.boundary(rr, 1, inner), 2, outer) == a);
      CHECK(s.boundary(s.boundary(rr, 2, outer), 1, inner) == a);
    }
}

TEST_CASE("universe from seed terms is subterm and boundary closed") {
  auto p = fixtures::seed_presentation();
  auto store = std::make_shared<TermStore>(p);
  TermId t = parse_term(*store, "id[2](comp[1](gen(g),gen(f)))");
  TermUniverse u = TermUniverse::from_terms(store, p->config(), {t});
  CHECK(u.contains(t));
  CHECK(u.contains(parse_term(*store, "comp[1](gen(g),gen(f))")));
  CHECK(u.contains(parse_term(*store, "id[2](gen(a))")));
  CHECK(u.contains(parse_term(*store, "gen(a)")));
  CHECK_FALSE(u.contains(parse_term(*store, "gen(k)")));
}
