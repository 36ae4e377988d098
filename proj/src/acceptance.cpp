#include "omega_cube/acceptance.hpp"

#include <chrono>
#include <memory>
#include <random>
#include <set>

#include "omega_cube/congruence.hpp"
#include "omega_cube/contraction.hpp"
#include "omega_cube/examples.hpp"
#include "omega_cube/strict.hpp"
#include "omega_cube/term.hpp"

namespace omega_cube {

json AcceptanceOptions::to_json() const {
  return json{{"seed", seed},
              {"soundness_assignments", soundness_assignments},
              {"factorization_assignments", factorization_assignments},
              {"morphisms", morphisms},
              {"budget", budget},
              {"product_time_limit_s", product_time_limit}};
}

json CriterionResult::to_json() const {
  return json{{"id", id}, {"title", title}, {"pass", pass}, {"summary", summary}, {"details", details}};
}

bool AcceptanceReport::all_pass() const {
  return std::all_of(criteria.begin(), criteria.end(), [](const CriterionResult& c) { return c.pass; });
}

json AcceptanceReport::to_json() const {
  json crit = json::array();
  for (const auto& c : criteria) crit.push_back(c.to_json());
  return json{{"options", options.to_json()}, {"all_pass", all_pass()}, {"criteria", crit}};
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

json report_summary(const Report& r) {
  return json{{"checked", r.checked}, {"violations", r.violations.size()}};
}

// Two objects a, b and one arrow f: a -> b, the quiver behind a free involutive factor.
InvolutiveOneCategory free_factor(int max_length) {
  auto p = std::make_shared<Presentation>(TruncationConfig{1, 1, 1, 1});
  CellId a = p->add_cell({}, "a");
  CellId b = p->add_cell({}, "b");
  CellId f = p->add_cell(DirectionSet::of({1}), "f");
  p->set_face(f, 1, Side::source, a);
  p->set_face(f, 1, Side::target, b);
  return truncated_free_involutive(*p, 1, max_length);
}

std::vector<std::shared_ptr<ProductTable>> product_targets(const TruncationConfig& cfg) {
  TruncationConfig t = cfg;
  t.max_dim = std::min(cfg.max_dim, 2);
  t.dir_universe = 2;
  std::vector<std::shared_ptr<ProductTable>> out;
  out.push_back(std::make_shared<ProductTable>(std::vector{pair_groupoid(2), pair_groupoid(2)}, t));
  out.push_back(std::make_shared<ProductTable>(std::vector{cyclic_group(3), pair_groupoid(2)}, t));
  out.push_back(std::make_shared<ProductTable>(std::vector{free_factor(2), cyclic_group(2)}, t));
  out.push_back(std::make_shared<ProductTable>(std::vector{pair_groupoid(3), free_factor(3)}, t));
  return out;
}

// Random face-preserving assignments of the presentation's generators into
// product targets, cycling through the targets.
std::vector<std::shared_ptr<const GeneratorAssignment>> random_assignments(PresentationPtr p, int count,
                                                                           std::mt19937_64& rng, json& log) {
  auto targets = product_targets(p->config());
  std::vector<std::shared_ptr<const GeneratorAssignment>> out;
  std::vector<int> per_target(targets.size(), 0);
  for (int i = 0; static_cast<int>(out.size()) < count && i < 4 * count; ++i) {
    const auto& target = targets[static_cast<std::size_t>(i) % targets.size()];
    auto m = random_morphism(p, target->table()->cells_ptr(), rng);
    if (!m) continue;
    ++per_target[static_cast<std::size_t>(i) % targets.size()];
    out.push_back(std::make_shared<const GeneratorAssignment>(std::move(*m), target->table()));
  }
  log = per_target;
  return out;
}

// ---------------------------------------------------------------------------

struct BruteTerm {
  enum Kind { gen, refl, dual, comp } kind;
  Direction dir;
  CellId cell;
  std::shared_ptr<const BruteTerm> a, b;
};
using BrutePtr = std::shared_ptr<const BruteTerm>;

std::string brute_text(const BruteTerm& t) {
  switch (t.kind) {
    case BruteTerm::gen: return "g" + std::to_string(t.cell);
    case BruteTerm::refl: return "i" + std::to_string(t.dir) + "(" + brute_text(*t.a) + ")";
    case BruteTerm::dual: return "s" + std::to_string(t.dir) + "(" + brute_text(*t.a) + ")";
    case BruteTerm::comp: return "c" + std::to_string(t.dir) + "(" + brute_text(*t.a) + "," + brute_text(*t.b) + ")";
  }
  return {};
}

DirectionSet brute_dirs(const Presentation& p, const BruteTerm& t) {
  switch (t.kind) {
    case BruteTerm::gen: return p.cell(t.cell).dirs;
    case BruteTerm::refl: return brute_dirs(p, *t.a).with(t.dir);
    default: return brute_dirs(p, *t.a);
  }
}

BrutePtr brute_face(const Presentation& p, const BrutePtr& t, Direction d, Side side) {
  const Side other = side == Side::source ? Side::target : Side::source;
  switch (t->kind) {
    case BruteTerm::gen:
      return std::make_shared<BruteTerm>(BruteTerm{BruteTerm::gen, 0, p.face(t->cell, d, side), nullptr, nullptr});
    case BruteTerm::refl:
      if (t->dir == d) return t->a;
      return std::make_shared<BruteTerm>(BruteTerm{BruteTerm::refl, t->dir, 0, brute_face(p, t->a, d, side), nullptr});
    case BruteTerm::dual:
      if (t->dir == d) return brute_face(p, t->a, d, other);
      return std::make_shared<BruteTerm>(BruteTerm{BruteTerm::dual, t->dir, 0, brute_face(p, t->a, d, side), nullptr});
    case BruteTerm::comp:
      if (t->dir == d) return side == Side::source ? brute_face(p, t->b, d, side) : brute_face(p, t->a, d, side);
      return std::make_shared<BruteTerm>(
          BruteTerm{BruteTerm::comp, t->dir, 0, brute_face(p, t->a, d, side), brute_face(p, t->b, d, side)});
  }
  return nullptr;
}

}  // namespace

std::map<std::string, std::size_t> brute_force_level_counts(const Presentation& p, int max_dim, int dir_universe,
                                                            std::size_t max_size) {
  std::vector<std::vector<BrutePtr>> by_size(max_size + 1);
  std::set<std::string> seen;
  std::map<std::string, std::size_t> counts;
  auto keep = [&](BrutePtr t, std::size_t size) {
    DirectionSet dirs = brute_dirs(p, *t);
    if (dirs.size() > max_dim || dirs.max() > dir_universe) return;
    if (!seen.insert(brute_text(*t)).second) return;
    ++counts[level_key(dirs)];
    by_size[size].push_back(std::move(t));
  };
  for (CellId c = 0; c < p.size() && max_size >= 1; ++c) {
    keep(std::make_shared<BruteTerm>(BruteTerm{BruteTerm::gen, 0, c, nullptr, nullptr}), 1);
  }
  for (std::size_t size = 2; size <= max_size; ++size) {
    for (const auto& x : by_size[size - 1]) {
      for (Direction d = 1; d <= dir_universe; ++d) {
        auto kind = brute_dirs(p, *x).contains(d) ? BruteTerm::dual : BruteTerm::refl;
        keep(std::make_shared<BruteTerm>(BruteTerm{kind, d, 0, x, nullptr}), size);
      }
    }
    for (std::size_t left = 1; left + 1 < size; ++left) {
      for (const auto& x : by_size[left]) {
        for (const auto& y : by_size[size - 1 - left]) {
          DirectionSet dx = brute_dirs(p, *x);
          if (!(dx == brute_dirs(p, *y))) continue;
          for (Direction d : dx.to_vector()) {
            if (brute_text(*brute_face(p, x, d, Side::source)) != brute_text(*brute_face(p, y, d, Side::target))) continue;
            keep(std::make_shared<BruteTerm>(BruteTerm{BruteTerm::comp, d, 0, x, y}), size);
          }
        }
      }
    }
  }
  return counts;
}

CriterionResult criterion_product_models(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 1;
  res.title = "product model certification";
  auto t0 = Clock::now();
  struct Run {
    std::string label;
    std::vector<InvolutiveOneCategory> family;
    TruncationConfig cfg;
  };
  std::vector<Run> runs;
  runs.push_back({"two-factor", {pair_groupoid(2), free_factor(2)}, TruncationConfig{2, 2, 1, o.budget}});
  runs.push_back({"three-factor", {pair_groupoid(2), free_factor(2), cyclic_group(3)}, TruncationConfig{3, 3, 1, o.budget}});
  res.pass = true;
  json runs_json = json::array();
  long violations = 0;
  for (const auto& run : runs) {
    auto start = Clock::now();
    json factors = json::array();
    bool shape_ok = true;
    for (const auto& f : run.family) {
      bool nontrivial_star = false;
      for (std::size_t i = 0; i < f.arrows.size(); ++i) nontrivial_star |= f.star[i] != i;
      factors.push_back(json{{"name", f.name}, {"objects", f.objects.size()}, {"arrows", f.arrows.size()}, {"nontrivial_star", nontrivial_star}});
    }
    for (std::size_t i = 0; i < 2; ++i) shape_ok &= run.family[i].objects.size() >= 2 && run.family[i].arrows.size() >= 4;
    ProductTable product(run.family, run.cfg);
    const StrictCategoryTable& c = *product.table();
    Report quiver = validate_quiver(c.cells());
    Report cubical = validate_cubical_axioms(c.cells());
    Report strict = validate_strict(c);
    Report involutive = validate_involutive(c);
    double secs = seconds_since(start);
    long v = static_cast<long>(quiver.violations.size() + cubical.violations.size() + strict.violations.size() +
                               involutive.violations.size());
    violations += v;
    json levels = json::object();
    for (DirectionSet dirs : c.cells().levels()) levels[level_key(dirs)] = c.cells().level(dirs).size();
    runs_json.push_back(json{{"run", run.label},
                             {"config", run.cfg.to_json()},
                             {"factors", factors},
                             {"cells", levels},
                             {"comp_entries", c.comp_entries().size()},
                             {"quiver", report_summary(quiver)},
                             {"cubical", report_summary(cubical)},
                             {"strict", report_summary(strict)},
                             {"involutive", report_summary(involutive)},
                             {"within_time_limit", secs < o.product_time_limit}});
    if (v != 0 || !shape_ok || secs >= o.product_time_limit) res.pass = false;
  }
  res.details = json{{"runs", runs_json}};
  res.summary = std::to_string(violations) + " violations over " + std::to_string(runs.size()) + " product runs";
  res.seconds = seconds_since(t0);
  return res;
}

CriterionResult criterion_magma_cubical(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 2;
  res.title = "free-magma cubical soundness";
  auto t0 = Clock::now();
  TruncationConfig cfg{2, 2, 3, o.budget};
  auto p = fixtures::seed_presentation(cfg);
  auto store = std::make_shared<TermStore>(p);
  TermUniverse u = enumerate_free_magma(store, cfg);
  Report cubical = check_cubical_on_terms(u);
  long high = 0;
  for (TermId t : u.terms()) high += store->node(t).dim() >= 2;

  json depth_json = json::array();
  bool counts_match = true;
  for (int depth : {1, 2}) {
    TruncationConfig dc = cfg;
    dc.term_depth = depth;
    auto ds = std::make_shared<TermStore>(p);
    auto counts = enumerate_free_magma(ds, dc).level_counts();
    auto brute = brute_force_level_counts(*p, dc.max_dim, dc.dir_universe, static_cast<std::size_t>(depth) + 1);
    bool match = counts == brute;
    counts_match &= match;
    depth_json.push_back(json{{"depth", depth}, {"enumerated", counts}, {"brute_force", brute}, {"match", match}});
  }
  res.pass = cubical.ok() && high > 0 && counts_match;
  res.details = json{{"config", cfg.to_json()},
                     {"universe_size", u.size()},
                     {"terms_dim_ge_2", high},
                     {"cubical", cubical.to_json(10)},
                     {"level_counts", depth_json}};
  res.summary = std::to_string(cubical.violations.size()) + " cubical failures over " + std::to_string(high) +
                " terms of dim >= 2; brute-force counts " + (counts_match ? "match" : "differ");
  res.seconds = seconds_since(t0);
  return res;
}

CriterionResult criterion_relation_provability(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 3;
  res.title = "relation provability and soundness audit";
  auto t0 = Clock::now();
  TruncationConfig cfg{2, 2, 3, o.budget};
  auto p = fixtures::seed_presentation(cfg);
  auto store = std::make_shared<TermStore>(p);
  TermUniverse u = enumerate_free_magma(store, cfg);
  auto instances = instantiate_relations(u, RelationMode::strict);
  CongruenceSession session(store);
  session.add_universe(u);
  session.seed(instances);
  SaturationStats stats = session.saturate(cfg.saturation_budget);

  std::map<std::string, std::pair<long, long>> per_family;
  long equal = 0;
  for (const auto& inst : instances) {
    Decision d = decide_equal(session, inst.left, inst.right, {});
    auto& slot = per_family[family_name(inst.family)];
    ++slot.second;
    if (d.verdict == Verdict::equal) {
      ++equal;
      ++slot.first;
    }
  }
  json fam = json::object();
  for (const auto& [name, counts] : per_family) fam[name] = json{{"equal", counts.first}, {"instances", counts.second}};

  // Soundness: every checked term evaluates like its class representative.
  std::vector<TermId> checked = u.terms();
  for (const auto& inst : instances) {
    checked.push_back(inst.left);
    checked.push_back(inst.right);
  }
  std::mt19937_64 rng(o.seed ^ 0x3u);
  json per_target;
  auto assignments = random_assignments(p, o.soundness_assignments, rng, per_target);
  long audit_violations = 0, evaluations = 0;
  json witnesses = json::array();
  for (const auto& a : assignments) {
    Evaluator ev(*store, *a);
    for (TermId t : checked) {
      ++evaluations;
      if (ev(t) != ev(session.representative(t))) {
        ++audit_violations;
        if (witnesses.size() < 10) witnesses.push_back(store->print(t));
      }
    }
  }
  const long n = static_cast<long>(instances.size());
  res.pass = u.size() <= 500 && equal == n && n > 0 && static_cast<int>(assignments.size()) >= o.soundness_assignments &&
             audit_violations == 0;
  res.details = json{{"config", cfg.to_json()},
                     {"universe_size", u.size()},
                     {"instances", n},
                     {"equal", equal},
                     {"families", fam},
                     {"saturation", stats.to_json()},
                     {"assignments", assignments.size()},
                     {"assignments_per_target", per_target},
                     {"evaluations", evaluations},
                     {"audit_violations", audit_violations},
                     {"audit_witnesses", witnesses}};
  res.summary = std::to_string(equal) + "/" + std::to_string(n) + " instances Equal; " + std::to_string(audit_violations) +
                " soundness violations over " + std::to_string(assignments.size()) + " assignments";
  res.seconds = seconds_since(t0);
  return res;
}

CriterionResult criterion_dimension_one_oracle(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 4;
  res.title = "dimension-1 oracle equivalence";
  auto t0 = Clock::now();
  auto p = fixtures::composable_quiver(5);
  TruncationConfig cfg = p->config();
  cfg.saturation_budget = o.budget;
  OracleResult r = oracle_compare(p, cfg);
  const double unknown_rate = r.pairs ? static_cast<double>(r.unknown) / static_cast<double>(r.pairs) : 0.0;
  res.pass = r.report.ok() && r.unknown == 0 && r.pairs > 0;
  res.details = r.to_json();
  res.details["config"] = cfg.to_json();
  res.details["unknown_rate"] = unknown_rate;
  res.summary = std::to_string(r.report.violations.size()) + " contradictions over " + std::to_string(r.pairs) +
                " pairs; unknown " + std::to_string(r.unknown);
  res.seconds = seconds_since(t0);
  return res;
}

CriterionResult criterion_free_contraction(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 5;
  res.title = "free contraction certification";
  auto t0 = Clock::now();
  TruncationConfig cfg{2, 2, 3, o.budget};
  auto p = fixtures::seed_presentation(cfg);
  ContractionData cd = build_free_contraction(p, cfg);
  Report r = validate_contraction(cd);
  TermStore& s = cd.store();
  long diagonal = 0, diagonal_ok = 0, off = 0, off_ok = 0;
  for (const auto& e : cd.kappa_table()) {
    TermId id = s.refl(e.dir, e.left);
    if (e.left == e.right) {
      ++diagonal;
      diagonal_ok += e.cell == id;
    } else {
      ++off;
      off_ok += cd.session().contains(e.cell) && cd.session().contains(id) && cd.same_class(e.cell, id);
    }
  }
  json stages = json::array();
  for (const auto& st : cd.stages()) stages.push_back(st.to_json());
  res.pass = r.ok() && cd.complete() && diagonal == diagonal_ok && off == off_ok && off > 0;
  res.details = json{{"config", cfg.to_json()},
                     {"stages", stages},
                     {"validation", r.to_json(10)},
                     {"diagonal_entries", diagonal},
                     {"diagonal_identity", diagonal_ok},
                     {"off_diagonal_entries", off},
                     {"off_diagonal_projection", off_ok}};
  res.summary = std::to_string(r.violations.size()) + " violations; " + std::to_string(diagonal) + " diagonal and " +
                std::to_string(off) + " off-diagonal kappa entries";
  res.seconds = seconds_since(t0);
  return res;
}

CriterionResult criterion_universal_factorization(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 6;
  res.title = "universal factorization";
  auto t0 = Clock::now();
  TruncationConfig cfg{2, 2, 3, o.budget};
  auto p = fixtures::seed_presentation(cfg);
  auto store = std::make_shared<TermStore>(p);
  TermUniverse u = enumerate_free_magma(store, cfg);
  std::mt19937_64 rng(o.seed ^ 0x6u);
  json per_target;
  auto assignments = random_assignments(p, o.factorization_assignments, rng, per_target);
  std::map<std::string, long> tags;
  long checked = 0, failures = 0;
  for (const auto& a : assignments) {
    Report r = check_universal_factorization(*a, u);
    checked += r.checked;
    failures += static_cast<long>(r.violations.size());
    for (const auto& v : r.violations) ++tags[v.tag];
  }
  res.pass = failures == 0 && static_cast<int>(assignments.size()) >= o.factorization_assignments;
  res.details = json{{"config", cfg.to_json()},
                     {"universe_size", u.size()},
                     {"assignments", assignments.size()},
                     {"assignments_per_target", per_target},
                     {"checks", checked},
                     {"failures", failures},
                     {"failures_by_tag", tags}};
  res.summary = std::to_string(failures) + " failures over " + std::to_string(assignments.size()) + " assignments";
  res.seconds = seconds_since(t0);
  return res;
}

namespace {

// Small targets for presentation morphisms out of the seed presentation.
std::vector<PresentationPtr> morphism_targets(const TruncationConfig& cfg) {
  std::vector<PresentationPtr> out;
  out.push_back(fixtures::seed_presentation(cfg));
  {
    auto p = std::make_shared<Presentation>(cfg);
    CellId o = p->add_cell({}, "o");
    for (const char* n : {"u", "v"}) {
      CellId x = p->add_cell(DirectionSet::of({1}), n);
      p->set_face(x, 1, Side::source, o);
      p->set_face(x, 1, Side::target, o);
    }
    CellId w = p->add_cell(DirectionSet::of({2}), "w");
    p->set_face(w, 2, Side::source, o);
    p->set_face(w, 2, Side::target, o);
    out.push_back(p);
  }
  {
    auto p = std::make_shared<Presentation>(cfg);
    CellId x = p->add_cell({}, "x");
    CellId y = p->add_cell({}, "y");
    auto arrow = [&](const char* n, Direction d, CellId s, CellId t) {
      CellId c = p->add_cell(DirectionSet::of({d}), n);
      p->set_face(c, d, Side::source, s);
      p->set_face(c, d, Side::target, t);
    };
    arrow("h", 1, x, y);
    arrow("h2", 1, y, x);
    arrow("e", 1, x, x);
    arrow("e2", 1, y, y);
    arrow("l", 2, x, x);
    arrow("m", 2, y, y);
    out.push_back(p);
  }
  return out;
}

}  // namespace

CriterionResult criterion_unit_naturality(const AcceptanceOptions& o) {
  CriterionResult res;
  res.id = 7;
  res.title = "unit naturality";
  auto t0 = Clock::now();
  TruncationConfig cfg{2, 2, 2, o.budget};
  auto source = fixtures::seed_presentation(cfg);
  auto targets = morphism_targets(cfg);
  auto source_cd = std::make_shared<ContractionData>(build_free_contraction(source, cfg));
  std::vector<ContractionPtr> target_cd;
  for (const auto& t : targets) target_cd.push_back(std::make_shared<ContractionData>(build_free_contraction(t, cfg)));

  std::mt19937_64 rng(o.seed ^ 0x7u);
  long morphisms = 0, failures = 0, checks = 0;
  std::map<std::string, long> tags;
  json per_target = json::array();
  for (std::size_t i = 0; i < targets.size(); ++i) per_target.push_back(0);
  for (int attempt = 0; morphisms < o.morphisms && attempt < 8 * o.morphisms; ++attempt) {
    std::size_t ti = static_cast<std::size_t>(attempt) % targets.size();
    auto f = random_morphism(source, targets[ti], rng);
    if (!f) continue;
    ++morphisms;
    per_target[ti] = per_target[ti].get<long>() + 1;
    ContractionMorphism fm = free_on_morphism(*f, source_cd, target_cd[ti]);
    Report r = fm.check();
    checks += r.checked;
    failures += static_cast<long>(r.violations.size());
    for (const auto& v : r.violations) ++tags[v.tag];
  }
  bool stages_complete = source_cd->complete();
  for (const auto& cd : target_cd) stages_complete &= cd->complete();
  res.pass = morphisms >= o.morphisms && failures == 0 && stages_complete;
  res.details = json{{"config", cfg.to_json()},
                     {"morphisms", morphisms},
                     {"morphisms_per_target", per_target},
                     {"checks", checks},
                     {"failures", failures},
                     {"failures_by_tag", tags},
                     {"contractions_complete", stages_complete}};
  res.summary = std::to_string(failures) + " failures over " + std::to_string(morphisms) + " morphisms";
  res.seconds = seconds_since(t0);
  return res;
}

AcceptanceReport run_acceptance(const AcceptanceOptions& o, bool with_determinism) {
  using Runner = CriterionResult (*)(const AcceptanceOptions&);
  const std::vector<Runner> runners{criterion_product_models,      criterion_magma_cubical,
                                    criterion_relation_provability, criterion_dimension_one_oracle,
                                    criterion_free_contraction,     criterion_universal_factorization,
                                    criterion_unit_naturality};
  auto run_all = [&]() {
    std::vector<CriterionResult> out(runners.size());
    parallel_for(runners.size(), [&](std::size_t i) { out[i] = runners[i](o); });
    return out;
  };
  AcceptanceReport report;
  report.options = o;
  report.criteria = run_all();
  if (with_determinism) {
    auto t0 = Clock::now();
    AcceptanceReport again;
    again.options = o;
    again.criteria = run_all();
    const std::string first = report.to_json().dump();
    const std::string second = again.to_json().dump();
    CriterionResult det;
    det.id = 8;
    det.title = "determinism";
    det.pass = first == second;
    det.details = json{{"bytes", first.size()}, {"identical", det.pass}};
    det.summary = det.pass ? "two runs produced identical reports" : "reports differ between runs";
    det.seconds = seconds_since(t0);
    report.criteria.push_back(det);
  }
  return report;
}

}  // namespace omega_cube
