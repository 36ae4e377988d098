#include "omega_cube/contraction.hpp"

#include <algorithm>

namespace omega_cube {

json ContractionStage::to_json() const {
  return json{{"dim", dim},
              {"universe_size", universe_size},
              {"new_terms", new_terms},
              {"kappa_cells", kappa_cells},
              {"kappa_entries", kappa_entries},
              {"excluded_pairs", excluded_pairs},
              {"saturation", stats.to_json()},
              {"truncated", truncated},
              {"budget_exhausted", budget_exhausted},
              {"monotone", monotone},
              {"complete", complete()}};
}

bool ContractionData::complete() const {
  return std::all_of(stages_.begin(), stages_.end(), [](const ContractionStage& s) { return s.complete(); });
}

std::optional<TermId> ContractionData::kappa(Direction d, TermId x, TermId y) const {
  auto it = kappa_index_.find({d, x, y});
  if (it == kappa_index_.end()) return std::nullopt;
  return kappa_[it->second].cell;
}

void ContractionData::erase_kappa(std::size_t index) {
  kappa_.erase(kappa_.begin() + static_cast<std::ptrdiff_t>(index));
  index_kappa();
}

void ContractionData::index_kappa() {
  kappa_index_.clear();
  for (std::size_t i = 0; i < kappa_.size(); ++i) kappa_index_[{kappa_[i].dir, kappa_[i].left, kappa_[i].right}] = i;
}

json ContractionData::to_json() const {
  const TermStore& s = *store_;
  json j;
  j["config"] = cfg_.to_json();
  json stages = json::array();
  for (const auto& st : stages_) stages.push_back(st.to_json());
  j["stages"] = stages;
  j["complete"] = complete();
  json levels = json::object();
  for (const auto& [k, v] : universe_->level_counts()) levels[k] = v;
  j["level_counts"] = levels;
  json terms = json::array();
  for (TermId t : universe_->terms()) terms.push_back(s.print(t));
  j["universe"] = terms;
  json kt = json::array();
  for (const auto& e : kappa_) {
    kt.push_back(json{{"dir", e.dir}, {"left", s.print(e.left)}, {"right", s.print(e.right)}, {"cell", s.print(e.cell)}});
  }
  j["kappa"] = kt;
  std::vector<std::vector<TermId>> classes;
  std::unordered_map<TermId, std::size_t> slot;
  for (TermId t : universe_->terms()) {
    TermId c = session_->class_of(t);
    auto [it, fresh] = slot.emplace(c, classes.size());
    if (fresh) classes.emplace_back();
    classes[it->second].push_back(t);
  }
  json cj = json::array();
  for (const auto& members : classes) {
    json m = json::array();
    for (TermId t : members) m.push_back(s.print(t));
    cj.push_back(m);
  }
  j["classes"] = cj;
  j["log"] = log_;
  return j;
}

ContractionData build_free_contraction(PresentationPtr p, const TruncationConfig& cfg, FamilySet families) {
  cfg.validate();
  ContractionData cd;
  cd.store_ = std::make_shared<TermStore>(p);
  cd.cfg_ = cfg;
  SessionOptions opt;
  opt.families = families;
  cd.session_ = std::make_shared<CongruenceSession>(cd.store_, opt);
  TermStore& store = *cd.store_;
  CongruenceSession& session = *cd.session_;
  const DirectionSet universe = cfg.universe();

  std::vector<TermId> leaves;
  std::vector<TermId> previous;  // previous stage universe
  std::vector<TermId> previous_class;

  for (int n = 0; n <= cfg.max_dim; ++n) {
    ContractionStage stage;
    stage.dim = n;
    session.set_stage(static_cast<std::uint32_t>(n));

    if (n >= 1) {
      // Group (n-1)-dimensional terms by level and class, in universe order.
      std::map<std::uint32_t, std::vector<std::vector<TermId>>> groups;
      std::unordered_map<TermId, std::pair<std::uint32_t, std::size_t>> group_of;
      for (TermId t : cd.universe_->terms()) {
        const TermNode& node = store.node(t);
        if (node.dim() != n - 1) continue;
        TermId c = session.class_of(t);
        auto it = group_of.find(c);
        if (it == group_of.end()) {
          auto& level = groups[node.dirs.mask()];
          it = group_of.emplace(c, std::make_pair(node.dirs.mask(), level.size())).first;
          level.emplace_back();
        }
        groups[it->second.first][it->second.second].push_back(t);
      }
      for (const auto& [mask, classes] : groups) {
        DirectionSet dirs = DirectionSet::from_mask(mask);
        std::size_t total = 0, inside = 0;
        for (const auto& members : classes) {
          total += members.size();
          inside += members.size() * members.size();
        }
        stage.excluded_pairs += total * total - inside;
        for (Direction d : universe.to_vector()) {
          if (dirs.contains(d)) continue;
          for (const auto& members : classes) {
            for (TermId x : members) {
              for (TermId y : members) {
                TermId cell;
                if (x == y) {
                  cell = store.refl(d, x);
                } else {
                  auto cert = session.certify(x, y);
                  cell = store.kappa(d, x, y, *cert);
                  ++stage.kappa_cells;
                }
                cd.kappa_.push_back({d, x, y, cell});
                leaves.push_back(cell);
                ++stage.kappa_entries;
              }
            }
          }
        }
      }
      cd.index_kappa();
    }

    TruncationConfig level_cfg = cfg;
    level_cfg.max_dim = n;
    auto u = std::make_unique<TermUniverse>(enumerate_free_magma(cd.store_, level_cfg, leaves));
    stage.truncated = u->truncated();
    stage.universe_size = u->size();
    stage.new_terms = u->size() - std::min(u->size(), previous.size());

    session.add_universe(*u);
    session.seed(instantiate_relations(*u, RelationMode::contraction, families));
    stage.stats = session.saturate(cfg.saturation_budget);
    stage.budget_exhausted = stage.stats.budget_exhausted;

    // Earlier levels keep their terms and their partition.
    std::unordered_map<TermId, TermId> old_to_new;
    std::unordered_map<TermId, TermId> new_to_old;
    for (std::size_t i = 0; i < previous.size(); ++i) {
      TermId t = previous[i];
      if (!u->contains(t)) {
        stage.monotone = false;
        cd.log_.push_back("stage " + std::to_string(n) + ": lost term " + store.print(t));
        continue;
      }
      TermId now = session.class_of(t);
      auto [a, fa] = old_to_new.emplace(previous_class[i], now);
      auto [b, fb] = new_to_old.emplace(now, previous_class[i]);
      if (a->second != now || b->second != previous_class[i]) {
        stage.monotone = false;
        cd.log_.push_back("stage " + std::to_string(n) + ": partition of earlier terms changed at " + store.print(t));
      }
    }
    if (stage.truncated) cd.log_.push_back("stage " + std::to_string(n) + ": universe truncated");
    if (stage.budget_exhausted) cd.log_.push_back("stage " + std::to_string(n) + ": saturation budget exhausted");

    previous = u->terms();
    previous_class.clear();
    for (TermId t : previous) previous_class.push_back(session.class_of(t));
    cd.universe_ = std::move(u);
    cd.stages_.push_back(stage);
  }
  return cd;
}

Report validate_contraction(const ContractionData& cd) {
  Report r;
  r.name = "contraction";
  TermStore& s = cd.store();
  const CongruenceSession& session = cd.session();
  const int max_dim = cd.config().max_dim;
  const DirectionSet universe = cd.config().universe();
  auto pr = [&](TermId t) { return s.print(t); };

  // Domain completeness over identified pairs of the universe.
  std::map<std::uint32_t, std::vector<TermId>> levels;
  for (TermId t : cd.universe().terms()) {
    if (s.node(t).dim() < max_dim) levels[s.node(t).dirs.mask()].push_back(t);
  }
  for (const auto& [mask, terms] : levels) {
    DirectionSet dirs = DirectionSet::from_mask(mask);
    for (TermId x : terms) {
      for (TermId y : terms) {
        if (!session.same_class(x, y)) continue;
        for (Direction d : universe.to_vector()) {
          if (dirs.contains(d)) continue;
          ++r.checked;
          if (!cd.kappa(d, x, y)) {
            r.add("kappa-domain", "no kappa entry in direction " + std::to_string(d) + " for an identified pair", {pr(x), pr(y)});
          }
        }
      }
    }
  }

  for (const auto& e : cd.kappa_table()) {
    const TermNode& nx = s.node(e.left);
    const TermNode& ny = s.node(e.right);
    const std::string ds = std::to_string(e.dir);
    ++r.checked;
    if (!(nx.dirs == ny.dirs) || nx.dirs.contains(e.dir) || !session.same_class(e.left, e.right)) {
      r.add("kappa-domain", "kappa entry in direction " + ds + " outside the domain", {pr(e.left), pr(e.right)});
      continue;
    }
    if (e.left == e.right && e.cell != s.refl(e.dir, e.left)) {
      r.add("kappa-degeneracy", "diagonal kappa entry in direction " + ds + " is not the identity", {pr(e.left), pr(e.cell)});
    }
    if (s.boundary(e.cell, e.dir, Side::source) != e.left) {
      r.add("kappa-source", "source face in direction " + ds + " is not the left term", {pr(e.cell)});
    }
    if (s.boundary(e.cell, e.dir, Side::target) != e.right) {
      r.add("kappa-target", "target face in direction " + ds + " is not the right term", {pr(e.cell)});
    }
    for (Direction f : nx.dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        ++r.checked;
        TermId fx = s.boundary(e.left, f, side);
        TermId fy = s.boundary(e.right, f, side);
        auto expected = cd.kappa(e.dir, fx, fy);
        if (!expected || *expected != s.boundary(e.cell, f, side)) {
          r.add("kappa-transverse",
                std::string(1, side_char(side)) + std::to_string(f) + " face is not the kappa of the faces", {pr(e.cell)});
        }
      }
    }
    ++r.checked;
    TermId id = s.refl(e.dir, e.left);
    if (!session.contains(e.cell) || !session.contains(id) || !session.same_class(e.cell, id)) {
      r.add("kappa-projection", "kappa cell is not identified with the identity on its source", {pr(e.cell), pr(id)});
    }
  }
  return r;
}

MagmaCells magma_cells(const ContractionData& cd) {
  MagmaCells m;
  TermStore& s = cd.store();
  m.cells = std::make_shared<Presentation>(cd.config());
  const auto& terms = cd.universe().terms();
  for (std::size_t i = 0; i < terms.size(); ++i) {
    m.cell_of.emplace(terms[i], m.cells->add_cell(s.node(terms[i]).dirs, "t" + std::to_string(i)));
  }
  for (TermId t : terms) {
    for (Direction d : s.node(t).dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        auto it = m.cell_of.find(s.boundary(t, d, side));
        if (it == m.cell_of.end()) throw DomainError("universe not closed under faces at " + s.print(t));
        m.cells->set_face(m.cell_of.at(t), d, side, it->second);
      }
    }
  }
  return m;
}

SetMorphism unit_eta(const ContractionData& cd, const MagmaCells& magma) {
  TermStore& s = cd.store();
  SetMorphism eta(cd.presentation(), magma.cells);
  for (CellId c = 0; c < cd.presentation()->size(); ++c) {
    auto it = magma.cell_of.find(s.gen(c));
    if (it == magma.cell_of.end()) throw DomainError("generator outside the universe: " + cd.presentation()->qualified_name(c));
    eta.set(c, it->second);
  }
  return eta;
}

ContractionMorphism::ContractionMorphism(SetMorphism f, ContractionPtr source, ContractionPtr target)
    : f_(std::move(f)), source_(std::move(source)), target_(std::move(target)) {
  if (!source_ || !target_) throw UsageError("free_on_morphism needs both contractions");
  if (f_.source().get() != source_->presentation().get() || f_.target().get() != target_->presentation().get()) {
    throw UsageError("morphism endpoints do not match the contractions' presentations");
  }
  Report r = validate_morphism(f_);
  if (!r.ok()) throw UsageError("invalid presentation morphism [" + r.violations.front().tag + "]: " + r.violations.front().message);
}

TermId ContractionMorphism::map_term(TermId t) {
  auto it = memo_.find(t);
  if (it != memo_.end()) return it->second;
  const TermNode n = source_->store().node(t);
  TermStore& ts = target_->store();
  TermId out = kNoTerm;
  switch (n.kind) {
    case TermKind::gen:
      out = ts.gen(f_(n.a));
      break;
    case TermKind::refl:
      out = ts.refl(n.dir, map_term(n.a));
      break;
    case TermKind::dual:
      out = ts.dual(n.dir, map_term(n.a));
      break;
    case TermKind::comp: {
      TermId x = map_term(n.a);
      TermId y = map_term(n.b);
      out = ts.comp(n.dir, x, y);
      break;
    }
    case TermKind::kappa: {
      TermId x = map_term(n.a);
      TermId y = map_term(n.b);
      if (x == y) {
        out = ts.refl(n.dir, x);
        break;
      }
      const CongruenceSession& target_session = target_->session();
      if (!target_session.contains(x) || !target_session.contains(y) || !target_session.same_class(x, y)) {
        throw DomainError("kappa image pair is not identified in the target: (" + ts.print(x) + ", " + ts.print(y) + ")");
      }
      out = ts.kappa(n.dir, x, y, *target_session.certify(x, y));
      break;
    }
  }
  memo_.emplace(t, out);
  return out;
}

std::optional<TermId> ContractionMorphism::map_class(TermId source_class) const {
  auto it = class_map_.find(source_->session().class_of(source_class));
  if (it == class_map_.end()) return std::nullopt;
  return it->second;
}

Report ContractionMorphism::check() {
  Report r;
  r.name = "free-morphism";
  const TermStore& ss = source_->store();
  TermStore& ts = target_->store();
  const CongruenceSession& src_session = source_->session();
  const CongruenceSession& tgt_session = target_->session();

  MagmaCells src_cells = magma_cells(*source_);
  MagmaCells tgt_cells = magma_cells(*target_);
  SetMorphism lifted(src_cells.cells, tgt_cells.cells);
  bool total = true;
  class_map_.clear();
  for (TermId t : source_->universe().terms()) {
    ++r.checked;
    TermId img;
    try {
      img = map_term(t);
    } catch (const Error& e) {
      r.add("kappa-identification", e.what(), {ss.print(t)});
      total = false;
      continue;
    }
    auto it = tgt_cells.cell_of.find(img);
    if (it == tgt_cells.cell_of.end()) {
      r.add("image-universe", "image lies outside the target universe", {ss.print(t), ts.print(img)});
      total = false;
      continue;
    }
    lifted.set(src_cells.cell_of.at(t), it->second);
    TermId cls = src_session.class_of(t);
    TermId tcls = tgt_session.class_of(img);
    auto [c, fresh] = class_map_.emplace(cls, tcls);
    if (!fresh && c->second != tcls) {
      r.add("projection-square", "class map is not well defined", {ss.print(t), ts.print(img)});
    }
  }
  if (total) {
    Report faces = validate_morphism(lifted);
    for (auto& v : faces.violations) r.add("face-square", v.message, v.witnesses);
    r.checked += faces.checked;

    SetMorphism eta_s = unit_eta(*source_, src_cells);
    SetMorphism eta_t = unit_eta(*target_, tgt_cells);
    SetMorphism left = SetMorphism::compose(lifted, eta_s);
    SetMorphism right = SetMorphism::compose(eta_t, f_);
    const Presentation& p = *source_->presentation();
    for (CellId c = 0; c < p.size(); ++c) {
      ++r.checked;
      if (left(c) != right(c)) r.add("unit-naturality", "free image of the unit differs from the unit of the image", {p.qualified_name(c)});
    }
  }

  for (const auto& e : source_->kappa_table()) {
    ++r.checked;
    try {
      TermId img = map_term(e.cell);
      auto expected = target_->kappa(e.dir, map_term(e.left), map_term(e.right));
      if (!expected || *expected != img) {
        r.add("kappa-square", "image of a kappa entry is not the target's kappa of the images", {ss.print(e.cell)});
      }
    } catch (const Error& ex) {
      r.add("kappa-identification", ex.what(), {ss.print(e.cell)});
    }
  }
  return r;
}

ContractionMorphism free_on_morphism(const SetMorphism& f, ContractionPtr source, ContractionPtr target) {
  return ContractionMorphism(f, std::move(source), std::move(target));
}

namespace {

struct ContractionEval {
  const TermStore& store;
  std::shared_ptr<const GeneratorAssignment> a;
  std::unordered_map<TermId, std::optional<CellId>> memo;

  std::optional<CellId> operator()(TermId t) {
    auto it = memo.find(t);
    if (it != memo.end()) return it->second;
    const TermNode& n = store.node(t);
    const StrictCategoryTable& c = a->target();
    std::optional<CellId> v;
    switch (n.kind) {
      case TermKind::gen:
        v = (*a)(n.a);
        break;
      case TermKind::refl:
        if (auto x = (*this)(n.a)) v = c.find_refl(*x, n.dir);
        break;
      case TermKind::dual:
        if (auto x = (*this)(n.a)) v = c.find_dual(*x, n.dir);
        break;
      case TermKind::comp: {
        auto x = (*this)(n.a);
        auto y = (*this)(n.b);
        if (x && y) v = c.find_comp(n.dir, *x, *y);
        break;
      }
      case TermKind::kappa: {
        auto x = (*this)(n.a);
        auto y = (*this)(n.b);
        if (x && y && *x == *y) v = c.find_refl(*x, n.dir);
        break;
      }
    }
    memo.emplace(t, v);
    return v;
  }
};

}  // namespace

Separator make_contraction_separator(const TermStore& store, std::shared_ptr<const GeneratorAssignment> a,
                                     std::string label) {
  auto ev = std::make_shared<ContractionEval>(ContractionEval{store, a, {}});
  Separator s;
  s.label = std::move(label);
  s.evaluate = [ev](TermId t) -> std::optional<std::uint32_t> { return (*ev)(t); };
  s.describe = [a](std::uint32_t cell) { return a->target().cells().qualified_name(cell); };
  return s;
}

}  // namespace omega_cube
