#include "omega_cube/congruence.hpp"

#include <algorithm>
#include <atomic>
#include <climits>

namespace omega_cube {

namespace {

constexpr const char* kFamilyNames[kFamilyCount] = {
    "assoc",        "unit-left",     "unit-right",           "id-functoriality",
    "exchange",     "involutive",    "star-commute",         "star-antihomo",
    "star-homo-transverse", "id-hermitian", "id-hermitian-transverse", "contraction-projection"};

std::atomic<std::uint64_t> next_issuer{1};

struct KeyPairHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
    return std::hash<std::uint64_t>()(p.first * 0x9e3779b97f4a7c15ull ^ p.second);
  }
};

std::pair<std::uint64_t, std::uint64_t> instance_key(const RelationInstance& r) {
  TermId lo = std::min(r.left, r.right);
  TermId hi = std::max(r.left, r.right);
  return {(static_cast<std::uint64_t>(lo) << 32) | hi, static_cast<std::uint64_t>(r.family)};
}

}  // namespace

const char* family_name(Family f) { return kFamilyNames[static_cast<int>(f)]; }

std::optional<Family> family_from_name(std::string_view name) {
  for (int i = 0; i < kFamilyCount; ++i)
    if (name == kFamilyNames[i]) return static_cast<Family>(i);
  return std::nullopt;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::equal: return "Equal";
    case Verdict::not_equal: return "NotEqual";
    case Verdict::unknown: return "Unknown";
  }
  return "?";
}

json SaturationStats::to_json() const {
  return json{{"nodes", nodes},         {"classes", classes},       {"merges", merges},
              {"instances", instances}, {"rounds", rounds},         {"fixpoint", fixpoint},
              {"budget_exhausted", budget_exhausted}};
}

// ------------------------------------------------------- instantiation

std::vector<RelationInstance> instantiate_relations(const TermUniverse& u, RelationMode mode, FamilySet families) {
  TermStore& s = u.mutable_store();
  const std::size_t bound = u.max_size();
  std::vector<RelationInstance> out;
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, KeyPairHash> seen;
  auto ok = [&](std::optional<TermId> other) {
    return other && (u.contains(*other) || s.node(*other).size <= bound);
  };
  auto emit = [&](Family f, TermId l, TermId r) {
    if (!families.has(f) || l == r) return;
    RelationInstance inst{l, r, f};
    if (seen.insert(instance_key(inst)).second) out.push_back(inst);
  };

  for (TermId t : u.terms()) {
    const TermNode n = s.node(t);
    const std::size_t size = n.size;
    const std::vector<Direction> dirs = n.dirs.to_vector();

    // Expansions of t itself (t is the smaller side).
    for (Direction d : dirs) {
      if (families.has(Family::unit_right)) {
        TermId src = s.boundary(t, d, Side::source);
        if (size + 2 + s.node(src).size <= bound)
          if (auto id = s.try_refl(d, src))
            if (auto l = s.try_comp(d, t, *id)) emit(Family::unit_right, *l, t);
      }
      if (families.has(Family::unit_left)) {
        TermId tgt = s.boundary(t, d, Side::target);
        if (size + 2 + s.node(tgt).size <= bound)
          if (auto id = s.try_refl(d, tgt))
            if (auto l = s.try_comp(d, *id, t)) emit(Family::unit_left, t, *l);
      }
      if (families.has(Family::involutive) && size + 2 <= bound) {
        TermId l = s.dual(d, s.dual(d, t));
        emit(Family::involutive, l, t);
      }
    }

    switch (n.kind) {
      case TermKind::gen:
        break;
      case TermKind::refl: {
        const Direction d = n.dir;
        const TermNode x = s.node(n.a);
        if (families.has(Family::id_hermitian) && size + 1 <= bound) emit(Family::id_hermitian, s.dual(d, t), t);
        if (x.kind == TermKind::comp && x.dir != d) {
          // id_d(x o_e y) ~ id_d x o_e id_d y
          auto l = s.try_refl(d, x.a);
          auto r = s.try_refl(d, x.b);
          if (l && r) {
            auto rhs = s.try_comp(x.dir, *l, *r);
            if (ok(rhs)) emit(Family::id_functoriality, t, *rhs);
          }
        }
        if (x.kind == TermKind::dual && x.dir != d) {
          // dual_e(id_d x) ~ id_d(dual_e x), seen from the right side
          auto lhs = s.try_refl(d, x.a);
          if (lhs) {
            auto l = s.try_dual(x.dir, *lhs);
            if (ok(l)) emit(Family::id_hermitian_transverse, *l, t);
          }
        }
        break;
      }
      case TermKind::dual: {
        const Direction d = n.dir;
        const TermNode x = s.node(n.a);
        if (x.kind == TermKind::dual && x.dir == d) emit(Family::involutive, t, x.a);
        if (x.kind == TermKind::dual && x.dir != d) {
          auto r = s.try_dual(x.dir, s.dual(d, x.a));
          if (ok(r)) emit(Family::star_commute, t, *r);
        }
        if (x.kind == TermKind::comp && x.dir == d) {
          auto r = s.try_comp(d, s.dual(d, x.b), s.dual(d, x.a));
          if (ok(r)) emit(Family::star_antihomo, t, *r);
        }
        if (x.kind == TermKind::comp && x.dir != d) {
          auto r = s.try_comp(x.dir, s.dual(d, x.a), s.dual(d, x.b));
          if (ok(r)) emit(Family::star_homo_transverse, t, *r);
        }
        if (x.kind == TermKind::refl && x.dir == d) emit(Family::id_hermitian, t, n.a);
        if (x.kind == TermKind::refl && x.dir != d) {
          auto inner = s.try_dual(d, x.a);
          if (inner) {
            auto r = s.try_refl(x.dir, *inner);
            if (ok(r)) emit(Family::id_hermitian_transverse, t, *r);
          }
        }
        break;
      }
      case TermKind::comp: {
        const Direction d = n.dir;
        const TermNode x = s.node(n.a);
        const TermNode y = s.node(n.b);
        if (y.kind == TermKind::refl && y.dir == d) emit(Family::unit_right, t, n.a);
        if (x.kind == TermKind::refl && x.dir == d) emit(Family::unit_left, n.b, t);
        if (y.kind == TermKind::comp && y.dir == d) {
          // x o (y1 o y2) ~ (x o y1) o y2
          auto xy = s.try_comp(d, n.a, y.a);
          if (xy) {
            auto r = s.try_comp(d, *xy, y.b);
            if (ok(r)) emit(Family::assoc, t, *r);
          }
        }
        if (x.kind == TermKind::comp && x.dir == d) {
          auto yz = s.try_comp(d, x.b, n.b);
          if (yz) {
            auto l = s.try_comp(d, x.a, *yz);
            if (ok(l)) emit(Family::assoc, *l, t);
          }
        }
        if (x.kind == TermKind::refl && y.kind == TermKind::refl && x.dir == y.dir && x.dir != d) {
          auto inner = s.try_comp(d, x.a, y.a);
          if (inner) {
            auto l = s.try_refl(x.dir, *inner);
            if (ok(l)) emit(Family::id_functoriality, *l, t);
          }
        }
        if (x.kind == TermKind::comp && y.kind == TermKind::comp && x.dir == y.dir && x.dir != d) {
          // (x1 o_e x2) o_f (y1 o_e y2) ~ (x1 o_f y1) o_e (x2 o_f y2)
          auto a = s.try_comp(d, x.a, y.a);
          auto b = s.try_comp(d, x.b, y.b);
          if (a && b) {
            auto r = s.try_comp(x.dir, *a, *b);
            if (ok(r)) emit(Family::exchange, t, *r);
          }
        }
        if (x.kind == TermKind::dual && y.kind == TermKind::dual && x.dir == d && y.dir == d) {
          // y* o x* seen as the right side of (x o y)*
          auto inner = s.try_comp(d, y.a, x.a);
          if (inner) {
            auto l = s.try_dual(d, *inner);
            if (ok(l)) emit(Family::star_antihomo, *l, t);
          }
        }
        if (x.kind == TermKind::dual && y.kind == TermKind::dual && x.dir == y.dir && x.dir != d) {
          auto inner = s.try_comp(d, x.a, y.a);
          if (inner) {
            auto l = s.try_dual(x.dir, *inner);
            if (ok(l)) emit(Family::star_homo_transverse, *l, t);
          }
        }
        break;
      }
      case TermKind::kappa:
        if (mode == RelationMode::contraction) emit(Family::contraction_projection, t, s.refl(n.dir, n.a));
        break;
    }
  }
  return out;
}

// ------------------------------------------------------------- session

CongruenceSession::CongruenceSession(TermStorePtr store, SessionOptions options)
    : store_(std::move(store)), options_(options), issuer_(next_issuer.fetch_add(1)) {}

CongruenceSession::Node CongruenceSession::node_of(TermId t) const {
  auto it = node_.find(t);
  return it == node_.end() ? kNoNode : it->second;
}

bool CongruenceSession::contains(TermId t) const { return node_of(t) != kNoNode; }

CongruenceSession::Node CongruenceSession::find(Node n) const {
  Node root = n;
  while (parent_[root] != root) root = parent_[root];
  while (parent_[n] != root) {
    Node next = parent_[n];
    parent_[n] = root;
    n = next;
  }
  return root;
}

std::optional<std::pair<std::uint64_t, std::uint64_t>> CongruenceSession::signature(Node n) const {
  const TermNode& t = store_->node(term_[n]);
  if (t.kind == TermKind::gen || t.kind == TermKind::kappa) return std::nullopt;
  std::uint64_t head = (static_cast<std::uint64_t>(t.kind) << 40) | (static_cast<std::uint64_t>(t.dir) << 32) |
                       find(node_of(t.a));
  std::uint64_t second = t.kind == TermKind::comp ? find(node_of(t.b)) : 0xffffffffull;
  return std::make_pair(head, second);
}

CongruenceSession::Node CongruenceSession::ensure(TermId t) {
  if (Node n = node_of(t); n != kNoNode) return n;
  const TermNode tn = store_->node(t);
  if (tn.kind == TermKind::refl || tn.kind == TermKind::dual || tn.kind == TermKind::comp) {
    if (ensure(tn.a) == kNoNode) return kNoNode;
    if (tn.kind == TermKind::comp && ensure(tn.b) == kNoNode) return kNoNode;
  }
  if (budget_ > 0 && static_cast<long>(term_.size()) >= budget_) {
    exhausted_ = true;
    return kNoNode;
  }
  auto n = static_cast<Node>(term_.size());
  term_.push_back(t);
  node_.emplace(t, n);
  parent_.push_back(n);
  members_.push_back({n});
  uses_.emplace_back();
  proof_parent_.push_back(kNoNode);
  proof_reason_.push_back({ReasonKind::planted, 0});
  if (tn.kind == TermKind::refl || tn.kind == TermKind::dual || tn.kind == TermKind::comp) {
    uses_[find(node_of(tn.a))].push_back(n);
    if (tn.kind == TermKind::comp && tn.b != tn.a) uses_[find(node_of(tn.b))].push_back(n);
    auto sig = *signature(n);
    auto [it, inserted] = table_.emplace(sig, n);
    if (!inserted) {
      congruence_pairs_.emplace_back(n, it->second);
      enqueue(n, it->second, {ReasonKind::congruence, static_cast<std::uint32_t>(congruence_pairs_.size() - 1)});
    }
  }
  return n;
}

bool CongruenceSession::add_term(TermId t) { return ensure(t) != kNoNode; }

void CongruenceSession::add_universe(const TermUniverse& u) {
  if (options_.max_term_size == 0) size_bound_ = std::max<std::uint32_t>(size_bound_, 2 * static_cast<std::uint32_t>(u.max_size()));
  for (TermId t : u.terms()) ensure(t);
  process();
}

bool CongruenceSession::add_instance(const RelationInstance& inst) {
  if (!options_.families.has(inst.family)) return false;
  auto key = instance_key(inst);
  if (instance_keys_.count(key)) return false;
  Node a = ensure(inst.left);
  Node b = ensure(inst.right);
  if (a == kNoNode || b == kNoNode) return false;
  instance_keys_.insert(key);
  instances_.push_back(inst);
  enqueue(a, b, {ReasonKind::instance, static_cast<std::uint32_t>(instances_.size() - 1)});
  return true;
}

void CongruenceSession::seed(const std::vector<RelationInstance>& instances) {
  for (const auto& inst : instances) add_instance(inst);
}

void CongruenceSession::merge(TermId a, TermId b, const std::string& label) {
  Node na = ensure(a);
  Node nb = ensure(b);
  if (na == kNoNode || nb == kNoNode) throw UsageError("merge: node budget exhausted");
  planted_.push_back(label);
  enqueue(na, nb, {ReasonKind::planted, static_cast<std::uint32_t>(planted_.size() - 1)});
  process();
}

void CongruenceSession::record_proof(Node a, Node b, Reason r) {
  // Re-root a's proof tree at a, then hang it below b.
  Node x = a;
  Node next = proof_parent_[x];
  Reason rx = proof_reason_[x];
  while (next != kNoNode) {
    Node after = proof_parent_[next];
    Reason rnext = proof_reason_[next];
    proof_parent_[next] = x;
    proof_reason_[next] = rx;
    x = next;
    next = after;
    rx = rnext;
  }
  proof_parent_[a] = b;
  proof_reason_[a] = r;
}

void CongruenceSession::unite(Node a, Node b, Reason r) {
  Node ra = find(a);
  Node rb = find(b);
  if (ra == rb) return;
  record_proof(a, b, r);
  ++merges_;
  if (members_[ra].size() < members_[rb].size()) std::swap(ra, rb);
  parent_[rb] = ra;
  members_[ra].insert(members_[ra].end(), members_[rb].begin(), members_[rb].end());
  members_[rb].clear();
  members_[rb].shrink_to_fit();
  std::vector<Node> moved = std::move(uses_[rb]);
  uses_[rb].clear();
  for (Node p : moved) {
    auto sig = *signature(p);
    auto [it, inserted] = table_.emplace(sig, p);
    if (!inserted && find(it->second) != find(p)) {
      congruence_pairs_.emplace_back(p, it->second);
      enqueue(p, it->second, {ReasonKind::congruence, static_cast<std::uint32_t>(congruence_pairs_.size() - 1)});
    }
  }
  uses_[ra].insert(uses_[ra].end(), moved.begin(), moved.end());

  // A congruence is closed under faces.
  const TermId ta = term_[a];
  const TermId tb = term_[b];
  for (Direction d : store_->node(ta).dirs.to_vector()) {
    for (Side side : {Side::source, Side::target}) {
      TermId fa = store_->boundary(ta, d, side);
      TermId fb = store_->boundary(tb, d, side);
      if (fa == fb) continue;
      Node na = ensure(fa);
      Node nb = ensure(fb);
      if (na != kNoNode && nb != kNoNode) enqueue(na, nb, {ReasonKind::face, 0});
    }
  }
}

void CongruenceSession::process() {
  while (!pending_.empty()) {
    Pending p = pending_.front();
    pending_.pop_front();
    unite(p.a, p.b, p.reason);
  }
}

void CongruenceSession::match_node(Node n, std::vector<RelationInstance>& out) {
  TermStore& s = *store_;
  const TermId t = term_[n];
  const TermNode tn = s.node(t);
  auto members = [&](TermId child) { return distinct_members(find(node_of(child))); };
  auto emit = [&](Family f, std::optional<TermId> l, std::optional<TermId> r) {
    if (!l || !r || *l == *r || !options_.families.has(f)) return;
    const std::uint32_t bound = options_.max_term_size ? options_.max_term_size : size_bound_;
    if (bound && (s.node(*l).size > bound || s.node(*r).size > bound)) return;
    out.push_back({*l, *r, f});
  };

  if (tn.kind == TermKind::dual) {
    const Direction d = tn.dir;
    for (Node m : members(tn.a)) {
      const TermId mt = term_[m];
      const TermNode mn = s.node(mt);
      switch (mn.kind) {
        case TermKind::dual:
          if (mn.dir == d) {
            emit(Family::involutive, s.dual(d, mt), mn.a);
          } else if (mn.dir > d) {
            emit(Family::star_commute, s.dual(d, mt), s.try_dual(mn.dir, s.dual(d, mn.a)));
          }
          break;
        case TermKind::comp:
          if (mn.dir == d) {
            emit(Family::star_antihomo, s.dual(d, mt), s.try_comp(d, s.dual(d, mn.b), s.dual(d, mn.a)));
          } else {
            emit(Family::star_homo_transverse, s.dual(d, mt), s.try_comp(mn.dir, s.dual(d, mn.a), s.dual(d, mn.b)));
          }
          break;
        case TermKind::refl:
          if (mn.dir == d) {
            emit(Family::id_hermitian, s.dual(d, mt), mt);
          } else if (auto inner = s.try_dual(d, mn.a)) {
            emit(Family::id_hermitian_transverse, s.dual(d, mt), s.try_refl(mn.dir, *inner));
          }
          break;
        default:
          break;
      }
    }
    return;
  }

  if (tn.kind != TermKind::comp) return;
  const Direction d = tn.dir;
  const std::vector<Node> left = members(tn.a);
  const std::vector<Node> right = members(tn.b);
  auto has_refl = [&](const std::vector<Node>& ms) {
    return std::any_of(ms.begin(), ms.end(), [&](Node m) {
      const TermNode& mn = s.node(term_[m]);
      return mn.kind == TermKind::refl && mn.dir == d;
    });
  };
  if (has_refl(right)) {
    TermId u = tn.a;
    auto id = s.try_refl(d, s.boundary(u, d, Side::source));
    if (id) emit(Family::unit_right, s.try_comp(d, u, *id), u);
  }
  if (has_refl(left)) {
    TermId w = tn.b;
    auto id = s.try_refl(d, s.boundary(w, d, Side::target));
    if (id) emit(Family::unit_left, w, s.try_comp(d, *id, w));
  }
  for (Node m : left) {
    const TermId mt = term_[m];
    const TermNode mn = s.node(mt);
    if (mn.kind == TermKind::comp && mn.dir == d) {
      // (x o y) o w  ->  x o (y o w)
      auto rform = s.try_comp(d, mt, tn.b);
      if (!rform) continue;
      auto yw = s.try_comp(d, mn.b, tn.b);
      if (!yw) continue;
      emit(Family::assoc, s.try_comp(d, mn.a, *yw), rform);
    }
  }
  for (Node m1 : left) {
    const TermId t1 = term_[m1];
    const TermNode n1 = s.node(t1);
    if ((n1.kind != TermKind::refl && n1.kind != TermKind::comp) || n1.dir == d) continue;
    for (Node m2 : right) {
      const TermId t2 = term_[m2];
      const TermNode n2 = s.node(t2);
      if (n2.kind != n1.kind || n2.dir != n1.dir) continue;
      auto lform = s.try_comp(d, t1, t2);
      if (!lform) continue;
      if (n1.kind == TermKind::refl) {
        auto inner = s.try_comp(d, n1.a, n2.a);
        if (inner) emit(Family::id_functoriality, s.try_refl(n1.dir, *inner), lform);
      } else {
        auto a = s.try_comp(d, n1.a, n2.a);
        auto b = s.try_comp(d, n1.b, n2.b);
        if (a && b) emit(Family::exchange, lform, s.try_comp(n1.dir, *a, *b));
      }
    }
  }
}

const std::vector<CongruenceSession::Node>& CongruenceSession::distinct_members(Node root) {
  auto it = round_members_.find(root);
  if (it != round_members_.end()) return it->second;
  std::vector<Node> out;
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> seen;
  for (Node m : members_[root]) {
    auto sig = signature(m);
    if (!sig || seen.insert(*sig).second) out.push_back(m);
  }
  return round_members_.emplace(root, std::move(out)).first->second;
}

long CongruenceSession::rule_round() {
  const std::size_t count = term_.size();
  long added = 0;
  std::vector<RelationInstance> found;
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> done;
  round_members_.clear();
  for (Node n = 0; n < count; ++n) {
    // Congruent duplicates of an already matched node add nothing new.
    if (auto sig = signature(n); sig && !done.insert(*sig).second) continue;
    found.clear();
    match_node(n, found);
    for (const auto& inst : found)
      if (add_instance(inst)) ++added;
    if (exhausted_) break;
  }
  process();
  return added;
}

SaturationStats CongruenceSession::saturate(long budget) {
  budget_ = budget;
  process();
  fixpoint_ = false;
  if (!options_.rule_rounds) {
    fixpoint_ = !exhausted_;
  } else {
    for (int r = 0; r < options_.max_rounds && !exhausted_; ++r) {
      ++rounds_;
      if (rule_round() == 0) {
        fixpoint_ = true;
        break;
      }
    }
  }
  if (exhausted_) fixpoint_ = false;
  return stats();
}

SaturationStats CongruenceSession::stats() const {
  SaturationStats st;
  st.nodes = static_cast<long>(term_.size());
  for (Node n = 0; n < term_.size(); ++n)
    if (parent_[n] == n) ++st.classes;
  st.merges = merges_;
  st.instances = static_cast<long>(instances_.size());
  st.rounds = rounds_;
  st.fixpoint = fixpoint_;
  st.budget_exhausted = exhausted_;
  return st;
}

bool CongruenceSession::same_class(TermId a, TermId b) const {
  Node na = node_of(a);
  Node nb = node_of(b);
  if (na == kNoNode || nb == kNoNode) return a == b;
  return find(na) == find(nb);
}

TermId CongruenceSession::representative(TermId t) const {
  Node n = node_of(t);
  if (n == kNoNode) throw UsageError("term outside the session: " + store_->print(t));
  TermId best = kNoTerm;
  for (Node m : members_[find(n)])
    if (best == kNoTerm || store_->less(term_[m], best)) best = term_[m];
  return best;
}

std::vector<TermId> CongruenceSession::class_members(TermId t) const {
  Node n = node_of(t);
  if (n == kNoNode) throw UsageError("term outside the session: " + store_->print(t));
  std::vector<TermId> out;
  for (Node m : members_[find(n)]) out.push_back(term_[m]);
  std::sort(out.begin(), out.end(), [&](TermId a, TermId b) { return store_->less(a, b); });
  return out;
}

std::optional<PiCertificate> CongruenceSession::certify(TermId a, TermId b) const {
  if (!same_class(a, b)) return std::nullopt;
  return PiCertificate{issuer_, stage_, a, b};
}

std::string CongruenceSession::reason_text(Reason r) const {
  switch (r.kind) {
    case ReasonKind::instance: {
      const auto& inst = instances_[r.index];
      return std::string("instance ") + family_name(inst.family);
    }
    case ReasonKind::congruence: {
      const auto& [p, q] = congruence_pairs_[r.index];
      return "congruence " + store_->print(term_[p]) + " ~ " + store_->print(term_[q]);
    }
    case ReasonKind::face: return "face";
    case ReasonKind::planted: return "planted " + (r.index < planted_.size() ? planted_[r.index] : std::string());
  }
  return "?";
}

std::vector<TraceStep> CongruenceSession::explain(TermId a, TermId b) const {
  std::vector<TraceStep> out;
  if (!same_class(a, b) || a == b) return out;
  Node na = node_of(a);
  Node nb = node_of(b);
  std::unordered_map<Node, std::size_t> depth_of;
  std::vector<Node> up_a;
  for (Node x = na; x != kNoNode; x = proof_parent_[x]) {
    depth_of.emplace(x, up_a.size());
    up_a.push_back(x);
  }
  std::vector<Node> up_b;
  Node meet = nb;
  while (!depth_of.count(meet)) {
    up_b.push_back(meet);
    meet = proof_parent_[meet];
  }
  for (std::size_t i = 0; i < depth_of[meet]; ++i) {
    Node x = up_a[i];
    out.push_back({term_[x], term_[proof_parent_[x]], reason_text(proof_reason_[x])});
  }
  for (auto it = up_b.rbegin(); it != up_b.rend(); ++it) {
    Node x = *it;
    out.push_back({term_[proof_parent_[x]], term_[x], reason_text(proof_reason_[x])});
  }
  return out;
}

Report CongruenceSession::audit() const {
  Report r;
  r.name = "congruence-audit";
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Node, PairHash> seen;
  for (Node n = 0; n < term_.size(); ++n) {
    auto sig = signature(n);
    if (!sig) continue;
    ++r.checked;
    auto [it, inserted] = seen.emplace(*sig, n);
    if (!inserted && find(it->second) != find(n))
      r.add("operation-compatibility",
            store_->print(term_[n]) + " and " + store_->print(term_[it->second]) + " have congruent children but differ",
            {store_->print(term_[n]), store_->print(term_[it->second])});
  }
  for (Node n = 0; n < term_.size(); ++n) {
    if (parent_[n] != n || members_[n].size() < 2) continue;
    const TermId first = term_[members_[n].front()];
    for (Direction d : store_->node(first).dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        Node f0 = node_of(store_->boundary(first, d, side));
        for (Node m : members_[n]) {
          ++r.checked;
          Node fm = node_of(store_->boundary(term_[m], d, side));
          if (f0 == kNoNode || fm == kNoNode) continue;
          if (find(f0) != find(fm))
            r.add("face-compatibility",
                  store_->print(first) + " ~ " + store_->print(term_[m]) + " but their " + side_char(side) +
                      std::to_string(d) + "-faces differ",
                  {store_->print(first), store_->print(term_[m])});
        }
      }
    }
  }
  return r;
}

Decision decide_equal(const CongruenceSession& s, TermId t1, TermId t2, const std::vector<Separator>& separators) {
  const TermStore& store = s.store();
  if (!s.contains(t1)) throw UsageError("term outside the universe: " + store.print(t1));
  if (!s.contains(t2)) throw UsageError("term outside the universe: " + store.print(t2));
  if (store.node(t1).dirs != store.node(t2).dirs)
    throw UsageError("terms live at different levels: " + store.print(t1) + " / " + store.print(t2));
  Decision d;
  if (s.same_class(t1, t2)) {
    d.verdict = Verdict::equal;
    d.trace = s.explain(t1, t2);
    return d;
  }
  for (const auto& sep : separators) {
    auto a = sep.evaluate(t1);
    auto b = sep.evaluate(t2);
    if (a && b && *a != *b) {
      d.verdict = Verdict::not_equal;
      d.separator = sep.label;
      d.left_image = sep.describe ? sep.describe(*a) : std::to_string(*a);
      d.right_image = sep.describe ? sep.describe(*b) : std::to_string(*b);
      return d;
    }
  }
  auto st = s.stats();
  d.verdict = Verdict::unknown;
  d.note = "different classes (fixpoint " + std::string(st.fixpoint ? "reached" : "not reached") + ", " +
           std::to_string(st.nodes) + " nodes) and no separator distinguishes the terms";
  return d;
}

TermId class_representative(const CongruenceSession& s, TermId t) { return s.representative(t); }

json decision_to_json(const Decision& d, const TermStore& store) {
  json out;
  out["verdict"] = verdict_name(d.verdict);
  if (d.verdict == Verdict::equal) {
    json steps = json::array();
    for (const auto& step : d.trace) steps.push_back({{"from", store.print(step.from)}, {"to", store.print(step.to)}, {"reason", step.reason}});
    out["trace"] = std::move(steps);
  } else if (d.verdict == Verdict::not_equal) {
    out["separator"] = d.separator;
    out["left_image"] = d.left_image;
    out["right_image"] = d.right_image;
  } else {
    out["note"] = d.note;
  }
  return out;
}

}  // namespace omega_cube
