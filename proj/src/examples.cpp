#include "omega_cube/examples.hpp"

#include <algorithm>
#include <numeric>

namespace omega_cube {

// ---------------------------------------------------------------------------
// Involutive 1-categories

std::size_t InvolutiveOneCategory::object(std::string_view n) const {
  for (std::size_t i = 0; i < objects.size(); ++i)
    if (objects[i] == n) return i;
  throw LoadError("unknown object '" + std::string(n) + "' in category " + name);
}

std::size_t InvolutiveOneCategory::arrow(std::string_view n) const {
  for (std::size_t i = 0; i < arrows.size(); ++i)
    if (arrows[i].name == n) return i;
  throw LoadError("unknown arrow '" + std::string(n) + "' in category " + name);
}

std::size_t InvolutiveOneCategory::comp(std::size_t x, std::size_t y) const {
  auto it = compose.find({x, y});
  if (it == compose.end()) throw DomainError("composite of " + arrows.at(x).name + " and " + arrows.at(y).name + " undefined");
  return it->second;
}

json InvolutiveOneCategory::to_json() const {
  json j;
  j["name"] = name;
  j["objects"] = objects;
  json a = json::object();
  for (const auto& ar : arrows) a[ar.name] = json::array({objects[ar.source], objects[ar.target]});
  j["arrows"] = a;
  json id = json::object();
  for (std::size_t o = 0; o < objects.size(); ++o) id[objects[o]] = arrows[identity[o]].name;
  j["identity"] = id;
  json c = json::array();
  for (const auto& [k, v] : compose) c.push_back(json::array({arrows[k.first].name, arrows[k.second].name, arrows[v].name}));
  j["compose"] = c;
  if (!star.empty()) {
    json s = json::object();
    for (std::size_t i = 0; i < arrows.size(); ++i) s[arrows[i].name] = arrows[star[i]].name;
    j["star"] = s;
  }
  return j;
}

InvolutiveOneCategory InvolutiveOneCategory::from_json(const json& j) {
  InvolutiveOneCategory c;
  try {
    if (!j.is_object()) throw LoadError("category must be an object");
    c.name = j.value("name", std::string("category"));
    for (const auto& o : j.at("objects")) {
      std::string n = o.get<std::string>();
      if (!valid_identifier(n)) throw LoadError("bad object name '" + n + "'");
      if (std::find(c.objects.begin(), c.objects.end(), n) != c.objects.end()) throw LoadError("duplicate object " + n);
      c.objects.push_back(n);
    }
    for (const auto& [n, ends] : j.at("arrows").items()) {
      if (!valid_identifier(n)) throw LoadError("bad arrow name '" + n + "'");
      if (!ends.is_array() || ends.size() != 2) throw LoadError("arrow " + n + " needs [source, target]");
      c.arrows.push_back({n, c.object(ends[0].get<std::string>()), c.object(ends[1].get<std::string>())});
    }
    c.identity.assign(c.objects.size(), 0);
    std::vector<bool> seen(c.objects.size(), false);
    for (const auto& [o, a] : j.at("identity").items()) {
      std::size_t oi = c.object(o);
      c.identity[oi] = c.arrow(a.get<std::string>());
      seen[oi] = true;
    }
    for (std::size_t o = 0; o < seen.size(); ++o)
      if (!seen[o]) throw LoadError("object " + c.objects[o] + " has no identity");
    for (const auto& e : j.at("compose")) {
      if (!e.is_array() || e.size() != 3) throw LoadError("compose entries must be [x, y, x∘y]");
      c.compose[{c.arrow(e[0].get<std::string>()), c.arrow(e[1].get<std::string>())}] = c.arrow(e[2].get<std::string>());
    }
    if (j.contains("star")) {
      c.star.assign(c.arrows.size(), 0);
      std::vector<bool> has(c.arrows.size(), false);
      for (const auto& [a, b] : j.at("star").items()) {
        std::size_t ai = c.arrow(a);
        c.star[ai] = c.arrow(b.get<std::string>());
        has[ai] = true;
      }
      for (std::size_t i = 0; i < has.size(); ++i)
        if (!has[i]) throw LoadError("arrow " + c.arrows[i].name + " has no star");
    }
  } catch (const json::exception& e) {
    throw LoadError(std::string("bad category document: ") + e.what());
  }
  return c;
}

Report validate_one_category(const InvolutiveOneCategory& c) {
  Report r;
  r.name = "one-category:" + c.name;
  const std::size_t n_obj = c.objects.size();
  const std::size_t n_arr = c.arrows.size();
  for (const auto& a : c.arrows) {
    ++r.checked;
    if (a.source >= n_obj || a.target >= n_obj) r.add("arrow-typing", "endpoint out of range", {a.name});
  }
  if (!r.ok()) return r;
  if (c.identity.size() != n_obj) {
    r.add("identity-typing", "identity table size differs from object count");
    return r;
  }
  for (std::size_t o = 0; o < n_obj; ++o) {
    ++r.checked;
    std::size_t i = c.identity[o];
    if (i >= n_arr || c.arrows[i].source != o || c.arrows[i].target != o) {
      r.add("identity-typing", "identity is not an endo-arrow of its object", {c.objects[o]});
    }
  }
  if (!r.ok()) return r;
  std::vector<std::vector<std::size_t>> by_target(n_obj);
  for (std::size_t a = 0; a < n_arr; ++a) by_target[c.arrows[a].target].push_back(a);

  for (const auto& [k, v] : c.compose) {
    ++r.checked;
    auto [x, y] = k;
    if (x >= n_arr || y >= n_arr || v >= n_arr || c.arrows[x].source != c.arrows[y].target ||
        c.arrows[v].source != c.arrows[y].source || c.arrows[v].target != c.arrows[x].target) {
      r.add("comp-typing", "composition entry is ill-typed",
            {x < n_arr ? c.arrows[x].name : "?", y < n_arr ? c.arrows[y].name : "?"});
    }
  }
  if (!r.ok()) return r;
  auto find = [&](std::size_t x, std::size_t y) -> std::optional<std::size_t> {
    auto it = c.compose.find({x, y});
    if (it == c.compose.end()) return std::nullopt;
    return it->second;
  };
  for (std::size_t x = 0; x < n_arr; ++x) {
    for (std::size_t y : by_target[c.arrows[x].source]) {
      ++r.checked;
      if (!find(x, y)) r.add("comp-total", "composite undefined", {c.arrows[x].name, c.arrows[y].name});
    }
    ++r.checked;
    if (find(x, c.identity[c.arrows[x].source]) != x || find(c.identity[c.arrows[x].target], x) != x) {
      r.add("unit", "identity is not neutral", {c.arrows[x].name});
    }
  }
  for (const auto& [k, xy] : c.compose) {
    auto [x, y] = k;
    for (std::size_t z : by_target[c.arrows[y].source]) {
      auto yz = find(y, z);
      if (!yz) continue;
      ++r.checked;
      auto lhs = find(xy, z), rhs = find(x, *yz);
      if (!lhs || lhs != rhs) r.add("assoc", "associativity fails", {c.arrows[x].name, c.arrows[y].name, c.arrows[z].name});
    }
  }
  if (c.star.empty()) return r;
  if (c.star.size() != n_arr) {
    r.add("star-typing", "star table size differs from arrow count");
    return r;
  }
  for (std::size_t x = 0; x < n_arr; ++x) {
    ++r.checked;
    std::size_t s = c.star[x];
    if (s >= n_arr || c.arrows[s].source != c.arrows[x].target || c.arrows[s].target != c.arrows[x].source) {
      r.add("star-typing", "star does not swap source and target", {c.arrows[x].name});
      continue;
    }
    if (c.star[s] != x) r.add("star-involutive", "star is not involutive", {c.arrows[x].name});
  }
  if (!r.ok()) return r;
  for (std::size_t o = 0; o < n_obj; ++o) {
    ++r.checked;
    if (c.star[c.identity[o]] != c.identity[o]) r.add("star-identity", "identity is not self-dual", {c.objects[o]});
  }
  for (const auto& [k, xy] : c.compose) {
    ++r.checked;
    auto rhs = find(c.star[k.second], c.star[k.first]);
    if (!rhs || *rhs != c.star[xy]) {
      r.add("star-antihomo", "star does not reverse composition", {c.arrows[k.first].name, c.arrows[k.second].name});
    }
  }
  return r;
}

InvolutiveOneCategory groupoid_involution(InvolutiveOneCategory g) {
  Report base = validate_one_category(InvolutiveOneCategory{g.name, g.objects, g.arrows, g.identity, g.compose, {}});
  if (!base.ok()) throw DomainError("not a category: " + base.violations.front().tag + " " + base.violations.front().message);
  g.star.assign(g.arrows.size(), 0);
  for (std::size_t f = 0; f < g.arrows.size(); ++f) {
    bool found = false;
    for (std::size_t h = 0; h < g.arrows.size() && !found; ++h) {
      if (g.arrows[h].source != g.arrows[f].target || g.arrows[h].target != g.arrows[f].source) continue;
      auto hf = g.compose.find({h, f});
      auto fh = g.compose.find({f, h});
      if (hf != g.compose.end() && fh != g.compose.end() && hf->second == g.identity[g.arrows[f].source] &&
          fh->second == g.identity[g.arrows[f].target]) {
        g.star[f] = h;
        found = true;
      }
    }
    if (!found) throw DomainError("arrow " + g.arrows[f].name + " is not invertible");
  }
  return g;
}

InvolutiveOneCategory terminal_category() { return discrete_category(1); }

InvolutiveOneCategory discrete_category(int k) {
  InvolutiveOneCategory c;
  c.name = "discrete" + std::to_string(k);
  for (int i = 0; i < k; ++i) {
    c.objects.push_back("o" + std::to_string(i));
    c.arrows.push_back({"id" + std::to_string(i), static_cast<std::size_t>(i), static_cast<std::size_t>(i)});
    c.identity.push_back(static_cast<std::size_t>(i));
    c.compose[{static_cast<std::size_t>(i), static_cast<std::size_t>(i)}] = static_cast<std::size_t>(i);
    c.star.push_back(static_cast<std::size_t>(i));
  }
  return c;
}

InvolutiveOneCategory cyclic_group(int n) {
  if (n < 1) throw UsageError("cyclic group order must be positive");
  InvolutiveOneCategory c;
  c.name = "Z" + std::to_string(n);
  c.objects = {"o"};
  for (int i = 0; i < n; ++i) c.arrows.push_back({"g" + std::to_string(i), 0, 0});
  c.identity = {0};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      c.compose[{static_cast<std::size_t>(i), static_cast<std::size_t>(j)}] = static_cast<std::size_t>((i + j) % n);
  return groupoid_involution(std::move(c));
}

InvolutiveOneCategory pair_groupoid(int k) {
  if (k < 1) throw UsageError("pair groupoid needs at least one object");
  InvolutiveOneCategory c;
  c.name = "pairs" + std::to_string(k);
  auto idx = [k](int i, int j) { return static_cast<std::size_t>(i * k + j); };
  for (int i = 0; i < k; ++i) c.objects.push_back("o" + std::to_string(i));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      c.arrows.push_back({"a" + std::to_string(i) + "_" + std::to_string(j), static_cast<std::size_t>(j), static_cast<std::size_t>(i)});
  for (int i = 0; i < k; ++i) c.identity.push_back(idx(i, i));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      for (int l = 0; l < k; ++l) c.compose[{idx(i, j), idx(j, l)}] = idx(i, l);
  return groupoid_involution(std::move(c));
}

InvolutiveOneCategory truncated_free_involutive(const Presentation& p, Direction d, int max_length) {
  using Letter = std::pair<CellId, bool>;
  using Word = std::vector<Letter>;
  InvolutiveOneCategory c;
  c.name = "free" + std::to_string(max_length);
  const auto& zero = p.level(DirectionSet{});
  std::unordered_map<CellId, std::size_t> obj_of;
  for (CellId x : zero) {
    obj_of.emplace(x, c.objects.size());
    c.objects.push_back(p.qualified_name(x));
  }
  const std::size_t n_obj = c.objects.size();
  for (std::size_t o = 0; o < n_obj; ++o) {
    c.identity.push_back(c.arrows.size());
    c.arrows.push_back({"id_" + c.objects[o], o, o});
  }
  std::vector<Letter> letters;
  const DirectionSet level = DirectionSet::of({d});
  for (CellId f : p.level(level)) {
    letters.push_back({f, false});
    letters.push_back({f, true});
  }
  auto letter_src = [&](const Letter& l) {
    return obj_of.at(p.face(l.first, d, l.second ? Side::target : Side::source));
  };
  auto letter_tgt = [&](const Letter& l) {
    return obj_of.at(p.face(l.first, d, l.second ? Side::source : Side::target));
  };
  auto word_name = [&](const Word& w) {
    std::string s;
    for (const auto& l : w) s += (s.empty() ? "" : ".") + p.qualified_name(l.first) + (l.second ? "*" : "");
    return s;
  };
  std::map<Word, std::size_t> arrow_of;
  std::vector<Word> word_of(c.arrows.size());
  std::vector<Word> frontier;
  for (const auto& l : letters) frontier.push_back({l});
  for (int len = 1; len <= max_length && !frontier.empty(); ++len) {
    std::vector<Word> next;
    for (const Word& w : frontier) {
      arrow_of.emplace(w, c.arrows.size());
      word_of.push_back(w);
      c.arrows.push_back({word_name(w), letter_src(w.back()), letter_tgt(w.front())});
      if (len == max_length) continue;
      for (const auto& l : letters) {
        if (letter_tgt(l) != letter_src(w.back())) continue;
        Word ext = w;
        ext.push_back(l);
        next.push_back(std::move(ext));
      }
    }
    frontier = std::move(next);
  }
  std::vector<std::size_t> bottom(n_obj * n_obj);
  for (std::size_t x = 0; x < n_obj; ++x) {
    for (std::size_t y = 0; y < n_obj; ++y) {
      bottom[x * n_obj + y] = c.arrows.size();
      word_of.emplace_back();
      c.arrows.push_back({"bot_" + c.objects[x] + "_" + c.objects[y], x, y});
    }
  }
  auto is_bottom = [&](std::size_t a) { return a >= c.arrows.size() - n_obj * n_obj; };
  auto is_identity = [&](std::size_t a) { return a < n_obj; };
  // Composition on all composable pairs.
  std::vector<std::vector<std::size_t>> by_target(n_obj);
  for (std::size_t a = 0; a < c.arrows.size(); ++a) by_target[c.arrows[a].target].push_back(a);
  for (std::size_t x = 0; x < c.arrows.size(); ++x) {
    for (std::size_t y : by_target[c.arrows[x].source]) {
      std::size_t v;
      if (is_identity(x)) v = y;
      else if (is_identity(y)) v = x;
      else if (is_bottom(x) || is_bottom(y)) v = bottom[c.arrows[y].source * n_obj + c.arrows[x].target];
      else {
        Word w = word_of[x];
        w.insert(w.end(), word_of[y].begin(), word_of[y].end());
        auto it = arrow_of.find(w);
        v = it == arrow_of.end() ? bottom[c.arrows[y].source * n_obj + c.arrows[x].target] : it->second;
      }
      c.compose[{x, y}] = v;
    }
  }
  c.star.resize(c.arrows.size());
  for (std::size_t a = 0; a < c.arrows.size(); ++a) {
    if (is_identity(a)) {
      c.star[a] = a;
    } else if (is_bottom(a)) {
      c.star[a] = bottom[c.arrows[a].target * n_obj + c.arrows[a].source];
    } else {
      Word w(word_of[a].rbegin(), word_of[a].rend());
      for (auto& l : w) l.second = !l.second;
      c.star[a] = arrow_of.at(w);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Product

ProductTable::ProductTable(std::vector<InvolutiveOneCategory> factors, const TruncationConfig& cfg)
    : factors_(std::move(factors)) {
  cfg.validate();
  const int k = cfg.dir_universe;
  if (static_cast<int>(factors_.size()) < k) {
    throw UsageError("product needs one factor per direction: " + std::to_string(factors_.size()) + " < " + std::to_string(k));
  }
  factors_.resize(static_cast<std::size_t>(k));
  for (const auto& f : factors_) {
    Report r = validate_one_category(f);
    if (!r.ok()) throw UsageError("factor " + f.name + " is invalid [" + r.violations.front().tag + "]: " + r.violations.front().message);
    if (f.star.empty() && !f.arrows.empty()) throw UsageError("factor " + f.name + " has no involution");
  }

  auto pres = std::make_shared<Presentation>(cfg);
  std::vector<DirectionSet> levels;
  for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
    DirectionSet dirs = DirectionSet::from_mask(mask);
    if (dirs.size() <= cfg.max_dim) levels.push_back(dirs);
  }
  std::sort(levels.begin(), levels.end());
  for (DirectionSet dirs : levels) {
    base_[dirs.mask()] = static_cast<CellId>(pres->size());
    std::size_t count = 1;
    for (int j = 0; j < k; ++j) count *= radix(dirs, static_cast<std::size_t>(j));
    std::vector<std::size_t> slots(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < count; ++i) {
      std::size_t rest = i;
      for (int j = k - 1; j >= 0; --j) {
        std::size_t r = radix(dirs, static_cast<std::size_t>(j));
        slots[static_cast<std::size_t>(j)] = rest % r;
        rest /= r;
      }
      std::string name;
      for (int j = 0; j < k; ++j) {
        const auto& f = factors_[static_cast<std::size_t>(j)];
        std::size_t s = slots[static_cast<std::size_t>(j)];
        name += (j ? "|" : "") + (dirs.contains(j + 1) ? f.arrows[s].name : f.objects[s]);
      }
      pres->add_cell(dirs, name);
      slots_.push_back(slots);
    }
  }

  auto table = std::make_shared<StrictCategoryTable>(pres);
  for (CellId x = 0; x < pres->size(); ++x) {
    const DirectionSet dirs = pres->cell(x).dirs;
    const std::vector<std::size_t> sx = slots_[x];
    for (Direction d = 1; d <= k; ++d) {
      const auto& f = factors_[static_cast<std::size_t>(d - 1)];
      std::vector<std::size_t> s = sx;
      std::size_t& slot = s[static_cast<std::size_t>(d - 1)];
      if (dirs.contains(d)) {
        const auto& a = f.arrows[sx[static_cast<std::size_t>(d - 1)]];
        slot = a.source;
        pres->set_face(x, d, Side::source, cell(dirs.without(d), s));
        slot = a.target;
        pres->set_face(x, d, Side::target, cell(dirs.without(d), s));
        slot = f.star[sx[static_cast<std::size_t>(d - 1)]];
        table->set_dual(x, d, cell(dirs, s));
      } else if (dirs.size() + 1 <= cfg.max_dim) {
        slot = f.identity[sx[static_cast<std::size_t>(d - 1)]];
        table->set_refl(x, d, cell(dirs.with(d), s));
      }
    }
  }
  for (int di = 0; di < k; ++di) {
    const Direction d = di + 1;
    const auto& f = factors_[static_cast<std::size_t>(di)];
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> by_left(f.arrows.size());
    for (const auto& [key, v] : f.compose) by_left[key.first].push_back({key.second, v});
    for (DirectionSet dirs : levels) {
      if (!dirs.contains(d)) continue;
      for (CellId x : pres->level(dirs)) {
        std::vector<std::size_t> s = slots_[x];
        for (auto [y, xy] : by_left[slots_[x][static_cast<std::size_t>(di)]]) {
          s[static_cast<std::size_t>(di)] = y;
          CellId cy = cell(dirs, s);
          s[static_cast<std::size_t>(di)] = xy;
          table->set_comp(d, x, cy, cell(dirs, s));
        }
      }
    }
  }
  table_ = table;
}

std::size_t ProductTable::radix(DirectionSet dirs, std::size_t slot) const {
  const auto& f = factors_[slot];
  return dirs.contains(static_cast<Direction>(slot + 1)) ? f.arrows.size() : f.objects.size();
}

CellId ProductTable::cell(DirectionSet dirs, const std::vector<std::size_t>& slots) const {
  auto it = base_.find(dirs.mask());
  if (it == base_.end()) throw DomainError("level " + level_key(dirs) + " is outside the product's truncation");
  std::size_t idx = 0;
  for (std::size_t j = 0; j < slots.size(); ++j) idx = idx * radix(dirs, j) + slots[j];
  return it->second + static_cast<CellId>(idx);
}

ProductTable build_product(const std::vector<InvolutiveOneCategory>& family, const TruncationConfig& cfg) {
  return ProductTable(family, cfg);
}

// ---------------------------------------------------------------------------
// Fixtures

namespace fixtures {

PresentationPtr seed_presentation(const TruncationConfig& cfg) {
  auto p = std::make_shared<Presentation>(cfg);
  CellId a = p->add_cell({}, "a");
  CellId b = p->add_cell({}, "b");
  CellId f = p->add_cell(DirectionSet::of({1}), "f");
  CellId g = p->add_cell(DirectionSet::of({1}), "g");
  CellId k = p->add_cell(DirectionSet::of({2}), "k");
  p->set_face(f, 1, Side::source, a);
  p->set_face(f, 1, Side::target, b);
  p->set_face(g, 1, Side::source, b);
  p->set_face(g, 1, Side::target, a);
  p->set_face(k, 2, Side::source, a);
  p->set_face(k, 2, Side::target, a);
  return p;
}

PresentationPtr composable_quiver(int depth) {
  auto p = std::make_shared<Presentation>(TruncationConfig{1, 1, depth, 200000});
  CellId a = p->add_cell({}, "a");
  CellId b = p->add_cell({}, "b");
  CellId c = p->add_cell({}, "c");
  CellId f = p->add_cell(DirectionSet::of({1}), "f");
  CellId g = p->add_cell(DirectionSet::of({1}), "g");
  p->set_face(f, 1, Side::source, a);
  p->set_face(f, 1, Side::target, b);
  p->set_face(g, 1, Side::source, b);
  p->set_face(g, 1, Side::target, c);
  return p;
}

PresentationPtr exchange_square() {
  auto p = std::make_shared<Presentation>(TruncationConfig{2, 2, 3, 200000});
  CellId a = p->add_cell({}, "a");
  CellId pp = p->add_cell(DirectionSet::of({1}), "p");
  CellId q = p->add_cell(DirectionSet::of({2}), "q");
  CellId alpha = p->add_cell(DirectionSet::of({1, 2}), "alpha");
  for (Side side : {Side::source, Side::target}) {
    p->set_face(pp, 1, side, a);
    p->set_face(q, 2, side, a);
    p->set_face(alpha, 1, side, q);
    p->set_face(alpha, 2, side, pp);
  }
  return p;
}

PresentationPtr empty_presentation(const TruncationConfig& cfg) { return std::make_shared<Presentation>(cfg); }

}  // namespace fixtures

Separator make_word_separator(const TermStore& store, int max_length) {
  const Presentation& p = store.presentation();
  const TruncationConfig& cfg = p.config();
  Direction d = 0;
  for (DirectionSet dirs : p.levels()) {
    if (dirs.size() > 1) throw UsageError("word separator needs a presentation of dimension at most 1");
    if (dirs.size() == 1) {
      if (d != 0) throw UsageError("word separator needs 1-cells in a single direction");
      d = dirs.max();
    }
  }
  if (d == 0) d = 1;
  TruncationConfig tcfg = cfg;
  tcfg.max_dim = std::min(cfg.max_dim, 1);
  std::vector<InvolutiveOneCategory> family;
  for (Direction j = 1; j <= cfg.dir_universe; ++j) {
    family.push_back(j == d ? truncated_free_involutive(p, d, max_length) : terminal_category());
  }
  auto product = std::make_shared<ProductTable>(family, tcfg);
  const auto& free = product->factors()[static_cast<std::size_t>(d - 1)];
  SetMorphism m(store.presentation_ptr(), product->table()->cells_ptr());
  std::vector<std::size_t> slots(static_cast<std::size_t>(cfg.dir_universe), 0);
  for (CellId x = 0; x < p.size(); ++x) {
    std::fill(slots.begin(), slots.end(), 0);
    const Cell& cell = p.cell(x);
    slots[static_cast<std::size_t>(d - 1)] = cell.dim() == 0 ? free.object(p.qualified_name(x)) : free.arrow(p.qualified_name(x));
    m.set(x, product->cell(cell.dirs, slots));
  }
  auto a = std::make_shared<const GeneratorAssignment>(std::move(m), product->table());
  Separator s = make_separator(store, a, "free-words(" + std::to_string(max_length) + ")");
  s.describe = [a, product](std::uint32_t c) { return a->target().cells().qualified_name(c); };
  return s;
}

// ---------------------------------------------------------------------------
// Dimension-1 normal forms

std::string Word1::str(const Presentation& p) const {
  if (identity) return "id(" + p.qualified_name(object) + ")";
  if (letters.empty()) return object == kNoCell ? "" : p.qualified_name(object);
  std::string s;
  for (const auto& l : letters) s += (s.empty() ? "" : ".") + p.qualified_name(l.generator) + (l.starred ? "*" : "");
  return s;
}

namespace {

// Unshared expression tree for the dimension-1 rewrite system.
class RewriteTree {
 public:
  enum class Kind { letter, identity, dual, comp };
  struct Node {
    Kind kind;
    CellId cell;
    bool starred;
    int a;
    int b;
  };

  RewriteTree(const TermStore& store, TermId t) { root_ = build(store, t); }

  /// Applies redex number `which` in pre-order; false when none is left.
  bool step(std::size_t which) {
    std::size_t counter = which;
    int r = rewrite(root_, counter);
    if (r < 0) return false;
    root_ = r;
    return true;
  }
  [[nodiscard]] std::size_t redexes() const { return count(root_); }

  [[nodiscard]] Word1 word() const {
    Word1 w;
    int n = root_;
    if (nodes_[n].kind == Kind::identity) {
      w.identity = true;
      w.object = nodes_[n].cell;
      return w;
    }
    while (nodes_[n].kind == Kind::comp) {
      const Node& left = nodes_[nodes_[n].a];
      if (left.kind != Kind::letter) throw Error("rewriting stopped at a non-normal term");
      w.letters.push_back({left.cell, left.starred});
      n = nodes_[n].b;
    }
    if (nodes_[n].kind != Kind::letter) throw Error("rewriting stopped at a non-normal term");
    w.letters.push_back({nodes_[n].cell, nodes_[n].starred});
    return w;
  }

 private:
  int add(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
  }

  int build(const TermStore& store, TermId t) {
    const TermNode& n = store.node(t);
    switch (n.kind) {
      case TermKind::gen:
        if (n.dim() != 1) throw UsageError("normal form needs a 1-dimensional term: " + store.print(t));
        return add({Kind::letter, n.a, false, -1, -1});
      case TermKind::refl: {
        const TermNode& x = store.node(n.a);
        if (x.kind != TermKind::gen || x.dim() != 0) throw UsageError("ill-typed identity for dimension 1: " + store.print(t));
        return add({Kind::identity, x.a, false, -1, -1});
      }
      case TermKind::dual:
        return add({Kind::dual, 0, false, build(store, n.a), -1});
      case TermKind::comp: {
        int a = build(store, n.a);
        int b = build(store, n.b);
        return add({Kind::comp, 0, false, a, b});
      }
      case TermKind::kappa:
        break;
    }
    throw UsageError("kappa has no dimension-1 normal form: " + store.print(t));
  }

  [[nodiscard]] bool is_redex(int i) const {
    const Node& n = nodes_[i];
    if (n.kind == Kind::dual) return true;  // every dual is pushed inward
    if (n.kind == Kind::comp) {
      return nodes_[n.a].kind == Kind::identity || nodes_[n.b].kind == Kind::identity || nodes_[n.a].kind == Kind::comp;
    }
    return false;
  }

  [[nodiscard]] std::size_t count(int i) const {
    const Node& n = nodes_[i];
    std::size_t c = is_redex(i) ? 1 : 0;
    if (n.a >= 0) c += count(n.a);
    if (n.b >= 0) c += count(n.b);
    return c;
  }

  int apply(int i) {
    const Node n = nodes_[i];
    if (n.kind == Kind::dual) {
      const Node x = nodes_[n.a];
      switch (x.kind) {
        case Kind::dual: return x.a;
        case Kind::identity: return n.a;
        case Kind::letter: return add({Kind::letter, x.cell, !x.starred, -1, -1});
        case Kind::comp: {
          int l = add({Kind::dual, 0, false, x.b, -1});
          int r = add({Kind::dual, 0, false, x.a, -1});
          return add({Kind::comp, 0, false, l, r});
        }
      }
    }
    // comp
    if (nodes_[n.b].kind == Kind::identity) return n.a;
    if (nodes_[n.a].kind == Kind::identity) return n.b;
    const Node left = nodes_[n.a];
    int inner = add({Kind::comp, 0, false, left.b, n.b});
    return add({Kind::comp, 0, false, left.a, inner});
  }

  // Pre-order search for the counter-th redex; returns the new subtree or -1.
  int rewrite(int i, std::size_t& counter) {
    if (is_redex(i)) {
      if (counter == 0) return apply(i);
      --counter;
    }
    const Node n = nodes_[i];
    if (n.a >= 0) {
      int r = rewrite(n.a, counter);
      if (r >= 0) {
        Node copy = n;
        copy.a = r;
        return add(copy);
      }
    }
    if (n.b >= 0) {
      int r = rewrite(n.b, counter);
      if (r >= 0) {
        Node copy = n;
        copy.b = r;
        return add(copy);
      }
    }
    return -1;
  }

  std::vector<Node> nodes_;
  int root_ = -1;
};

void check_dim1(const TermStore& store, TermId t) {
  const TermNode& n = store.node(t);
  if (n.dim() > 1) throw UsageError("normal form needs a term of dimension at most 1: " + store.print(t));
}

}  // namespace

Word1 normal_form_dim1(const TermStore& store, TermId t) {
  check_dim1(store, t);
  const TermNode& n = store.node(t);
  if (n.dim() == 0) {
    Word1 w;
    w.object = n.a;
    return w;
  }
  RewriteTree tree(store, t);
  while (tree.step(0)) {
  }
  return tree.word();
}

Word1 normal_form_dim1_random(const TermStore& store, TermId t, std::mt19937_64& rng) {
  check_dim1(store, t);
  const TermNode& n = store.node(t);
  if (n.dim() == 0) {
    Word1 w;
    w.object = n.a;
    return w;
  }
  RewriteTree tree(store, t);
  for (std::size_t k = tree.redexes(); k > 0; k = tree.redexes()) {
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    tree.step(pick(rng));
  }
  return tree.word();
}

json OracleResult::to_json() const {
  return json{{"pairs", pairs},
              {"equal", equal},
              {"not_equal", not_equal},
              {"unknown", unknown},
              {"unknown_equal_forms", unknown_equal_forms},
              {"universe_size", universe_size},
              {"saturation", stats.to_json()},
              {"report", report.to_json()}};
}

OracleResult oracle_compare(PresentationPtr p, const TruncationConfig& cfg, const OracleOptions& options) {
  OracleResult res;
  res.report.name = "oracle";
  auto store = std::make_shared<TermStore>(p);
  TermUniverse u = enumerate_free_magma(store, cfg);
  res.universe_size = u.size();
  SessionOptions so;
  so.families = options.families;
  CongruenceSession session(store, so);
  session.add_universe(u);
  session.seed(instantiate_relations(u, RelationMode::strict, options.families));
  if (options.tamper) options.tamper(session, u);
  res.stats = session.saturate(cfg.saturation_budget);

  std::vector<Separator> seps{make_word_separator(*store, static_cast<int>(u.max_size()))};
  std::map<std::uint32_t, std::vector<TermId>> levels;
  std::unordered_map<TermId, Word1> nf;
  for (TermId t : u.terms()) {
    levels[store->node(t).dirs.mask()].push_back(t);
    nf.emplace(t, normal_form_dim1(*store, t));
  }
  for (const auto& [mask, terms] : levels) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        TermId x = terms[i], y = terms[j];
        ++res.pairs;
        bool same_form = nf.at(x) == nf.at(y);
        Verdict v;
        if (session.same_class(x, y)) {
          v = Verdict::equal;
        } else {
          v = decide_equal(session, x, y, seps).verdict;
        }
        ++res.report.checked;
        switch (v) {
          case Verdict::equal:
            ++res.equal;
            if (!same_form) {
              res.report.add("equal-vs-distinct-forms", "congruence identifies terms with different normal forms",
                             {store->print(x), store->print(y)});
            }
            break;
          case Verdict::not_equal:
            ++res.not_equal;
            if (same_form) {
              res.report.add("notequal-vs-equal-forms", "separated terms share a normal form", {store->print(x), store->print(y)});
            }
            break;
          case Verdict::unknown:
            ++res.unknown;
            if (same_form) ++res.unknown_equal_forms;
            break;
        }
      }
    }
  }
  return res;
}

}  // namespace omega_cube
