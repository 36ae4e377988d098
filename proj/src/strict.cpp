#include "omega_cube/strict.hpp"

#include <algorithm>
#include <map>

namespace omega_cube {

namespace {

std::string table_key(DirectionSet dirs, Direction d) { return level_key(dirs) + "/" + std::to_string(d); }

std::pair<DirectionSet, Direction> parse_table_key(const std::string& key) {
  auto slash = key.rfind('/');
  if (slash == std::string::npos || slash == 0) throw LoadError("bad table key: " + key);
  DirectionSet dirs;
  Direction d = 0;
  try {
    dirs = parse_level_key(key.substr(0, slash));
    d = std::stoi(key.substr(slash + 1));
  } catch (const LoadError&) {
    throw;
  } catch (const std::exception&) {
    throw LoadError("bad table key: " + key);
  }
  if (d < 1 || d > kMaxDirections) throw LoadError("bad direction in table key: " + key);
  return {dirs, d};
}

CellId lookup(const Presentation& p, DirectionSet dirs, const std::string& name, const std::string& where) {
  auto c = p.find(dirs, name);
  if (!c) throw LoadError("unknown cell '" + name + "' at level " + level_key(dirs) + " in " + where);
  return *c;
}

// Cells of a level grouped by one face, for enumerating composable pairs.
class FaceIndex {
 public:
  explicit FaceIndex(const StrictCategoryTable& c) : c_(c) {}

  const std::vector<CellId>& with_face(DirectionSet dirs, Direction d, Side side, CellId face) {
    std::uint64_t k = (static_cast<std::uint64_t>(face) << 8) | (static_cast<std::uint64_t>(d) << 1) |
                      static_cast<std::uint64_t>(side);
    auto& per_level = index_[dirs.mask()];
    auto it = per_level.find(k);
    if (it != per_level.end()) return it->second;
    std::vector<CellId> out;
    for (CellId x : c_.cells().level(dirs)) {
      if (c_.cells().raw_face(x, d, side) == face) out.push_back(x);
    }
    return per_level.emplace(k, std::move(out)).first->second;
  }

 private:
  const StrictCategoryTable& c_;
  std::map<std::uint32_t, std::unordered_map<std::uint64_t, std::vector<CellId>>> index_;
};

}  // namespace

StrictCategoryTable::StrictCategoryTable(std::shared_ptr<Presentation> cells)
    : cells_(std::move(cells)), comp_(kMaxDirections + 1) {
  if (!cells_) throw UsageError("strict table needs an underlying presentation");
}

void StrictCategoryTable::set_refl(CellId x, Direction d, CellId image) { refl_[key(x, d)] = image; }
void StrictCategoryTable::set_dual(CellId x, Direction d, CellId image) { dual_[key(x, d)] = image; }
void StrictCategoryTable::set_comp(Direction d, CellId x, CellId y, CellId image) {
  if (d < 1 || d > kMaxDirections) throw UsageError("direction out of range: " + std::to_string(d));
  comp_[d][pair_key(x, y)] = image;
}

std::optional<CellId> StrictCategoryTable::find_refl(CellId x, Direction d) const {
  auto it = refl_.find(key(x, d));
  if (it == refl_.end()) return std::nullopt;
  return it->second;
}

std::optional<CellId> StrictCategoryTable::find_dual(CellId x, Direction d) const {
  auto it = dual_.find(key(x, d));
  if (it == dual_.end()) return std::nullopt;
  return it->second;
}

std::optional<CellId> StrictCategoryTable::find_comp(Direction d, CellId x, CellId y) const {
  if (d < 1 || d > kMaxDirections) return std::nullopt;
  auto it = comp_[d].find(pair_key(x, y));
  if (it == comp_[d].end()) return std::nullopt;
  return it->second;
}

CellId StrictCategoryTable::refl(CellId x, Direction d) const {
  auto r = find_refl(x, d);
  if (!r) throw DomainError("identity in direction " + std::to_string(d) + " undefined on " + cells_->qualified_name(x));
  return *r;
}

CellId StrictCategoryTable::dual(CellId x, Direction d) const {
  auto r = find_dual(x, d);
  if (!r) throw DomainError("involution in direction " + std::to_string(d) + " undefined on " + cells_->qualified_name(x));
  return *r;
}

CellId StrictCategoryTable::comp(Direction d, CellId x, CellId y) const {
  auto r = find_comp(d, x, y);
  if (!r) {
    throw DomainError("composition in direction " + std::to_string(d) + " undefined on (" + cells_->qualified_name(x) +
                      ", " + cells_->qualified_name(y) + ")");
  }
  return *r;
}

bool StrictCategoryTable::composable(Direction d, CellId x, CellId y) const {
  const Cell& cx = cells_->cell(x);
  if (!(cx.dirs == cells_->cell(y).dirs) || !cx.dirs.contains(d)) return false;
  CellId sx = cells_->raw_face(x, d, Side::source);
  return sx != kNoCell && sx == cells_->raw_face(y, d, Side::target);
}

std::vector<std::array<CellId, 4>> StrictCategoryTable::comp_entries() const {
  std::vector<std::array<CellId, 4>> out;
  for (Direction d = 1; d <= kMaxDirections; ++d) {
    std::vector<std::array<CellId, 4>> part;
    for (const auto& [k, v] : comp_[d]) {
      part.push_back({static_cast<CellId>(d), static_cast<CellId>(k >> 32), static_cast<CellId>(k & 0xffffffffu), v});
    }
    std::sort(part.begin(), part.end());
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

json StrictCategoryTable::to_json() const {
  json j = cells_->to_json();
  const Presentation& p = *cells_;
  auto unary = [&](const std::unordered_map<std::uint64_t, CellId>& table) {
    std::map<std::pair<DirectionSet, Direction>, std::vector<std::pair<CellId, CellId>>> grouped;
    for (const auto& [k, v] : table) {
      CellId x = static_cast<CellId>(k >> 6);
      grouped[{p.cell(x).dirs, static_cast<Direction>(k & 63u)}].push_back({x, v});
    }
    json out = json::object();
    for (auto& [lk, entries] : grouped) {
      std::sort(entries.begin(), entries.end());
      json m = json::object();
      for (auto [x, v] : entries) m[p.cell(x).name] = p.cell(v).name;
      out[table_key(lk.first, lk.second)] = m;
    }
    return out;
  };
  j["refl"] = unary(refl_);
  j["dual"] = unary(dual_);
  std::map<std::pair<DirectionSet, Direction>, json> comp;
  for (const auto& e : comp_entries()) {
    auto& slot = comp[{p.cell(e[1]).dirs, static_cast<Direction>(e[0])}];
    if (slot.is_null()) slot = json::array();
    slot.push_back(json::array({p.cell(e[1]).name, p.cell(e[2]).name, p.cell(e[3]).name}));
  }
  json cj = json::object();
  for (auto& [lk, entries] : comp) cj[table_key(lk.first, lk.second)] = entries;
  j["comp"] = cj;
  return j;
}

StrictCategoryTable StrictCategoryTable::from_json(const json& j) {
  auto p = std::make_shared<Presentation>(Presentation::from_json(j));
  StrictCategoryTable c(p);
  auto read_unary = [&](const char* field, bool raises) {
    if (!j.contains(field)) return;
    const json& tables = j.at(field);
    if (!tables.is_object()) throw LoadError(std::string("'") + field + "' must be an object");
    for (const auto& [k, m] : tables.items()) {
      auto [dirs, d] = parse_table_key(k);
      if (raises == dirs.contains(d)) throw LoadError(std::string("direction does not fit level in ") + field + " key " + k);
      DirectionSet image_dirs = raises ? dirs.with(d) : dirs;
      if (!m.is_object()) throw LoadError(std::string(field) + " table " + k + " must be an object");
      for (const auto& [x, v] : m.items()) {
        if (!v.is_string()) throw LoadError(std::string(field) + " image for " + x + " must be a string");
        CellId cx = lookup(*p, dirs, x, std::string(field) + " " + k);
        CellId cv = lookup(*p, image_dirs, v.get<std::string>(), std::string(field) + " " + k);
        if (raises) c.set_refl(cx, d, cv);
        else c.set_dual(cx, d, cv);
      }
    }
  };
  read_unary("refl", true);
  read_unary("dual", false);
  if (j.contains("comp")) {
    const json& tables = j.at("comp");
    if (!tables.is_object()) throw LoadError("'comp' must be an object");
    for (const auto& [k, entries] : tables.items()) {
      auto [dirs, d] = parse_table_key(k);
      if (!dirs.contains(d)) throw LoadError("direction does not fit level in comp key " + k);
      if (!entries.is_array()) throw LoadError("comp table " + k + " must be an array");
      for (const auto& e : entries) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_string()) {
          throw LoadError("comp entries must be [x, y, x∘y] name triples in " + k);
        }
        c.set_comp(d, lookup(*p, dirs, e[0].get<std::string>(), "comp " + k),
                   lookup(*p, dirs, e[1].get<std::string>(), "comp " + k),
                   lookup(*p, dirs, e[2].get<std::string>(), "comp " + k));
      }
    }
  }
  return c;
}

Report validate_strict(const StrictCategoryTable& c) {
  Report r;
  r.name = "strict";
  const Presentation& p = c.cells();
  const TruncationConfig& cfg = c.config();
  const DirectionSet universe = cfg.universe();
  auto nm = [&](CellId x) { return p.qualified_name(x); };
  auto ds = [](Direction d) { return std::to_string(d); };
  FaceIndex idx(c);

  // Structural axioms of identities and involutions.
  for (DirectionSet dirs : p.levels()) {
    for (CellId x : p.level(dirs)) {
      for (Direction d : universe.to_vector()) {
        if (dirs.contains(d)) {
          ++r.checked;
          auto v = c.find_dual(x, d);
          if (!v) {
            r.add("dual-total", "involution " + ds(d) + " undefined", {nm(x)});
            continue;
          }
          if (!(p.cell(*v).dirs == dirs)) {
            r.add("dual-typing", "involution " + ds(d) + " changes level", {nm(x), nm(*v)});
            continue;
          }
          if (p.raw_face(*v, d, Side::source) != p.raw_face(x, d, Side::target) ||
              p.raw_face(*v, d, Side::target) != p.raw_face(x, d, Side::source)) {
            r.add("dual-faces", "involution " + ds(d) + " does not swap the faces in direction " + ds(d), {nm(x), nm(*v)});
          }
          for (Direction e : dirs.to_vector()) {
            if (e == d) continue;
            for (Side side : {Side::source, Side::target}) {
              CellId fx = p.raw_face(x, e, side);
              auto lhs = p.raw_face(*v, e, side);
              auto rhs = fx == kNoCell ? std::nullopt : c.find_dual(fx, d);
              if (!rhs || lhs != *rhs) {
                r.add("dual-transverse",
                      std::string(1, side_char(side)) + ds(e) + " of involution " + ds(d) + " differs from involution of the face",
                      {nm(x)});
              }
            }
          }
        } else if (dirs.size() + 1 <= cfg.max_dim) {
          ++r.checked;
          auto v = c.find_refl(x, d);
          if (!v) {
            r.add("refl-total", "identity " + ds(d) + " undefined", {nm(x)});
            continue;
          }
          if (!(p.cell(*v).dirs == dirs.with(d))) {
            r.add("refl-typing", "identity " + ds(d) + " lands in the wrong level", {nm(x), nm(*v)});
            continue;
          }
          if (p.raw_face(*v, d, Side::source) != x || p.raw_face(*v, d, Side::target) != x) {
            r.add("refl-faces", "faces of identity " + ds(d) + " are not the cell", {nm(x), nm(*v)});
          }
          for (Direction e : dirs.to_vector()) {
            for (Side side : {Side::source, Side::target}) {
              CellId fx = p.raw_face(x, e, side);
              auto rhs = fx == kNoCell ? std::nullopt : c.find_refl(fx, d);
              if (!rhs || p.raw_face(*v, e, side) != *rhs) {
                r.add("refl-transverse",
                      std::string(1, side_char(side)) + ds(e) + " of identity " + ds(d) + " differs from identity of the face",
                      {nm(x)});
              }
            }
          }
        }
      }
    }
  }

  // Composition: typing of entries, then totality on composable pairs.
  for (const auto& e : c.comp_entries()) {
    Direction d = static_cast<Direction>(e[0]);
    CellId x = e[1], y = e[2], xy = e[3];
    ++r.checked;
    if (!c.composable(d, x, y)) {
      r.add("comp-typing", "composition " + ds(d) + " defined on a non-composable pair", {nm(x), nm(y)});
      continue;
    }
    DirectionSet dirs = p.cell(x).dirs;
    if (!(p.cell(xy).dirs == dirs)) {
      r.add("comp-typing", "composition " + ds(d) + " lands in the wrong level", {nm(x), nm(y), nm(xy)});
      continue;
    }
    if (p.raw_face(xy, d, Side::source) != p.raw_face(y, d, Side::source) ||
        p.raw_face(xy, d, Side::target) != p.raw_face(x, d, Side::target)) {
      r.add("comp-faces", "faces of composite in direction " + ds(d) + " are not s(right), t(left)", {nm(x), nm(y), nm(xy)});
    }
    for (Direction f : dirs.to_vector()) {
      if (f == d) continue;
      for (Side side : {Side::source, Side::target}) {
        auto rhs = c.find_comp(d, p.raw_face(x, f, side), p.raw_face(y, f, side));
        if (!rhs || p.raw_face(xy, f, side) != *rhs) {
          r.add("comp-transverse",
                std::string(1, side_char(side)) + std::to_string(f) + " of composite " + ds(d) + " differs from composite of faces",
                {nm(x), nm(y)});
        }
      }
    }
  }
  for (DirectionSet dirs : p.levels()) {
    for (Direction d : dirs.to_vector()) {
      for (CellId x : p.level(dirs)) {
        CellId sx = p.raw_face(x, d, Side::source);
        if (sx == kNoCell) continue;
        for (CellId y : idx.with_face(dirs, d, Side::target, sx)) {
          ++r.checked;
          if (!c.find_comp(d, x, y)) r.add("comp-total", "composition " + ds(d) + " undefined on a composable pair", {nm(x), nm(y)});
        }
      }
    }
  }

  // Associativity and unitality.
  for (const auto& e : c.comp_entries()) {
    Direction d = static_cast<Direction>(e[0]);
    CellId x = e[1], y = e[2], xy = e[3];
    if (!c.composable(d, x, y)) continue;
    DirectionSet dirs = p.cell(x).dirs;
    for (CellId z : idx.with_face(dirs, d, Side::target, p.raw_face(y, d, Side::source))) {
      auto yz = c.find_comp(d, y, z);
      if (!yz) continue;
      auto lhs = c.find_comp(d, xy, z);
      auto rhs = c.find_comp(d, x, *yz);
      ++r.checked;
      if (!lhs || !rhs || *lhs != *rhs) {
        r.add("assoc", "associativity fails in direction " + ds(d), {nm(x), nm(y), nm(z)});
      }
    }
  }
  for (DirectionSet dirs : p.levels()) {
    for (Direction d : dirs.to_vector()) {
      for (CellId x : p.level(dirs)) {
        auto src_id = c.find_refl(p.raw_face(x, d, Side::source), d);
        auto tgt_id = c.find_refl(p.raw_face(x, d, Side::target), d);
        ++r.checked;
        if (src_id) {
          auto v = c.find_comp(d, x, *src_id);
          if (!v || *v != x) r.add("unit", "right unit law fails in direction " + ds(d), {nm(x)});
        }
        if (tgt_id) {
          auto v = c.find_comp(d, *tgt_id, x);
          if (!v || *v != x) r.add("unit", "left unit law fails in direction " + ds(d), {nm(x)});
        }
      }
    }
  }

  // Functoriality of identities in transverse directions.
  for (const auto& e : c.comp_entries()) {
    Direction d = static_cast<Direction>(e[0]);
    CellId x = e[1], y = e[2], xy = e[3];
    if (!c.composable(d, x, y)) continue;
    DirectionSet dirs = p.cell(x).dirs;
    if (dirs.size() + 1 > cfg.max_dim) continue;
    for (Direction f : universe.to_vector()) {
      if (dirs.contains(f)) continue;
      auto ix = c.find_refl(x, f), iy = c.find_refl(y, f), ixy = c.find_refl(xy, f);
      if (!ix || !iy || !ixy) continue;
      ++r.checked;
      auto rhs = c.find_comp(d, *ix, *iy);
      if (!rhs || *rhs != *ixy) {
        r.add("id-functoriality", "identity " + ds(f) + " does not preserve composition " + ds(d), {nm(x), nm(y)});
      }
    }
  }

  // Exchange: (x∘e y)∘d(w∘e z) = (x∘d w)∘e(y∘d z).
  for (DirectionSet dirs : p.levels()) {
    auto dv = dirs.to_vector();
    for (Direction d : dv) {
      for (Direction f : dv) {
        if (f == d) continue;
        for (CellId x : p.level(dirs)) {
          for (CellId w : idx.with_face(dirs, d, Side::target, p.raw_face(x, d, Side::source))) {
            auto xw = c.find_comp(d, x, w);
            if (!xw) continue;
            for (CellId y : idx.with_face(dirs, f, Side::target, p.raw_face(x, f, Side::source))) {
              auto xy = c.find_comp(f, x, y);
              if (!xy) continue;
              for (CellId z : idx.with_face(dirs, d, Side::target, p.raw_face(y, d, Side::source))) {
                if (p.raw_face(w, f, Side::source) != p.raw_face(z, f, Side::target)) continue;
                auto yz = c.find_comp(d, y, z);
                auto wz = c.find_comp(f, w, z);
                if (!yz || !wz) continue;
                ++r.checked;
                auto lhs = c.find_comp(d, *xy, *wz);
                auto rhs = c.find_comp(f, *xw, *yz);
                if (!lhs || !rhs || *lhs != *rhs) {
                  r.add("exchange", "exchange fails for directions " + ds(d) + "," + ds(f), {nm(x), nm(y), nm(w), nm(z)});
                }
              }
            }
          }
        }
      }
    }
  }
  return r;
}

Report validate_involutive(const StrictCategoryTable& c) {
  Report r;
  r.name = "involutive";
  const Presentation& p = c.cells();
  auto nm = [&](CellId x) { return p.qualified_name(x); };
  auto ds = [](Direction d) { return std::to_string(d); };

  for (DirectionSet dirs : p.levels()) {
    auto dv = dirs.to_vector();
    for (CellId x : p.level(dirs)) {
      for (Direction d : dv) {
        auto xd = c.find_dual(x, d);
        if (!xd) continue;
        ++r.checked;
        auto xdd = c.find_dual(*xd, d);
        if (!xdd || *xdd != x) r.add("involutivity", "involution " + ds(d) + " is not involutive", {nm(x)});
        for (Direction e : dv) {
          if (e <= d) continue;
          auto xe = c.find_dual(x, e);
          if (!xe) continue;
          ++r.checked;
          auto lhs = c.find_dual(*xd, e);
          auto rhs = c.find_dual(*xe, d);
          if (!lhs || !rhs || *lhs != *rhs) {
            r.add("star-commute", "involutions " + ds(d) + " and " + ds(e) + " do not commute", {nm(x)});
          }
        }
      }
      // Hermitian identities.
      for (Direction d : c.config().universe().to_vector()) {
        if (dirs.contains(d)) continue;
        auto id = c.find_refl(x, d);
        if (!id) continue;
        ++r.checked;
        auto star = c.find_dual(*id, d);
        if (!star || *star != *id) r.add("id-hermitian", "identity " + ds(d) + " is not self-dual", {nm(x)});
        for (Direction e : dv) {
          auto lhs = c.find_dual(*id, e);
          auto xe = c.find_dual(x, e);
          auto rhs = xe ? c.find_refl(*xe, d) : std::nullopt;
          ++r.checked;
          if (!lhs || !rhs || *lhs != *rhs) {
            r.add("id-hermitian-transverse", "involution " + ds(e) + " of identity " + ds(d) + " differs", {nm(x)});
          }
        }
      }
    }
  }

  // Functoriality of involutions over composition.
  for (const auto& e : c.comp_entries()) {
    Direction d = static_cast<Direction>(e[0]);
    CellId x = e[1], y = e[2], xy = e[3];
    if (!c.composable(d, x, y)) continue;
    for (Direction f : p.cell(x).dirs.to_vector()) {
      auto lhs = c.find_dual(xy, f);
      auto xs = c.find_dual(x, f), ys = c.find_dual(y, f);
      if (!lhs || !xs || !ys) continue;
      ++r.checked;
      if (f == d) {
        auto rhs = c.find_comp(d, *ys, *xs);
        if (!rhs || *rhs != *lhs) r.add("star-antihomo", "involution " + ds(d) + " does not reverse composition", {nm(x), nm(y)});
      } else {
        auto rhs = c.find_comp(d, *xs, *ys);
        if (!rhs || *rhs != *lhs) {
          r.add("star-homo-transverse", "involution " + ds(f) + " does not preserve composition " + ds(d), {nm(x), nm(y)});
        }
      }
    }
  }
  return r;
}

GeneratorAssignment::GeneratorAssignment(SetMorphism map, StrictTablePtr target)
    : map_(std::move(map)), target_(std::move(target)) {
  if (!target_) throw UsageError("assignment needs a target table");
  if (map_.target().get() != target_->cells_ptr().get()) {
    throw UsageError("assignment map does not land in the target table's cells");
  }
  Report r = validate_morphism(map_);
  if (!r.ok()) {
    const auto& v = r.violations.front();
    std::string w;
    for (const auto& s : v.witnesses) w += (w.empty() ? "" : ", ") + s;
    throw UsageError("invalid generator assignment [" + v.tag + "]: " + v.message + (w.empty() ? "" : " (" + w + ")"));
  }
}

CellId Evaluator::operator()(TermId t) {
  auto it = memo_.find(t);
  if (it != memo_.end()) return it->second;
  const TermNode& n = store_.node(t);
  const StrictCategoryTable& c = a_.target();
  CellId v = kNoCell;
  switch (n.kind) {
    case TermKind::gen:
      v = a_(n.a);
      break;
    case TermKind::refl:
      v = c.refl((*this)(n.a), n.dir);
      break;
    case TermKind::dual:
      v = c.dual((*this)(n.a), n.dir);
      break;
    case TermKind::comp: {
      CellId x = (*this)(n.a);
      CellId y = (*this)(n.b);
      if (!c.composable(n.dir, x, y)) {
        throw DomainError("composition " + std::to_string(n.dir) + " of " + store_.print(t) +
                          " is undefined in the target: source of left evaluates to " +
                          c.cells().qualified_name(c.face(x, n.dir, Side::source)) + ", target of right evaluates to " +
                          c.cells().qualified_name(c.face(y, n.dir, Side::target)));
      }
      v = c.comp(n.dir, x, y);
      break;
    }
    case TermKind::kappa:
      throw UsageError("kappa terms have no strict evaluation: " + store_.print(t));
  }
  memo_.emplace(t, v);
  return v;
}

CellId eval_term(const TermStore& store, TermId t, const GeneratorAssignment& a) {
  Evaluator ev(store, a);
  return ev(t);
}

std::unordered_map<TermId, CellId> extend_bottom_up(const GeneratorAssignment& a, const TermUniverse& u) {
  const TermStore& store = *u.store();
  const StrictCategoryTable& c = a.target();
  std::unordered_map<TermId, CellId> value;
  std::vector<TermId> order = u.terms();
  std::stable_sort(order.begin(), order.end(),
                   [&](TermId x, TermId y) { return store.node(x).size < store.node(y).size; });
  for (TermId t : order) {
    const TermNode& n = store.node(t);
    std::optional<CellId> v;
    auto child = [&](std::uint32_t k) -> std::optional<CellId> {
      auto it = value.find(k);
      if (it == value.end()) return std::nullopt;
      return it->second;
    };
    if (n.kind == TermKind::gen) {
      v = a(n.a);
    } else if (n.kind == TermKind::refl) {
      if (auto x = child(n.a)) v = c.find_refl(*x, n.dir);
    } else if (n.kind == TermKind::dual) {
      if (auto x = child(n.a)) v = c.find_dual(*x, n.dir);
    } else if (n.kind == TermKind::comp) {
      auto x = child(n.a), y = child(n.b);
      if (x && y) v = c.find_comp(n.dir, *x, *y);
    }
    if (v) value.emplace(t, *v);
  }
  return value;
}

Report check_universal_factorization(const GeneratorAssignment& a, const TermUniverse& u) {
  Report r;
  r.name = "universal-factorization";
  TermStore& store = u.mutable_store();
  const StrictCategoryTable& c = a.target();
  const Presentation& src = store.presentation();
  auto nm = [&](CellId x) { return c.cells().qualified_name(x); };

  if (a.map().source().get() != &src) {
    r.add("assignment-source", "assignment is not defined on the universe's presentation");
    return r;
  }

  Evaluator ev(store, a);
  for (CellId g = 0; g < src.size(); ++g) {
    ++r.checked;
    CellId v = ev(store.gen(g));
    if (v != a(g)) r.add("generators", "evaluation of a generator differs from its assignment", {src.qualified_name(g)});
  }

  std::unordered_map<TermId, CellId> values;
  for (TermId t : u.terms()) {
    if (store.contains_kappa(t)) {
      r.add("kappa", "universe member contains kappa", {store.print(t)});
      continue;
    }
    CellId v;
    try {
      v = ev(t);
    } catch (const DomainError& e) {
      r.add("eval-domain", e.what(), {store.print(t)});
      continue;
    }
    values.emplace(t, v);
    const TermNode& n = store.node(t);
    ++r.checked;
    if (!(c.cells().cell(v).dirs == n.dirs)) {
      r.add("level", "evaluation lands in the wrong level", {store.print(t), nm(v)});
      continue;
    }
    std::optional<CellId> expected;
    switch (n.kind) {
      case TermKind::gen:
        expected = a(n.a);
        break;
      case TermKind::refl:
        expected = c.find_refl(ev(n.a), n.dir);
        break;
      case TermKind::dual:
        expected = c.find_dual(ev(n.a), n.dir);
        break;
      case TermKind::comp:
        expected = c.find_comp(n.dir, ev(n.a), ev(n.b));
        break;
      case TermKind::kappa:
        break;
    }
    if (!expected || *expected != v) r.add("homomorphism", "evaluation is not homomorphic at this node", {store.print(t)});
    for (Direction d : n.dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        ++r.checked;
        TermId b = store.boundary(t, d, side);
        CellId vb = ev(b);
        if (vb != c.face(v, d, side)) {
          r.add("naturality", std::string(1, side_char(side)) + std::to_string(d) + " of the value differs from the value of the face",
                {store.print(t)});
        }
      }
    }
  }

  auto other = extend_bottom_up(a, u);
  for (TermId t : u.terms()) {
    auto it = values.find(t);
    if (it == values.end()) continue;
    ++r.checked;
    auto jt = other.find(t);
    if (jt == other.end() || jt->second != it->second) {
      r.add("uniqueness", "table-driven extension disagrees with evaluation", {store.print(t)});
    }
  }
  return r;
}

Separator make_separator(const TermStore& store, std::shared_ptr<const GeneratorAssignment> a, std::string label) {
  auto ev = std::make_shared<Evaluator>(store, *a);
  Separator s;
  s.label = std::move(label);
  s.evaluate = [ev, a, &store](TermId t) -> std::optional<std::uint32_t> {
    if (store.contains_kappa(t)) return std::nullopt;
    try {
      return (*ev)(t);
    } catch (const Error&) {
      return std::nullopt;
    }
  };
  s.describe = [a](std::uint32_t cell) { return a->target().cells().qualified_name(cell); };
  return s;
}

QuotientTable build_quotient_table(const CongruenceSession& s, const TermUniverse& u) {
  TermStore& store = u.mutable_store();
  QuotientTable q;
  auto pres = std::make_shared<Presentation>(store.config());
  std::unordered_map<TermId, CellId> cell_of_class;
  std::vector<TermId> first_member;
  for (TermId t : u.terms()) {
    if (!s.contains(t)) throw UsageError("universe member is not in the session: " + store.print(t));
    TermId cls = s.class_of(t);
    auto it = cell_of_class.find(cls);
    if (it == cell_of_class.end()) {
      CellId id = pres->add_cell(store.node(t).dirs, "q" + std::to_string(first_member.size()));
      first_member.push_back(t);
      it = cell_of_class.emplace(cls, id).first;
    }
    q.cell_of.emplace(t, it->second);
  }
  for (CellId x = 0; x < first_member.size(); ++x) {
    TermId t = first_member[x];
    for (Direction d : store.node(t).dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        TermId b = store.boundary(t, d, side);
        auto it = q.cell_of.find(b);
        if (it == q.cell_of.end()) throw DomainError("boundary leaves the universe: " + store.print(b));
        pres->set_face(x, d, side, it->second);
      }
    }
  }
  q.table = std::make_shared<StrictCategoryTable>(pres);
  StrictCategoryTable& c = *q.table;
  auto conflict = [&](TermId t) {
    throw DomainError("congruent arguments give non-congruent results at " + store.print(t));
  };
  for (TermId t : u.terms()) {
    const TermNode& n = store.node(t);
    CellId v = q.cell_of.at(t);
    if (n.kind == TermKind::refl) {
      CellId x = q.cell_of.at(n.a);
      auto old = c.find_refl(x, n.dir);
      if (old && *old != v) conflict(t);
      c.set_refl(x, n.dir, v);
    } else if (n.kind == TermKind::dual) {
      CellId x = q.cell_of.at(n.a);
      auto old = c.find_dual(x, n.dir);
      if (old && *old != v) conflict(t);
      c.set_dual(x, n.dir, v);
    } else if (n.kind == TermKind::comp) {
      CellId x = q.cell_of.at(n.a), y = q.cell_of.at(n.b);
      auto old = c.find_comp(n.dir, x, y);
      if (old && *old != v) conflict(t);
      c.set_comp(n.dir, x, y, v);
    }
  }
  SetMorphism m(store.presentation_ptr(), pres);
  for (CellId g = 0; g < store.presentation().size(); ++g) {
    auto gt = store.find(TermKind::gen, 0, g);
    if (!gt || !q.cell_of.count(*gt)) throw DomainError("generator missing from the universe: " + store.presentation().qualified_name(g));
    m.set(g, q.cell_of.at(*gt));
  }
  q.assignment = std::make_shared<GeneratorAssignment>(std::move(m), q.table);
  return q;
}

}  // namespace omega_cube
