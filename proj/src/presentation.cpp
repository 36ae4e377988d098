#include "omega_cube/presentation.hpp"

#include <algorithm>
#include <charconv>

namespace omega_cube {

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  for (char c : name) {
    bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
              c == '_' || c == '.' || c == '\'' || c == '|' || c == ':' || c == '+' || c == '-' ||
              c == '~' || c == '#' || c == '^' || c == '*' || c == '<' || c == '>' || c == '=';
    if (!ok) return false;
  }
  return true;
}

std::string level_key(DirectionSet dirs) { return std::to_string(dirs.size()) + "/" + dirs.str(); }

DirectionSet parse_level_key(std::string_view key) {
  auto slash = key.find('/');
  if (slash == std::string_view::npos) throw LoadError("malformed level key '" + std::string(key) + "'");
  int dim = -1;
  auto head = key.substr(0, slash);
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), dim);
  if (ec != std::errc() || ptr != head.data() + head.size())
    throw LoadError("malformed dimension in level key '" + std::string(key) + "'");
  DirectionSet dirs = DirectionSet::parse(key.substr(slash + 1));
  if (dirs.size() != dim)
    throw LoadError("level key '" + std::string(key) + "': dimension differs from direction count");
  return dirs;
}

CellId Presentation::add_cell(DirectionSet dirs, const std::string& name) {
  if (!valid_identifier(name)) throw LoadError("malformed cell identifier '" + name + "'");
  if (dirs.max() > cfg_.dir_universe)
    throw LoadError("cell '" + name + "' uses directions outside {1.." + std::to_string(cfg_.dir_universe) + "}");
  if (dirs.size() > cfg_.max_dim)
    throw LoadError("cell '" + name + "' exceeds max_dim " + std::to_string(cfg_.max_dim));
  if (find(dirs, name)) throw LoadError("duplicate cell '" + name + "' at level " + level_key(dirs));
  auto id = static_cast<CellId>(cells_.size());
  cells_.push_back({dirs, name});
  faces_.emplace_back(2 * static_cast<std::size_t>(dirs.size()), kNoCell);
  levels_[dirs.mask()].push_back(id);
  by_name_[name].push_back(id);
  return id;
}

void Presentation::set_face(CellId cell, Direction d, Side side, CellId image) {
  const Cell& c = cells_.at(cell);
  int idx = c.dirs.index_of(d);
  if (idx < 0) throw LoadError("cell '" + c.name + "' has no direction " + std::to_string(d));
  if (image >= cells_.size()) throw LoadError("face image out of range for cell '" + c.name + "'");
  faces_[cell][2 * idx + static_cast<int>(side)] = image;
}

CellId Presentation::raw_face(CellId cell, Direction d, Side side) const {
  int idx = cells_.at(cell).dirs.index_of(d);
  if (idx < 0) return kNoCell;
  return faces_[cell][2 * idx + static_cast<int>(side)];
}

CellId Presentation::face(CellId cell, Direction d, Side side) const {
  const Cell& c = cells_.at(cell);
  int idx = c.dirs.index_of(d);
  if (idx < 0) throw DomainError("cell '" + c.name + "' has no direction " + std::to_string(d));
  CellId f = faces_[cell][2 * idx + static_cast<int>(side)];
  if (f == kNoCell)
    throw DomainError("cell '" + c.name + "' has no " + side_char(side) + "-face in direction " + std::to_string(d));
  return f;
}

std::optional<CellId> Presentation::find(DirectionSet dirs, std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  for (CellId id : it->second)
    if (cells_[id].dirs == dirs) return id;
  return std::nullopt;
}

const std::vector<CellId>& Presentation::level(DirectionSet dirs) const {
  static const std::vector<CellId> empty;
  auto it = levels_.find(dirs.mask());
  return it == levels_.end() ? empty : it->second;
}

std::vector<DirectionSet> Presentation::levels() const {
  std::vector<DirectionSet> out;
  for (const auto& [mask, ids] : levels_) out.push_back(DirectionSet::from_mask(mask));
  std::sort(out.begin(), out.end());
  return out;
}

bool Presentation::name_is_unique(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  return it != by_name_.end() && it->second.size() == 1;
}

std::string Presentation::qualified_name(CellId id) const {
  const Cell& c = cells_.at(id);
  if (name_is_unique(c.name)) return c.name;
  return c.name + "@" + level_key(c.dirs);
}

std::optional<CellId> Presentation::resolve(std::string_view text) const {
  auto at = text.find('@');
  if (at == std::string_view::npos) {
    auto it = by_name_.find(std::string(text));
    if (it == by_name_.end() || it->second.size() != 1) return std::nullopt;
    return it->second.front();
  }
  DirectionSet dirs;
  try {
    dirs = parse_level_key(text.substr(at + 1));
  } catch (const LoadError&) {
    return std::nullopt;
  }
  return find(dirs, text.substr(0, at));
}

json Presentation::to_json() const {
  json out;
  out["config"] = cfg_.to_json();
  json cells = json::object();
  json faces = json::object();
  for (DirectionSet dirs : levels()) {
    json names = json::array();
    for (CellId id : level(dirs)) names.push_back(cells_[id].name);
    cells[level_key(dirs)] = std::move(names);
    for (Direction d : dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        json table = json::object();
        for (CellId id : level(dirs)) {
          CellId f = raw_face(id, d, side);
          if (f != kNoCell) table[cells_[id].name] = cells_[f].name;
        }
        faces[level_key(dirs) + "/" + std::to_string(d) + "/" + side_char(side)] = std::move(table);
      }
    }
  }
  out["cells"] = std::move(cells);
  out["faces"] = std::move(faces);
  return out;
}

Presentation Presentation::from_json(const json& j) {
  if (!j.is_object() || !j.contains("cells") || !j.at("cells").is_object())
    throw LoadError("presentation must be an object with a \"cells\" object");
  const json& cells = j.at("cells");

  TruncationConfig cfg;
  if (j.contains("config")) {
    cfg = TruncationConfig::from_json(j.at("config"));
  } else {
    int max_dim = 0;
    int max_dir = 0;
    for (const auto& [key, names] : cells.items()) {
      DirectionSet dirs = parse_level_key(key);
      max_dim = std::max(max_dim, dirs.size());
      max_dir = std::max(max_dir, dirs.max());
    }
    cfg.max_dim = max_dim;
    cfg.dir_universe = std::max(max_dim, max_dir);
  }

  Presentation p(cfg);
  for (const auto& [key, names] : cells.items()) {
    DirectionSet dirs = parse_level_key(key);
    if (!names.is_array()) throw LoadError("cells entry '" + key + "' must be an array");
    for (const auto& n : names) {
      if (!n.is_string()) throw LoadError("cells entry '" + key + "' contains a non-string name");
      p.add_cell(dirs, n.get<std::string>());
    }
  }

  if (j.contains("faces")) {
    const json& faces = j.at("faces");
    if (!faces.is_object()) throw LoadError("\"faces\" must be an object");
    for (const auto& [key, table] : faces.items()) {
      auto last = key.rfind('/');
      auto mid = last == std::string::npos ? std::string::npos : key.rfind('/', last - 1);
      if (last == std::string::npos || mid == std::string::npos)
        throw LoadError("malformed face key '" + key + "'");
      DirectionSet dirs = parse_level_key(key.substr(0, mid));
      std::string dtext = key.substr(mid + 1, last - mid - 1);
      std::string stext = key.substr(last + 1);
      int d = 0;
      auto [ptr, ec] = std::from_chars(dtext.data(), dtext.data() + dtext.size(), d);
      if (ec != std::errc() || ptr != dtext.data() + dtext.size() || !dirs.contains(d))
        throw LoadError("face key '" + key + "' names a direction outside its level");
      if (stext != "s" && stext != "t") throw LoadError("face key '" + key + "' must end in /s or /t");
      Side side = stext == "s" ? Side::source : Side::target;
      if (!table.is_object()) throw LoadError("face table '" + key + "' must be an object");
      for (const auto& [cell_name, image] : table.items()) {
        auto cell = p.find(dirs, cell_name);
        if (!cell) throw LoadError("face table '" + key + "' names unknown cell '" + cell_name + "'");
        if (!image.is_string()) throw LoadError("face of '" + cell_name + "' must be a cell name");
        std::string image_name = image.get<std::string>();
        auto target = p.find(dirs.without(d), image_name);
        if (!target) {
          // Keep a mistyped image so that validate_quiver can report it.
          auto it = p.by_name_.find(image_name);
          if (it == p.by_name_.end())
            throw LoadError("face of '" + cell_name + "' in '" + key + "' names unknown cell '" + image_name + "'");
          target = it->second.front();
          p.load_notes_.push_back(key + ":" + cell_name);
        }
        p.set_face(*cell, d, side, *target);
      }
    }
  }
  return p;
}

Report validate_quiver(const Presentation& p) {
  Report r;
  r.name = "quiver";
  for (CellId id = 0; id < p.size(); ++id) {
    const Cell& c = p.cell(id);
    if (c.dirs.max() > p.config().dir_universe)
      r.add("direction-universe", "cell '" + c.name + "' leaves the direction universe", {c.name});
    for (Direction d : c.dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        ++r.checked;
        std::string entry = level_key(c.dirs) + "/" + std::to_string(d) + "/" + side_char(side) + ":" + c.name;
        CellId f = p.raw_face(id, d, side);
        if (f == kNoCell) {
          r.add("missing-face", "no face entry " + entry, {entry});
          continue;
        }
        const Cell& img = p.cell(f);
        if (img.dirs != c.dirs.without(d)) {
          r.add("face-typing",
                "face entry " + entry + " points to '" + img.name + "' at level " + level_key(img.dirs) +
                    ", expected level " + level_key(c.dirs.without(d)),
                {entry, img.name});
        }
      }
    }
  }
  return r;
}

Report validate_cubical_axioms(const Presentation& p) {
  Report r;
  r.name = "cubical-axioms";
  auto face = [&](CellId c, Direction d, Side s) { return p.raw_face(c, d, s); };
  for (CellId id = 0; id < p.size(); ++id) {
    const Cell& c = p.cell(id);
    if (c.dim() < 2) continue;
    auto dirs = c.dirs.to_vector();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      for (std::size_t k = i + 1; k < dirs.size(); ++k) {
        Direction d = dirs[i];
        Direction e = dirs[k];
        struct Identity {
          const char* tag;
          Side outer_left, inner_left;  // outer_e(inner_d x)
        };
        // s_e s_d = s_d s_e, t_e t_d = t_d t_e, s_e t_d = t_d s_e, t_e s_d = s_d t_e
        const Identity ids[] = {{"ss", Side::source, Side::source},
                                {"tt", Side::target, Side::target},
                                {"st", Side::source, Side::target},
                                {"ts", Side::target, Side::source}};
        for (const auto& idn : ids) {
          ++r.checked;
          CellId a = face(id, d, idn.inner_left);
          CellId b = face(id, e, idn.outer_left);
          if (a == kNoCell || b == kNoCell) continue;
          CellId lhs = face(a, e, idn.outer_left);
          CellId rhs = face(b, d, idn.inner_left);
          if (lhs == kNoCell || rhs == kNoCell) continue;
          if (lhs != rhs) {
            r.add(std::string("cubical-") + idn.tag,
                  "cell '" + c.name + "' directions (" + std::to_string(d) + "," + std::to_string(e) +
                      "): identity " + idn.tag + " gives '" + p.cell(lhs).name + "' vs '" + p.cell(rhs).name + "'",
                  {c.name, std::to_string(d), std::to_string(e), idn.tag});
          }
        }
      }
    }
  }
  return r;
}

std::vector<CellId> enumerate_cells(const Presentation& p, int dim, DirectionSet dirs) {
  if (dirs.max() > p.config().dir_universe)
    throw UsageError("directions {" + dirs.str() + "} leave the direction universe");
  if (dim > p.config().max_dim) throw UsageError("dimension above max_dim");
  if (dirs.size() != dim) throw UsageError("dimension differs from direction count");
  return p.level(dirs);
}

SetMorphism::SetMorphism(PresentationPtr source, PresentationPtr target)
    : source_(std::move(source)), target_(std::move(target)), map_(source_->size(), kNoCell) {}

void SetMorphism::set(CellId from, CellId to) {
  const Cell& a = source_->cell(from);
  const Cell& b = target_->cell(to);
  if (a.dirs != b.dirs)
    throw LoadError("map entry '" + a.name + "' -> '" + b.name + "' changes level " + level_key(a.dirs) +
                    " to " + level_key(b.dirs));
  map_[from] = to;
}

SetMorphism SetMorphism::identity(PresentationPtr p) {
  SetMorphism f(p, p);
  for (CellId id = 0; id < p->size(); ++id) f.map_[id] = id;
  return f;
}

SetMorphism SetMorphism::compose(const SetMorphism& g, const SetMorphism& f) {
  if (f.target_.get() != g.source_.get()) throw UsageError("morphisms are not composable");
  SetMorphism h(f.source_, g.target_);
  for (CellId id = 0; id < f.map_.size(); ++id) {
    CellId mid = f.map_[id];
    h.map_[id] = mid == kNoCell ? kNoCell : g.map_[mid];
  }
  return h;
}

json SetMorphism::to_json() const {
  json levels = json::object();
  for (DirectionSet dirs : source_->levels()) {
    json table = json::object();
    for (CellId id : source_->level(dirs))
      if (map_[id] != kNoCell) table[source_->cell(id).name] = target_->cell(map_[id]).name;
    levels[level_key(dirs)] = std::move(table);
  }
  return json{{"map", std::move(levels)}};
}

SetMorphism SetMorphism::from_json(const json& j, PresentationPtr source, PresentationPtr target) {
  const json& levels = j.contains("map") ? j.at("map") : j;
  if (!levels.is_object()) throw LoadError("morphism must be an object of level tables");
  SetMorphism f(source, target);
  for (const auto& [key, table] : levels.items()) {
    DirectionSet dirs = parse_level_key(key);
    if (!table.is_object()) throw LoadError("map level '" + key + "' must be an object");
    for (const auto& [from, to] : table.items()) {
      auto a = source->find(dirs, from);
      if (!a) throw LoadError("map names unknown source cell '" + from + "' at " + key);
      if (!to.is_string()) throw LoadError("map image of '" + from + "' must be a name");
      auto b = target->resolve(to.get<std::string>());
      if (!b) b = target->find(dirs, to.get<std::string>());
      if (!b) throw LoadError("map names unknown target cell '" + to.get<std::string>() + "'");
      f.set(*a, *b);
    }
  }
  return f;
}

Report validate_morphism(const SetMorphism& f) {
  Report r;
  r.name = "morphism";
  const Presentation& src = *f.source();
  const Presentation& tgt = *f.target();
  for (CellId id = 0; id < src.size(); ++id) {
    const Cell& c = src.cell(id);
    CellId image = f(id);
    if (image == kNoCell) {
      r.add("unmapped", "cell '" + c.name + "' has no image", {c.name});
      continue;
    }
    if (tgt.cell(image).dirs != c.dirs) {
      r.add("level", "cell '" + c.name + "' changes level", {c.name});
      continue;
    }
    for (Direction d : c.dirs.to_vector()) {
      for (Side side : {Side::source, Side::target}) {
        ++r.checked;
        CellId fa = src.raw_face(id, d, side);
        CellId fb = tgt.raw_face(image, d, side);
        if (fa == kNoCell || fb == kNoCell) continue;
        CellId mapped = f(fa);
        if (mapped != fb) {
          r.add("face-commutation",
                "cell '" + c.name + "' direction " + std::to_string(d) + " side " + side_char(side) +
                    ": image of face is '" + (mapped == kNoCell ? std::string("?") : tgt.cell(mapped).name) +
                    "', face of image is '" + tgt.cell(fb).name + "'",
                {c.name, std::to_string(d), std::string(1, side_char(side))});
        }
      }
    }
  }
  return r;
}

std::optional<SetMorphism> random_morphism(PresentationPtr source, PresentationPtr target,
                                           std::mt19937_64& rng) {
  std::vector<CellId> order(source->size());
  for (CellId i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](CellId a, CellId b) { return source->cell(a).dim() < source->cell(b).dim(); });

  std::vector<std::vector<CellId>> candidates(order.size());
  std::vector<std::size_t> cursor(order.size(), 0);
  std::vector<CellId> map(source->size(), kNoCell);
  long steps = 0;
  const long step_limit = 2'000'000;

  auto fits = [&](CellId cell, CellId image) {
    for (Direction d : source->cell(cell).dirs.to_vector())
      for (Side side : {Side::source, Side::target}) {
        CellId fa = source->raw_face(cell, d, side);
        CellId fb = target->raw_face(image, d, side);
        if (fa == kNoCell || fb == kNoCell || map[fa] != fb) return false;
      }
    return true;
  };

  std::size_t pos = 0;
  bool fresh = true;
  while (pos < order.size()) {
    if (++steps > step_limit) return std::nullopt;
    CellId cell = order[pos];
    if (fresh) {
      candidates[pos] = target->level(source->cell(cell).dirs);
      std::shuffle(candidates[pos].begin(), candidates[pos].end(), rng);
      cursor[pos] = 0;
    }
    bool placed = false;
    while (cursor[pos] < candidates[pos].size()) {
      CellId image = candidates[pos][cursor[pos]++];
      if (fits(cell, image)) {
        map[cell] = image;
        placed = true;
        break;
      }
    }
    if (placed) {
      ++pos;
      fresh = true;
    } else {
      map[cell] = kNoCell;
      if (pos == 0) return std::nullopt;
      --pos;
      map[order[pos]] = kNoCell;
      fresh = false;
    }
  }
  SetMorphism f(source, target);
  for (CellId id = 0; id < map.size(); ++id) f.set(id, map[id]);
  return f;
}

}  // namespace omega_cube
