#include "omega_cube/term.hpp"

#include <algorithm>
#include <cctype>

namespace omega_cube {

namespace {

std::string dstr(Direction d) { return std::to_string(d); }

}  // namespace

TermStore::TermStore(PresentationPtr p) : pres_(std::move(p)), gens_(pres_->size(), kNoTerm) {}

TermId TermStore::intern(const TermNode& n, std::string text) {
  Key key = make_key(n.kind, n.dir, n.a, n.b);
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  auto id = static_cast<TermId>(nodes_.size());
  nodes_.push_back(n);
  text_.push_back(std::move(text));
  index_.emplace(key, id);
  return id;
}

std::optional<TermId> TermStore::find(TermKind kind, Direction d, std::uint32_t a, std::uint32_t b) const {
  auto it = index_.find(make_key(kind, d, a, b));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TermId TermStore::gen(CellId cell) {
  if (cell >= pres_->size()) throw TypingError(TypingError::Kind::unknown_cell, "unknown cell id");
  if (gens_[cell] != kNoTerm) return gens_[cell];
  const Cell& c = pres_->cell(cell);
  TermNode n{TermKind::gen, 0, c.dirs, cell, 0, 1, 0, 0};
  TermId id = intern(n, "gen(" + pres_->qualified_name(cell) + ")");
  gens_[cell] = id;
  return id;
}

std::optional<TermId> TermStore::try_refl(Direction d, TermId x) {
  const TermNode nx = node(x);
  if (d < 1 || d > config().dir_universe || nx.dirs.contains(d) || nx.dim() + 1 > config().max_dim)
    return std::nullopt;
  if (auto hit = find(TermKind::refl, d, x)) return hit;
  TermNode n{TermKind::refl, static_cast<std::uint8_t>(d), nx.dirs.with(d), x, 0, nx.size + 1, nx.comp_level, 0};
  return intern(n, "id[" + dstr(d) + "](" + text_[x] + ")");
}

TermId TermStore::refl(Direction d, TermId x) {
  if (auto t = try_refl(d, x)) return *t;
  const TermNode& nx = node(x);
  if (nx.dirs.contains(d) || d < 1 || d > config().dir_universe)
    throw TypingError(TypingError::Kind::direction,
                      "id[" + dstr(d) + "] needs a direction outside {" + nx.dirs.str() + "} and within the universe: " + text_[x],
                      x);
  throw TypingError(TypingError::Kind::truncation, "id[" + dstr(d) + "](" + text_[x] + ") exceeds max_dim", x);
}

std::optional<TermId> TermStore::try_dual(Direction d, TermId x) {
  const TermNode nx = node(x);
  if (!nx.dirs.contains(d)) return std::nullopt;
  if (auto hit = find(TermKind::dual, d, x)) return hit;
  auto run = static_cast<std::uint16_t>(nx.kind == TermKind::dual ? nx.dual_level + 1 : 1);
  TermNode n{TermKind::dual, static_cast<std::uint8_t>(d), nx.dirs, x, 0, nx.size + 1, nx.comp_level, run};
  return intern(n, "dual[" + dstr(d) + "](" + text_[x] + ")");
}

TermId TermStore::dual(Direction d, TermId x) {
  if (auto t = try_dual(d, x)) return *t;
  throw TypingError(TypingError::Kind::direction,
                    "dual[" + dstr(d) + "] needs direction " + dstr(d) + " in {" + node(x).dirs.str() + "}: " + text_[x], x);
}

bool TermStore::composable(Direction d, TermId x, TermId y) {
  const TermNode& nx = node(x);
  const TermNode& ny = node(y);
  if (nx.dirs != ny.dirs || !nx.dirs.contains(d)) return false;
  return boundary(x, d, Side::source) == boundary(y, d, Side::target);
}

std::optional<TermId> TermStore::try_comp(Direction d, TermId x, TermId y) {
  if (auto hit = find(TermKind::comp, d, x, y)) return hit;
  if (!composable(d, x, y)) return std::nullopt;
  const TermNode nx = node(x);
  const TermNode ny = node(y);
  TermNode n{TermKind::comp, static_cast<std::uint8_t>(d), nx.dirs, x, y, nx.size + ny.size + 1,
             static_cast<std::uint16_t>(nx.comp_level + ny.comp_level + 1), 0};
  return intern(n, "comp[" + dstr(d) + "](" + text_[x] + "," + text_[y] + ")");
}

TermId TermStore::comp(Direction d, TermId x, TermId y) {
  if (auto t = try_comp(d, x, y)) return *t;
  const TermNode& nx = node(x);
  const TermNode& ny = node(y);
  if (nx.dirs != ny.dirs || !nx.dirs.contains(d))
    throw TypingError(TypingError::Kind::direction,
                      "comp[" + dstr(d) + "] needs equal direction sets containing " + dstr(d) + ": " + text_[x] +
                          " / " + text_[y],
                      x, y);
  TermId sx = boundary(x, d, Side::source);
  TermId ty = boundary(y, d, Side::target);
  throw TypingError(TypingError::Kind::composability,
                    "comp[" + dstr(d) + "]: source " + text_[sx] + " of left operand differs from target " + text_[ty] +
                        " of right operand",
                    sx, ty);
}

TermId TermStore::kappa(Direction d, TermId x, TermId y, const PiCertificate& cert) {
  const TermNode nx = node(x);
  const TermNode ny = node(y);
  if (x == y)
    throw TypingError(TypingError::Kind::kappa_identical, "kappa over identical terms; use id[" + dstr(d) + "]", x, y);
  if (nx.dirs != ny.dirs || nx.dirs.contains(d) || d < 1 || d > config().dir_universe)
    throw TypingError(TypingError::Kind::direction, "kappa[" + dstr(d) + "] over mismatched directions", x, y);
  if (nx.dim() + 1 > config().max_dim)
    throw TypingError(TypingError::Kind::truncation, "kappa[" + dstr(d) + "] exceeds max_dim", x, y);
  bool matches = (cert.left == x && cert.right == y) || (cert.left == y && cert.right == x);
  if (cert.issuer == 0 || !matches)
    throw TypingError(TypingError::Kind::kappa_certificate, "kappa[" + dstr(d) + "] without a matching certificate", x, y);
  TermNode n{TermKind::kappa, static_cast<std::uint8_t>(d), nx.dirs.with(d), x, y, nx.size + ny.size + 1,
             static_cast<std::uint16_t>(nx.comp_level + ny.comp_level), 0};
  TermId id = intern(n, "kappa[" + dstr(d) + "](" + text_[x] + "," + text_[y] + ")");
  certs_.emplace(id, cert);
  return id;
}

TermId TermStore::kappa_or_refl(Direction d, TermId x, TermId y, const PiCertificate& cert) {
  if (x == y) return refl(d, x);
  return kappa(d, x, y, cert);
}

const PiCertificate* TermStore::certificate(TermId kappa_term) const {
  auto it = certs_.find(kappa_term);
  return it == certs_.end() ? nullptr : &it->second;
}

bool TermStore::contains_kappa(TermId t) const {
  const TermNode& n = node(t);
  switch (n.kind) {
    case TermKind::gen: return false;
    case TermKind::kappa: return true;
    case TermKind::refl:
    case TermKind::dual: return contains_kappa(n.a);
    case TermKind::comp: return contains_kappa(n.a) || contains_kappa(n.b);
  }
  return false;
}

bool TermStore::less(TermId x, TermId y) const {
  const TermNode& nx = node(x);
  const TermNode& ny = node(y);
  if (nx.size != ny.size) return nx.size < ny.size;
  return text_[x] < text_[y];
}

TermId TermStore::boundary(TermId t, Direction d, Side side) {
  const TermNode n = node(t);
  if (!n.dirs.contains(d))
    throw UsageError("boundary: direction " + dstr(d) + " not in {" + n.dirs.str() + "} of " + text_[t]);
  std::uint64_t key = (static_cast<std::uint64_t>(t) << 8) | (static_cast<std::uint64_t>(d) << 1) |
                      static_cast<std::uint64_t>(side);
  if (auto it = boundary_memo_.find(key); it != boundary_memo_.end()) return it->second;

  Side other = side == Side::source ? Side::target : Side::source;
  TermId result = kNoTerm;
  switch (n.kind) {
    case TermKind::gen:
      result = gen(pres_->face(n.a, d, side));
      break;
    case TermKind::refl:
      result = n.dir == d ? n.a : refl(n.dir, boundary(n.a, d, side));
      break;
    case TermKind::dual:
      result = n.dir == d ? boundary(n.a, d, other) : dual(n.dir, boundary(n.a, d, side));
      break;
    case TermKind::comp:
      if (n.dir == d) {
        result = side == Side::source ? boundary(n.b, d, side) : boundary(n.a, d, side);
      } else {
        TermId l = boundary(n.a, d, side);
        TermId r = boundary(n.b, d, side);
        result = comp(n.dir, l, r);
      }
      break;
    case TermKind::kappa:
      if (n.dir == d) {
        result = side == Side::source ? n.a : n.b;
      } else {
        TermId l = boundary(n.a, d, side);
        TermId r = boundary(n.b, d, side);
        PiCertificate cert = *certificate(t);
        cert.left = l;
        cert.right = r;
        result = kappa_or_refl(n.dir, l, r, cert);
      }
      break;
  }
  boundary_memo_.emplace(key, result);
  return result;
}

// ---------------------------------------------------------------- syntax

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr parse_all() {
    Expr e = parse();
    skip();
    if (pos_ != text_.size()) fail("trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw TypingError(TypingError::Kind::syntax,
                      "term syntax error at offset " + std::to_string(pos_) + ": " + why + " in '" + std::string(text_) + "'");
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  std::string word() {
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }
  Direction direction() {
    expect('[');
    skip();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected a direction");
    int d = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (d < 1 || d > kMaxDirections) fail("direction out of range");
    expect(']');
    return d;
  }
  Expr parse() {
    std::string head = word();
    Expr e;
    if (head == "gen") {
      e.kind = TermKind::gen;
      expect('(');
      skip();
      std::size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != ')') ++pos_;
      if (pos_ >= text_.size()) fail("unterminated gen(");
      std::string name(text_.substr(start, pos_ - start));
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      if (name.empty()) fail("empty generator name");
      e.name = name;
      ++pos_;
      return e;
    }
    if (head == "id" || head == "dual") {
      e.kind = head == "id" ? TermKind::refl : TermKind::dual;
      e.dir = direction();
      expect('(');
      e.kids.push_back(parse());
      expect(')');
      return e;
    }
    if (head == "comp" || head == "kappa") {
      e.kind = head == "comp" ? TermKind::comp : TermKind::kappa;
      e.dir = direction();
      expect('(');
      e.kids.push_back(parse());
      expect(',');
      e.kids.push_back(parse());
      expect(')');
      return e;
    }
    fail("unknown constructor '" + head + "'");
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse_all(); }

std::string print_expr(const Expr& e) {
  std::string d = "[" + dstr(e.dir) + "]";
  switch (e.kind) {
    case TermKind::gen: return "gen(" + e.name + ")";
    case TermKind::refl: return "id" + d + "(" + print_expr(e.kids.at(0)) + ")";
    case TermKind::dual: return "dual" + d + "(" + print_expr(e.kids.at(0)) + ")";
    case TermKind::comp: return "comp" + d + "(" + print_expr(e.kids.at(0)) + "," + print_expr(e.kids.at(1)) + ")";
    case TermKind::kappa: return "kappa" + d + "(" + print_expr(e.kids.at(0)) + "," + print_expr(e.kids.at(1)) + ")";
  }
  return {};
}

Expr to_expr(const TermStore& store, TermId t) {
  const TermNode& n = store.node(t);
  Expr e;
  e.kind = n.kind;
  e.dir = n.dir;
  if (n.kind == TermKind::gen) {
    e.name = store.presentation().qualified_name(n.a);
    return e;
  }
  e.kids.push_back(to_expr(store, n.a));
  if (n.kind == TermKind::comp || n.kind == TermKind::kappa) e.kids.push_back(to_expr(store, n.b));
  return e;
}

TermId construct(TermStore& store, const Expr& e, Mode mode, const Certifier& certifier) {
  switch (e.kind) {
    case TermKind::gen: {
      auto cell = store.presentation().resolve(e.name);
      if (!cell) throw TypingError(TypingError::Kind::unknown_cell, "unknown or ambiguous generator '" + e.name + "'");
      return store.gen(*cell);
    }
    case TermKind::refl: return store.refl(e.dir, construct(store, e.kids.at(0), mode, certifier));
    case TermKind::dual: return store.dual(e.dir, construct(store, e.kids.at(0), mode, certifier));
    case TermKind::comp:
      return store.comp(e.dir, construct(store, e.kids.at(0), mode, certifier),
                        construct(store, e.kids.at(1), mode, certifier));
    case TermKind::kappa: {
      if (mode == Mode::magma)
        throw TypingError(TypingError::Kind::kappa_in_magma, "kappa is not a magma constructor: " + print_expr(e));
      TermId x = construct(store, e.kids.at(0), mode, certifier);
      TermId y = construct(store, e.kids.at(1), mode, certifier);
      std::optional<PiCertificate> cert = certifier ? certifier(x, y) : std::nullopt;
      if (!cert)
        throw TypingError(TypingError::Kind::kappa_certificate, "no projection certificate for " + print_expr(e), x, y);
      return store.kappa(e.dir, x, y, *cert);
    }
  }
  throw UsageError("bad expression");
}

TermId parse_term(TermStore& store, std::string_view text, Mode mode, const Certifier& certifier) {
  return construct(store, parse_expr(text), mode, certifier);
}

// -------------------------------------------------------------- universe

void TermUniverse::add_closed(TermId t) {
  if (members_.count(t)) return;
  const TermNode n = store_->node(t);
  if (n.kind != TermKind::gen) {
    add_closed(n.a);
    if (n.kind == TermKind::comp || n.kind == TermKind::kappa) add_closed(n.b);
  }
  members_.insert(t);
  terms_.push_back(t);
  for (Direction d : n.dirs.to_vector())
    for (Side side : {Side::source, Side::target}) add_closed(store_->boundary(t, d, side));
}

bool TermUniverse::insert(TermId t) {
  if (members_.count(t)) return false;
  add_closed(t);
  return true;
}

void TermUniverse::sort() {
  const TermStore& s = *store_;
  std::sort(terms_.begin(), terms_.end(), [&](TermId a, TermId b) { return s.less(a, b); });
}

TermUniverse TermUniverse::from_terms(TermStorePtr store, const TruncationConfig& cfg, const std::vector<TermId>& seeds) {
  TermUniverse u(std::move(store), cfg);
  for (TermId t : seeds) u.insert(t);
  u.sort();
  return u;
}

std::vector<TermId> TermUniverse::level(DirectionSet dirs) const {
  std::vector<TermId> out;
  for (TermId t : terms_)
    if (store_->node(t).dirs == dirs) out.push_back(t);
  return out;
}

std::map<std::string, std::size_t> TermUniverse::level_counts() const {
  std::map<std::string, std::size_t> out;
  for (TermId t : terms_) ++out[level_key(store_->node(t).dirs)];
  return out;
}

TermUniverse enumerate_free_magma(TermStorePtr store, const TruncationConfig& cfg,
                                  const std::vector<TermId>& extra_leaves, std::size_t limit) {
  cfg.validate();
  TermUniverse u(store, cfg);
  TermStore& s = *store;
  const std::size_t max_size = static_cast<std::size_t>(cfg.term_depth) + 1;
  std::vector<std::vector<TermId>> bucket(max_size + 1);
  std::unordered_set<TermId> seen;
  // (direction, target face, size) -> right operands
  std::unordered_map<std::uint64_t, std::vector<TermId>> by_target;
  auto target_key = [](Direction d, TermId face, std::uint32_t size) {
    return (static_cast<std::uint64_t>(face) << 24) | (static_cast<std::uint64_t>(size) << 6) |
           static_cast<std::uint64_t>(d);
  };
  bool truncated = false;
  auto admit = [&](TermId t) {
    if (!seen.insert(t).second) return;
    const TermNode n = s.node(t);
    if (n.size <= max_size) {
      bucket[n.size].push_back(t);
      for (Direction d : n.dirs.to_vector())
        by_target[target_key(d, s.boundary(t, d, Side::target), n.size)].push_back(t);
    }
    if (seen.size() >= limit) truncated = true;
  };

  const Presentation& p = s.presentation();
  for (CellId c = 0; c < p.size() && !truncated; ++c) {
    const Cell& cell = p.cell(c);
    if (cell.dim() <= cfg.max_dim && cell.dirs.max() <= cfg.dir_universe) admit(s.gen(c));
  }
  for (TermId leaf : extra_leaves) admit(leaf);

  for (std::size_t size = 2; size <= max_size && !truncated; ++size) {
    const std::vector<TermId> prev = bucket[size - 1];
    for (TermId x : prev) {
      if (truncated) break;
      const DirectionSet dirs = s.node(x).dirs;
      for (Direction d = 1; d <= cfg.dir_universe && !truncated; ++d) {
        if (dirs.contains(d)) {
          admit(s.dual(d, x));
        } else if (dirs.size() + 1 <= cfg.max_dim) {
          admit(s.refl(d, x));
        }
      }
    }
    for (std::size_t left = 1; left + 2 <= size && !truncated; ++left) {
      const std::size_t right = size - 1 - left;
      const std::vector<TermId> lefts = bucket[left];
      for (TermId x : lefts) {
        if (truncated) break;
        for (Direction d : s.node(x).dirs.to_vector()) {
          auto it = by_target.find(target_key(d, s.boundary(x, d, Side::source), static_cast<std::uint32_t>(right)));
          if (it == by_target.end()) continue;
          const std::vector<TermId> rights = it->second;
          for (TermId y : rights) {
            if (s.node(y).dirs != s.node(x).dirs) continue;
            admit(s.comp(d, x, y));
            if (truncated) break;
          }
          if (truncated) break;
        }
      }
    }
  }

  std::vector<TermId> all(seen.begin(), seen.end());
  std::sort(all.begin(), all.end());
  for (TermId t : all) u.insert(t);
  u.sort();
  u.set_truncated(truncated);
  return u;
}

Report check_cubical_on_terms(const TermUniverse& u) {
  Report r;
  r.name = "cubical-terms";
  TermStore& s = u.mutable_store();
  for (TermId t : u.terms()) {
    const TermNode n = s.node(t);
    if (n.dim() < 2) continue;
    auto dirs = n.dirs.to_vector();
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      for (std::size_t k = i + 1; k < dirs.size(); ++k) {
        Direction d = dirs[i];
        Direction e = dirs[k];
        const std::pair<Side, Side> forms[] = {{Side::source, Side::source},
                                               {Side::target, Side::target},
                                               {Side::source, Side::target},
                                               {Side::target, Side::source}};
        const char* tags[] = {"ss", "tt", "st", "ts"};
        for (int f = 0; f < 4; ++f) {
          auto [outer, inner] = forms[f];
          ++r.checked;
          TermId lhs = s.boundary(s.boundary(t, d, inner), e, outer);
          TermId rhs = s.boundary(s.boundary(t, e, outer), d, inner);
          if (lhs != rhs)
            r.add(std::string("cubical-") + tags[f],
                  s.print(t) + " directions (" + dstr(d) + "," + dstr(e) + "): " + s.print(lhs) + " vs " + s.print(rhs),
                  {s.print(t)});
        }
      }
    }
  }
  return r;
}

}  // namespace omega_cube
