#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "omega_cube/presentation.hpp"

namespace omega_cube {

enum class TermKind : std::uint8_t { gen = 0, refl = 1, dual = 2, comp = 3, kappa = 4 };

using TermId = std::uint32_t;
inline constexpr TermId kNoTerm = 0xffffffffu;

struct TermNode {
  TermKind kind;
  std::uint8_t dir;  // 0 for gen
  DirectionSet dirs;
  std::uint32_t a;  // cell id for gen, first child otherwise
  std::uint32_t b;  // second child for comp/kappa
  std::uint32_t size;
  std::uint16_t comp_level;  // number of Comp nodes
  std::uint16_t dual_level;  // length of the leading run of Dual nodes

  [[nodiscard]] int dim() const { return dirs.size(); }
};

/// Evidence that a congruence session placed two terms in the same class.
struct PiCertificate {
  std::uint64_t issuer = 0;
  std::uint32_t stage = 0;
  TermId left = kNoTerm;
  TermId right = kNoTerm;
};

/// Rejected construction. For composability failures left/right hold the
/// mismatched boundaries (source of the left operand, target of the right).
class TypingError : public Error {
 public:
  enum class Kind { direction, truncation, composability, kappa_in_magma, kappa_certificate, kappa_identical, unknown_cell, syntax };
  TypingError(Kind kind, const std::string& msg, TermId left = kNoTerm, TermId right = kNoTerm)
      : Error(msg), kind(kind), left(left), right(right) {}
  Kind kind;
  TermId left;
  TermId right;
};

/// Hash-consed store of well-typed terms over one presentation. Structurally
/// equal terms share one id. Single writer: interning is not thread-safe.
class TermStore {
 public:
  explicit TermStore(PresentationPtr p);

  [[nodiscard]] const Presentation& presentation() const { return *pres_; }
  [[nodiscard]] const PresentationPtr& presentation_ptr() const { return pres_; }
  [[nodiscard]] const TruncationConfig& config() const { return pres_->config(); }
  [[nodiscard]] std::size_t size() const { return nodes_.size(); }
  [[nodiscard]] const TermNode& node(TermId t) const { return nodes_.at(t); }

  TermId gen(CellId cell);
  TermId refl(Direction d, TermId x);
  TermId dual(Direction d, TermId x);
  TermId comp(Direction d, TermId x, TermId y);
  TermId kappa(Direction d, TermId x, TermId y, const PiCertificate& cert);
  /// Refl(d, x) when x == y, else Kappa(d, x, y).
  TermId kappa_or_refl(Direction d, TermId x, TermId y, const PiCertificate& cert);

  /// Non-throwing variants; nullopt when the result would be ill-typed or leave the truncation.
  std::optional<TermId> try_refl(Direction d, TermId x);
  std::optional<TermId> try_dual(Direction d, TermId x);
  std::optional<TermId> try_comp(Direction d, TermId x, TermId y);
  [[nodiscard]] bool composable(Direction d, TermId x, TermId y);

  /// Existing node lookup without interning.
  [[nodiscard]] std::optional<TermId> find(TermKind kind, Direction d, std::uint32_t a, std::uint32_t b = 0) const;

  TermId boundary(TermId t, Direction d, Side side);

  [[nodiscard]] const std::string& print(TermId t) const { return text_.at(t); }
  /// Order by (size, printed text).
  [[nodiscard]] bool less(TermId x, TermId y) const;
  [[nodiscard]] const PiCertificate* certificate(TermId kappa_term) const;
  [[nodiscard]] bool contains_kappa(TermId t) const;

 private:
  struct Key {
    std::uint64_t head;
    std::uint32_t b;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      return std::hash<std::uint64_t>()(k.head * 0x9e3779b97f4a7c15ull ^ k.b);
    }
  };
  static Key make_key(TermKind kind, Direction d, std::uint32_t a, std::uint32_t b) {
    return {(static_cast<std::uint64_t>(kind) << 40) | (static_cast<std::uint64_t>(d) << 32) | a, b};
  }
  TermId intern(const TermNode& n, std::string text);

  PresentationPtr pres_;
  std::vector<TermNode> nodes_;
  std::vector<std::string> text_;
  std::unordered_map<Key, TermId, KeyHash> index_;
  std::unordered_map<std::uint64_t, TermId> boundary_memo_;
  std::unordered_map<TermId, PiCertificate> certs_;
  std::vector<TermId> gens_;  // cell id -> term
};

using TermStorePtr = std::shared_ptr<TermStore>;

/// Parsed term syntax: gen(name), id[d](t), dual[d](t), comp[d](t,u), kappa[d](t,u).
struct Expr {
  TermKind kind = TermKind::gen;
  Direction dir = 0;
  std::string name;
  std::vector<Expr> kids;
};

Expr parse_expr(std::string_view text);
std::string print_expr(const Expr& e);
Expr to_expr(const TermStore& store, TermId t);

enum class Mode { magma, contraction };

using Certifier = std::function<std::optional<PiCertificate>(TermId, TermId)>;

/// Builds a term from an expression. Kappa is rejected in magma mode and
/// needs a certificate from the certifier in contraction mode.
TermId construct(TermStore& store, const Expr& e, Mode mode, const Certifier& certifier = {});
TermId parse_term(TermStore& store, std::string_view text, Mode mode = Mode::magma,
                  const Certifier& certifier = {});

/// A finite, subterm- and boundary-closed set of terms over one store.
class TermUniverse {
 public:
  TermUniverse(TermStorePtr store, TruncationConfig cfg) : store_(std::move(store)), cfg_(cfg) {}

  /// Closure of the given terms under subterms and boundaries.
  static TermUniverse from_terms(TermStorePtr store, const TruncationConfig& cfg, const std::vector<TermId>& seeds);

  [[nodiscard]] const TermStorePtr& store() const { return store_; }
  [[nodiscard]] TermStore& mutable_store() const { return *store_; }
  [[nodiscard]] const TruncationConfig& config() const { return cfg_; }
  /// Terms ordered by (size, printed text).
  [[nodiscard]] const std::vector<TermId>& terms() const { return terms_; }
  [[nodiscard]] bool contains(TermId t) const { return members_.count(t) != 0; }
  [[nodiscard]] std::size_t size() const { return terms_.size(); }
  [[nodiscard]] std::size_t max_size() const { return static_cast<std::size_t>(cfg_.term_depth) + 1; }
  [[nodiscard]] bool truncated() const { return truncated_; }
  [[nodiscard]] std::vector<TermId> level(DirectionSet dirs) const;
  /// Counts per level key.
  [[nodiscard]] std::map<std::string, std::size_t> level_counts() const;

  /// Adds t with its subterms and boundaries; returns false if already present.
  bool insert(TermId t);
  void sort();
  void set_truncated(bool v) { truncated_ = v; }

 private:
  void add_closed(TermId t);

  TermStorePtr store_;
  TruncationConfig cfg_;
  std::vector<TermId> terms_;
  std::unordered_set<TermId> members_;
  bool truncated_ = false;
};

/// All well-typed terms of size <= term_depth + 1 inside the truncation, plus
/// the given extra leaves (always included), closed under boundaries.
/// Stops and flags truncation once `limit` terms exist.
TermUniverse enumerate_free_magma(TermStorePtr store, const TruncationConfig& cfg,
                                  const std::vector<TermId>& extra_leaves = {}, std::size_t limit = 2'000'000);

/// The four cubical identities as term identities on every member of dim >= 2.
Report check_cubical_on_terms(const TermUniverse& u);

}  // namespace omega_cube
