#pragma once

#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "omega_cube/congruence.hpp"
#include "omega_cube/presentation.hpp"
#include "omega_cube/term.hpp"

namespace omega_cube {

/// A finite strict involutive cubical category given by lookup tables over
/// the cells of an underlying presentation. Composition is partial and only
/// readable on boundary-compatible pairs.
class StrictCategoryTable {
 public:
  explicit StrictCategoryTable(std::shared_ptr<Presentation> cells);

  [[nodiscard]] const Presentation& cells() const { return *cells_; }
  [[nodiscard]] PresentationPtr cells_ptr() const { return cells_; }
  [[nodiscard]] const TruncationConfig& config() const { return cells_->config(); }

  void set_refl(CellId x, Direction d, CellId image);
  void set_dual(CellId x, Direction d, CellId image);
  void set_comp(Direction d, CellId x, CellId y, CellId image);

  [[nodiscard]] std::optional<CellId> find_refl(CellId x, Direction d) const;
  [[nodiscard]] std::optional<CellId> find_dual(CellId x, Direction d) const;
  [[nodiscard]] std::optional<CellId> find_comp(Direction d, CellId x, CellId y) const;

  /// Throw DomainError outside the table's domain.
  [[nodiscard]] CellId refl(CellId x, Direction d) const;
  [[nodiscard]] CellId dual(CellId x, Direction d) const;
  [[nodiscard]] CellId comp(Direction d, CellId x, CellId y) const;

  [[nodiscard]] bool composable(Direction d, CellId x, CellId y) const;
  [[nodiscard]] CellId face(CellId x, Direction d, Side side) const { return cells_->face(x, d, side); }
  [[nodiscard]] const std::string& name(CellId x) const { return cells_->cell(x).name; }

  /// All composition entries in (direction, left, right) order.
  [[nodiscard]] std::vector<std::array<CellId, 4>> comp_entries() const;

  [[nodiscard]] json to_json() const;
  static StrictCategoryTable from_json(const json& j);

 private:
  static std::uint64_t key(CellId x, Direction d) { return (static_cast<std::uint64_t>(x) << 6) | static_cast<std::uint64_t>(d); }
  static std::uint64_t pair_key(CellId x, CellId y) { return (static_cast<std::uint64_t>(x) << 32) | y; }

  std::shared_ptr<Presentation> cells_;
  std::unordered_map<std::uint64_t, CellId> refl_;
  std::unordered_map<std::uint64_t, CellId> dual_;
  std::vector<std::unordered_map<std::uint64_t, CellId>> comp_;  // indexed by direction
};

using StrictTablePtr = std::shared_ptr<const StrictCategoryTable>;

/// Structural axioms of the operations plus associativity, unitality,
/// functoriality of identities and exchange.
Report validate_strict(const StrictCategoryTable& c);
/// Involutivity, commutativity and functoriality of involutions, Hermitian identities.
Report validate_involutive(const StrictCategoryTable& c);

/// A face-preserving map from generators into the cells of a strict table.
class GeneratorAssignment {
 public:
  /// Throws UsageError naming the first violation when the map is not a valid morphism.
  GeneratorAssignment(SetMorphism map, StrictTablePtr target);

  [[nodiscard]] const SetMorphism& map() const { return map_; }
  [[nodiscard]] const StrictCategoryTable& target() const { return *target_; }
  [[nodiscard]] const StrictTablePtr& target_ptr() const { return target_; }
  [[nodiscard]] CellId operator()(CellId generator) const { return map_(generator); }

 private:
  SetMorphism map_;
  StrictTablePtr target_;
};

/// Memoizing structural evaluator of Kappa-free terms.
class Evaluator {
 public:
  Evaluator(const TermStore& store, const GeneratorAssignment& a) : store_(store), a_(a) {}
  CellId operator()(TermId t);

 private:
  const TermStore& store_;
  const GeneratorAssignment& a_;
  std::unordered_map<TermId, CellId> memo_;
};

CellId eval_term(const TermStore& store, TermId t, const GeneratorAssignment& a);

/// Generator agreement, homomorphism equations and naturality on every
/// member, and agreement with an independently coded bottom-up extension.
Report check_universal_factorization(const GeneratorAssignment& a, const TermUniverse& u);

/// Bottom-up table-driven extension of the assignment over the universe;
/// members that cannot be evaluated are absent from the result.
std::unordered_map<TermId, CellId> extend_bottom_up(const GeneratorAssignment& a, const TermUniverse& u);

Separator make_separator(const TermStore& store, std::shared_ptr<const GeneratorAssignment> a, std::string label);

/// The quotient of a saturated session restricted to a universe, as a strict
/// table, with the assignment sending each generator to its class.
struct QuotientTable {
  std::shared_ptr<StrictCategoryTable> table;
  std::unordered_map<TermId, CellId> cell_of;
  std::shared_ptr<const GeneratorAssignment> assignment;
};

/// Throws DomainError when an induced operation leaves the universe.
QuotientTable build_quotient_table(const CongruenceSession& s, const TermUniverse& u);

}  // namespace omega_cube
