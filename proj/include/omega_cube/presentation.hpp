#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "omega_cube/common.hpp"

namespace omega_cube {

using CellId = std::uint32_t;
inline constexpr CellId kNoCell = 0xffffffffu;

struct Cell {
  DirectionSet dirs;
  std::string name;
  [[nodiscard]] int dim() const { return dirs.size(); }
};

/// True if name is a usable cell identifier (nonempty, no syntax characters).
bool valid_identifier(std::string_view name);

/// "<dim>/<d1,d2,...>" key of a level.
std::string level_key(DirectionSet dirs);
DirectionSet parse_level_key(std::string_view key);

/// A finite truncated cubical set given by generators and face tables.
/// Face images are stored as raw cell ids; validate_quiver checks their typing.
class Presentation {
 public:
  explicit Presentation(TruncationConfig cfg = {}) : cfg_(cfg) {}

  CellId add_cell(DirectionSet dirs, const std::string& name);
  void set_face(CellId cell, Direction d, Side side, CellId image);

  [[nodiscard]] std::size_t size() const { return cells_.size(); }
  [[nodiscard]] const Cell& cell(CellId id) const { return cells_.at(id); }
  [[nodiscard]] const TruncationConfig& config() const { return cfg_; }
  void set_config(const TruncationConfig& cfg) { cfg_ = cfg; }

  /// Raw face entry, kNoCell when missing.
  [[nodiscard]] CellId raw_face(CellId cell, Direction d, Side side) const;
  /// Face entry; throws DomainError when d is not a direction of the cell or the entry is missing.
  [[nodiscard]] CellId face(CellId cell, Direction d, Side side) const;

  [[nodiscard]] std::optional<CellId> find(DirectionSet dirs, std::string_view name) const;
  /// Cells of one level, in insertion order.
  [[nodiscard]] const std::vector<CellId>& level(DirectionSet dirs) const;
  /// All nonempty levels, ordered by (dim, lexicographic directions).
  [[nodiscard]] std::vector<DirectionSet> levels() const;
  [[nodiscard]] bool name_is_unique(std::string_view name) const;
  /// "name" when globally unique, else "name@<dim>/<dirs>".
  [[nodiscard]] std::string qualified_name(CellId id) const;
  /// Resolves a plain or qualified name.
  [[nodiscard]] std::optional<CellId> resolve(std::string_view text) const;

  [[nodiscard]] json to_json() const;
  static Presentation from_json(const json& j);

  /// Face-typing problems noticed while loading (image found in the wrong level).
  [[nodiscard]] const std::vector<std::string>& load_notes() const { return load_notes_; }

 private:
  TruncationConfig cfg_;
  std::vector<Cell> cells_;
  std::vector<std::vector<CellId>> faces_;  // per cell: 2*index_of(d)+side
  std::map<std::uint32_t, std::vector<CellId>> levels_;
  std::unordered_map<std::string, std::vector<CellId>> by_name_;
  std::vector<std::string> load_notes_;
};

using PresentationPtr = std::shared_ptr<const Presentation>;

/// Face typing: every face exists and lies in level D-{d}.
Report validate_quiver(const Presentation& p);
/// The cubical identities for every cell of dim >= 2 and every pair d < e.
Report validate_cubical_axioms(const Presentation& p);

/// Cells at a level; throws UsageError when dirs leave the direction universe or dim > max_dim.
std::vector<CellId> enumerate_cells(const Presentation& p, int dim, DirectionSet dirs);

/// A level-preserving map between two presentations.
class SetMorphism {
 public:
  SetMorphism(PresentationPtr source, PresentationPtr target);

  /// Throws LoadError when the two cells are at different levels.
  void set(CellId from, CellId to);
  [[nodiscard]] CellId operator()(CellId from) const { return map_.at(from); }
  [[nodiscard]] const PresentationPtr& source() const { return source_; }
  [[nodiscard]] const PresentationPtr& target() const { return target_; }

  static SetMorphism identity(PresentationPtr p);
  /// g after f.
  static SetMorphism compose(const SetMorphism& g, const SetMorphism& f);

  [[nodiscard]] json to_json() const;
  static SetMorphism from_json(const json& j, PresentationPtr source, PresentationPtr target);

 private:
  PresentationPtr source_;
  PresentationPtr target_;
  std::vector<CellId> map_;
};

/// Totality and commutation with all faces.
Report validate_morphism(const SetMorphism& f);

/// A uniformly shuffled backtracking search for a valid morphism; nullopt if none exists.
std::optional<SetMorphism> random_morphism(PresentationPtr source, PresentationPtr target,
                                           std::mt19937_64& rng);

}  // namespace omega_cube
