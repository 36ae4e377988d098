#pragma once

#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "omega_cube/congruence.hpp"
#include "omega_cube/strict.hpp"
#include "omega_cube/term.hpp"

namespace omega_cube {

struct KappaEntry {
  Direction dir;
  TermId left;
  TermId right;
  TermId cell;  // Refl(dir, left) when left == right
};

struct ContractionStage {
  int dim = 0;
  std::size_t universe_size = 0;
  std::size_t new_terms = 0;
  std::size_t kappa_cells = 0;    // syntactically distinct pairs
  std::size_t kappa_entries = 0;  // including diagonal entries
  std::size_t excluded_pairs = 0;  // same-level pairs left out for lack of a proof
  SaturationStats stats;
  bool truncated = false;
  bool budget_exhausted = false;
  bool monotone = true;

  [[nodiscard]] bool complete() const { return !truncated && !budget_exhausted && monotone; }
  [[nodiscard]] json to_json() const;
};

/// The free contraction over a presentation, built one dimension at a time:
/// the magma universe, the congruence session defining the projection onto
/// the free strict category, and the kappa table.
class ContractionData {
 public:
  [[nodiscard]] const TermStorePtr& store_ptr() const { return store_; }
  [[nodiscard]] TermStore& store() const { return *store_; }
  [[nodiscard]] const PresentationPtr& presentation() const { return store_->presentation_ptr(); }
  [[nodiscard]] const TruncationConfig& config() const { return cfg_; }
  [[nodiscard]] const TermUniverse& universe() const { return *universe_; }
  [[nodiscard]] CongruenceSession& session() const { return *session_; }
  [[nodiscard]] const std::vector<ContractionStage>& stages() const { return stages_; }
  [[nodiscard]] const std::vector<KappaEntry>& kappa_table() const { return kappa_; }
  [[nodiscard]] const std::vector<std::string>& log() const { return log_; }
  [[nodiscard]] bool complete() const;

  [[nodiscard]] std::optional<TermId> kappa(Direction d, TermId x, TermId y) const;
  [[nodiscard]] bool same_class(TermId x, TermId y) const { return session_->same_class(x, y); }

  /// Test hooks for planted faults.
  void set_kappa_cell(std::size_t index, TermId cell) { kappa_.at(index).cell = cell; }
  void erase_kappa(std::size_t index);

  [[nodiscard]] json to_json() const;

 private:
  friend ContractionData build_free_contraction(PresentationPtr p, const TruncationConfig& cfg, FamilySet families);
  void index_kappa();

  TermStorePtr store_;
  TruncationConfig cfg_;
  std::shared_ptr<CongruenceSession> session_;
  std::unique_ptr<TermUniverse> universe_;
  std::vector<ContractionStage> stages_;
  std::vector<KappaEntry> kappa_;
  std::map<std::tuple<Direction, TermId, TermId>, std::size_t> kappa_index_;
  std::vector<std::string> log_;
};

using ContractionPtr = std::shared_ptr<ContractionData>;

/// Stage n adds the level-n terms and the kappa cells over pairs of
/// (n-1)-dimensional terms already identified by the projection, then saturates.
ContractionData build_free_contraction(PresentationPtr p, const TruncationConfig& cfg, FamilySet families = {});

/// Domain, faces in the kappa direction, transverse faces, projection and degeneracy.
Report validate_contraction(const ContractionData& cd);

/// The universe terms as a cubical set: cell "t<i>" is the i-th term in universe order.
struct MagmaCells {
  std::shared_ptr<Presentation> cells;
  std::unordered_map<TermId, CellId> cell_of;
};
MagmaCells magma_cells(const ContractionData& cd);

/// Generator inclusion into the magma's underlying cubical set.
SetMorphism unit_eta(const ContractionData& cd, const MagmaCells& magma);

/// The free functor on a presentation morphism: a magma map defined by
/// structural recursion and the induced map on classes.
class ContractionMorphism {
 public:
  ContractionMorphism(SetMorphism f, ContractionPtr source, ContractionPtr target);

  /// Image of a source term. Throws DomainError when a kappa cell's image
  /// pair is not identified in the target.
  TermId map_term(TermId t);
  /// Target class representative for a source class.
  [[nodiscard]] std::optional<TermId> map_class(TermId source_class) const;

  [[nodiscard]] const SetMorphism& generator_map() const { return f_; }
  [[nodiscard]] const ContractionData& source() const { return *source_; }
  [[nodiscard]] const ContractionData& target() const { return *target_; }

  /// Unit naturality, faces, projection square and kappa square over the source universe.
  Report check();

 private:
  SetMorphism f_;
  ContractionPtr source_;
  ContractionPtr target_;
  std::unordered_map<TermId, TermId> memo_;
  std::unordered_map<TermId, TermId> class_map_;
};

ContractionMorphism free_on_morphism(const SetMorphism& f, ContractionPtr source, ContractionPtr target);

/// Evaluation into a strict table that sends kappa_d(x, y) to the identity on the value of x.
Separator make_contraction_separator(const TermStore& store, std::shared_ptr<const GeneratorAssignment> a,
                                     std::string label);

}  // namespace omega_cube
