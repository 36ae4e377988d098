#pragma once

#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "omega_cube/congruence.hpp"
#include "omega_cube/presentation.hpp"
#include "omega_cube/strict.hpp"
#include "omega_cube/term.hpp"

namespace omega_cube {

/// A finite 1-category with an identity-on-objects involution that reverses arrows.
/// Composition entries are keyed (x, y) with source(x) == target(y).
struct InvolutiveOneCategory {
  struct Arrow {
    std::string name;
    std::size_t source;
    std::size_t target;
  };

  std::string name;
  std::vector<std::string> objects;
  std::vector<Arrow> arrows;
  std::vector<std::size_t> identity;                               // per object
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> compose;
  std::vector<std::size_t> star;  // per arrow; empty for a plain category

  [[nodiscard]] std::size_t object(std::string_view n) const;
  [[nodiscard]] std::size_t arrow(std::string_view n) const;
  [[nodiscard]] std::size_t comp(std::size_t x, std::size_t y) const;

  [[nodiscard]] json to_json() const;
  static InvolutiveOneCategory from_json(const json& j);
};

/// Category axioms, and the involution laws when a star table is present.
Report validate_one_category(const InvolutiveOneCategory& c);

/// Sets star := inverse. Throws DomainError naming a non-invertible arrow.
InvolutiveOneCategory groupoid_involution(InvolutiveOneCategory g);

InvolutiveOneCategory terminal_category();
/// One object, arrows g0..g{n-1} under addition mod n, star = inverse.
InvolutiveOneCategory cyclic_group(int n);
/// Objects o0..o{k-1}, one arrow a<i>_<j> from o<j> to o<i> per pair, star = inverse.
InvolutiveOneCategory pair_groupoid(int k);
/// Objects only; every arrow is an identity.
InvolutiveOneCategory discrete_category(int k);

/// Free involutive category on the 1-cells of one level of a presentation,
/// truncated to words of at most max_length letters. Longer composites go to
/// an absorbing arrow bot_<x>_<y> of the hom-set.
InvolutiveOneCategory truncated_free_involutive(const Presentation& p, Direction d, int max_length);

/// The product strict involutive cubical category over one factor per direction.
class ProductTable {
 public:
  ProductTable(std::vector<InvolutiveOneCategory> factors, const TruncationConfig& cfg);

  [[nodiscard]] const StrictTablePtr& table() const { return table_; }
  [[nodiscard]] const std::vector<InvolutiveOneCategory>& factors() const { return factors_; }
  /// Slot j holds an arrow index when j is a direction of the cell, else an object index.
  [[nodiscard]] const std::vector<std::size_t>& slots(CellId c) const { return slots_.at(c); }
  [[nodiscard]] CellId cell(DirectionSet dirs, const std::vector<std::size_t>& slots) const;

 private:
  [[nodiscard]] std::size_t radix(DirectionSet dirs, std::size_t slot) const;

  std::vector<InvolutiveOneCategory> factors_;
  StrictTablePtr table_;
  std::map<std::uint32_t, CellId> base_;
  std::vector<std::vector<std::size_t>> slots_;
};

/// Throws UsageError when the family is shorter than the direction universe
/// or a member fails validation.
ProductTable build_product(const std::vector<InvolutiveOneCategory>& family, const TruncationConfig& cfg);

namespace fixtures {

/// 0-cells a, b; f: a -> b and g: b -> a in direction 1; k: a -> a in direction 2.
PresentationPtr seed_presentation(const TruncationConfig& cfg = {2, 2, 3, 200000});
/// 0-cells a, b, c; f: a -> b and g: b -> c in direction 1; one direction.
PresentationPtr composable_quiver(int depth = 5);
/// One 0-cell a; p: a -> a in direction 1, q: a -> a in direction 2, and a
/// square alpha with both direction-1 faces q and both direction-2 faces p.
PresentationPtr exchange_square();
PresentationPtr empty_presentation(const TruncationConfig& cfg = {1, 1, 3, 200000});

}  // namespace fixtures

/// Separator into the truncated free involutive category on the 1-cells of a
/// one-direction presentation of dimension at most 1.
Separator make_word_separator(const TermStore& store, int max_length);

/// Dimension-1 normal form: an identity at an object, or a nonempty sequence
/// of possibly starred generator letters (leftmost letter applied last).
struct Word1 {
  struct Letter {
    CellId generator;
    bool starred;
    bool operator==(const Letter&) const = default;
  };
  bool identity = false;
  CellId object = kNoCell;
  std::vector<Letter> letters;

  bool operator==(const Word1&) const = default;
  [[nodiscard]] std::string str(const Presentation& p) const;
};

/// Rewrites to normal form choosing the leftmost-outermost redex.
Word1 normal_form_dim1(const TermStore& store, TermId t);
/// Same rewrite system with redexes chosen uniformly at random.
Word1 normal_form_dim1_random(const TermStore& store, TermId t, std::mt19937_64& rng);

struct OracleOptions {
  FamilySet families;
  /// Applied to the session after seeding and before saturation.
  std::function<void(CongruenceSession&, const TermUniverse&)> tamper;
};

struct OracleResult {
  Report report;  // equal-vs-distinct-forms and notequal-vs-equal-forms violations
  long pairs = 0;
  long equal = 0;
  long not_equal = 0;
  long unknown = 0;
  long unknown_equal_forms = 0;  // incompleteness: engine could not prove an identity
  std::size_t universe_size = 0;
  SaturationStats stats;
  [[nodiscard]] json to_json() const;
};

/// Congruence verdicts against normal forms for every same-level pair of the universe.
OracleResult oracle_compare(PresentationPtr p, const TruncationConfig& cfg, const OracleOptions& options = {});

}  // namespace omega_cube
