#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "omega_cube/common.hpp"
#include "omega_cube/presentation.hpp"

namespace omega_cube {

inline constexpr std::uint64_t kDefaultSeed = 1729;

struct AcceptanceOptions {
  std::uint64_t seed = kDefaultSeed;
  int soundness_assignments = 100;
  int factorization_assignments = 20;
  int morphisms = 10;
  long budget = 200000;
  /// Wall-clock limit for each product run, in seconds.
  double product_time_limit = 30.0;
  [[nodiscard]] json to_json() const;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string summary;
  json details;
  double seconds = 0.0;  // kept out of the JSON report

  [[nodiscard]] json to_json() const;
};

struct AcceptanceReport {
  AcceptanceOptions options;
  std::vector<CriterionResult> criteria;

  [[nodiscard]] bool all_pass() const;
  [[nodiscard]] json to_json() const;
};

CriterionResult criterion_product_models(const AcceptanceOptions& o);
CriterionResult criterion_magma_cubical(const AcceptanceOptions& o);
CriterionResult criterion_relation_provability(const AcceptanceOptions& o);
CriterionResult criterion_dimension_one_oracle(const AcceptanceOptions& o);
CriterionResult criterion_free_contraction(const AcceptanceOptions& o);
CriterionResult criterion_universal_factorization(const AcceptanceOptions& o);
CriterionResult criterion_unit_naturality(const AcceptanceOptions& o);

/// Criteria 1-7, then criterion 8 by recomputing them and comparing the serialized reports.
AcceptanceReport run_acceptance(const AcceptanceOptions& o, bool with_determinism = true);

/// Independent enumerator of well-typed term texts up to a size bound, using
/// its own typing and face rules over expression trees. Counts per level key.
std::map<std::string, std::size_t> brute_force_level_counts(const Presentation& p, int max_dim, int dir_universe,
                                                            std::size_t max_size);

}  // namespace omega_cube
