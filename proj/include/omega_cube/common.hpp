#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace omega_cube {

using json = nlohmann::ordered_json;

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (JSON documents, identifiers, map entries).
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by a caller (bad direction, term outside universe, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// An operation in a finite table was requested outside its domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

using Direction = int;

inline constexpr int kMaxDirections = 32;

/// A finite set of directions in {1..32}, stored as a bitmask so that
/// equal sets compare identically and iterate in increasing order.
class DirectionSet {
 public:
  constexpr DirectionSet() = default;
  static constexpr DirectionSet from_mask(std::uint32_t mask) {
    DirectionSet s;
    s.mask_ = mask;
    return s;
  }
  static DirectionSet of(std::initializer_list<Direction> dirs) {
    DirectionSet s;
    for (Direction d : dirs) s = s.with(d);
    return s;
  }
  /// The set {1..k}.
  static DirectionSet range(int k) {
    return from_mask(k >= 32 ? 0xffffffffu : ((1u << k) - 1u));
  }

  [[nodiscard]] constexpr std::uint32_t mask() const { return mask_; }
  [[nodiscard]] constexpr int size() const { return std::popcount(mask_); }
  [[nodiscard]] constexpr bool empty() const { return mask_ == 0; }
  [[nodiscard]] bool contains(Direction d) const {
    return d >= 1 && d <= kMaxDirections && (mask_ >> (d - 1)) & 1u;
  }
  [[nodiscard]] DirectionSet with(Direction d) const {
    check(d);
    return from_mask(mask_ | (1u << (d - 1)));
  }
  [[nodiscard]] DirectionSet without(Direction d) const {
    check(d);
    return from_mask(mask_ & ~(1u << (d - 1)));
  }
  [[nodiscard]] bool subset_of(DirectionSet other) const { return (mask_ & ~other.mask_) == 0; }
  [[nodiscard]] int max() const { return mask_ == 0 ? 0 : 32 - std::countl_zero(mask_); }
  /// Position of d among the members (0-based), -1 if absent.
  [[nodiscard]] int index_of(Direction d) const {
    if (!contains(d)) return -1;
    return std::popcount(mask_ & ((1u << (d - 1)) - 1u));
  }
  [[nodiscard]] std::vector<Direction> to_vector() const {
    std::vector<Direction> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m) + 1);
    return out;
  }
  /// "1,2" style rendering (empty string for the empty set).
  [[nodiscard]] std::string str() const;
  static DirectionSet parse(std::string_view text);

  friend constexpr bool operator==(DirectionSet a, DirectionSet b) { return a.mask_ == b.mask_; }
  /// Orders by cardinality, then lexicographically on the sorted members.
  friend bool operator<(DirectionSet a, DirectionSet b);

 private:
  static void check(Direction d) {
    if (d < 1 || d > kMaxDirections) throw UsageError("direction out of range: " + std::to_string(d));
  }
  std::uint32_t mask_ = 0;
};

enum class Side : std::uint8_t { source = 0, target = 1 };

inline char side_char(Side s) { return s == Side::source ? 's' : 't'; }

/// Finite truncation of the omega-dimensional structures.
struct TruncationConfig {
  int max_dim = 2;
  int dir_universe = 2;
  int term_depth = 3;
  long saturation_budget = 200000;

  void validate() const;
  [[nodiscard]] DirectionSet universe() const { return DirectionSet::range(dir_universe); }
  [[nodiscard]] json to_json() const;
  static TruncationConfig from_json(const json& j, const TruncationConfig& defaults);
  static TruncationConfig from_json(const json& j);
};

/// One failed check with an axiom/rule tag and the cells or terms involved.
struct Violation {
  std::string tag;
  std::string message;
  std::vector<std::string> witnesses;
};

/// Outcome of a checker: an empty violation list means the check passed.
struct Report {
  std::string name;
  std::vector<Violation> violations;
  long checked = 0;

  [[nodiscard]] bool ok() const { return violations.empty(); }
  void add(std::string tag, std::string message, std::vector<std::string> witnesses = {}) {
    violations.push_back({std::move(tag), std::move(message), std::move(witnesses)});
  }
  void append(const Report& other) {
    violations.insert(violations.end(), other.violations.begin(), other.violations.end());
    checked += other.checked;
  }
  [[nodiscard]] long count(std::string_view tag) const;
  [[nodiscard]] json to_json(std::size_t max_listed = 50) const;
};

/// Number of worker threads, capped by OMEGA_CUBE_THREADS when set.
int worker_count();

/// Runs body(i) for i in [0, n) over worker_count() threads. Callers that
/// produce output write into per-index slots to keep results deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace omega_cube
