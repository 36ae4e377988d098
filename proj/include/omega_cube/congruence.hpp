#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "omega_cube/term.hpp"

namespace omega_cube {

enum class Family : std::uint8_t {
  assoc,
  unit_left,
  unit_right,
  id_functoriality,
  exchange,
  involutive,
  star_commute,
  star_antihomo,
  star_homo_transverse,
  id_hermitian,
  id_hermitian_transverse,
  contraction_projection,
};
inline constexpr int kFamilyCount = 12;

const char* family_name(Family f);
std::optional<Family> family_from_name(std::string_view name);

/// Bitmask of enabled relation families.
struct FamilySet {
  std::uint32_t mask = (1u << kFamilyCount) - 1u;
  [[nodiscard]] bool has(Family f) const { return (mask >> static_cast<int>(f)) & 1u; }
  [[nodiscard]] FamilySet without(Family f) const { return {mask & ~(1u << static_cast<int>(f))}; }
};

struct RelationInstance {
  TermId left;
  TermId right;
  Family family;
};

enum class RelationMode { strict, contraction };

/// Every instance of the enabled families having one side in the universe and
/// the other side in the universe or constructible within its size bound.
/// Contraction mode adds (kappa_d(x,y), id_d(x)) for every kappa member.
std::vector<RelationInstance> instantiate_relations(const TermUniverse& u, RelationMode mode,
                                                    FamilySet families = {});

struct SessionOptions {
  FamilySet families;
  /// Apply oriented relation instances matched modulo classes after seeding.
  bool rule_rounds = true;
  /// Maximum number of rule rounds.
  int max_rounds = 64;
  /// Rule rounds never create terms larger than this; 0 means twice the
  /// largest universe bound seen by add_universe.
  std::uint32_t max_term_size = 0;
};

struct SaturationStats {
  long nodes = 0;
  long classes = 0;
  long merges = 0;
  long instances = 0;
  long rounds = 0;
  bool fixpoint = false;
  bool budget_exhausted = false;
  [[nodiscard]] json to_json() const;
};

/// One edge of a merge trace.
struct TraceStep {
  TermId from;
  TermId to;
  std::string reason;
};

/// A map from terms to target cells; nullopt when the term cannot be evaluated.
struct Separator {
  std::string label;
  std::function<std::optional<std::uint32_t>(TermId)> evaluate;
  std::function<std::string(std::uint32_t)> describe;
};

enum class Verdict { equal, not_equal, unknown };
const char* verdict_name(Verdict v);

struct Decision {
  Verdict verdict = Verdict::unknown;
  std::vector<TraceStep> trace;  // equal
  std::string separator;         // not_equal
  std::string left_image;
  std::string right_image;
  std::string note;  // unknown
};

/// Union-find over hash-consed terms with a congruence table for Refl, Dual
/// and Comp. Kappa and Gen nodes are opaque. Merges propagate to faces.
class CongruenceSession {
 public:
  explicit CongruenceSession(TermStorePtr store, SessionOptions options = {});

  [[nodiscard]] TermStore& store() const { return *store_; }
  [[nodiscard]] const TermStorePtr& store_ptr() const { return store_; }
  [[nodiscard]] std::uint64_t issuer() const { return issuer_; }

  /// Adds t and its subterms; false when the node budget is exhausted.
  bool add_term(TermId t);
  void add_universe(const TermUniverse& u);
  /// Records the instances and queues their merges.
  void seed(const std::vector<RelationInstance>& instances);
  /// Unconditional merge, e.g. for planted faults in tests.
  void merge(TermId a, TermId b, const std::string& label);

  /// Closes under congruence, faces and (optionally) rule rounds until a
  /// fixpoint or until `budget` session nodes exist.
  SaturationStats saturate(long budget);

  [[nodiscard]] bool contains(TermId t) const;
  [[nodiscard]] bool same_class(TermId a, TermId b) const;
  /// Stable class identifier (the representative term).
  [[nodiscard]] TermId class_of(TermId t) const { return representative(t); }
  [[nodiscard]] TermId representative(TermId t) const;
  [[nodiscard]] std::vector<TermId> class_members(TermId t) const;
  [[nodiscard]] std::optional<PiCertificate> certify(TermId a, TermId b) const;
  [[nodiscard]] std::vector<TraceStep> explain(TermId a, TermId b) const;
  [[nodiscard]] const std::vector<RelationInstance>& instances() const { return instances_; }
  [[nodiscard]] SaturationStats stats() const;
  void set_stage(std::uint32_t stage) { stage_ = stage; }

  /// Post-saturation scan: operation compatibility and face compatibility.
  [[nodiscard]] Report audit() const;

 private:
  using Node = std::uint32_t;
  static constexpr Node kNoNode = 0xffffffffu;
  enum class ReasonKind : std::uint8_t { instance, congruence, face, planted };
  struct Reason {
    ReasonKind kind;
    std::uint32_t index;
  };
  struct Pending {
    Node a;
    Node b;
    Reason reason;
  };

  Node node_of(TermId t) const;
  Node ensure(TermId t);
  Node find(Node n) const;
  std::optional<std::pair<std::uint64_t, std::uint64_t>> signature(Node n) const;
  void enqueue(Node a, Node b, Reason r) { pending_.push_back({a, b, r}); }
  void process();
  void unite(Node a, Node b, Reason r);
  void record_proof(Node a, Node b, Reason r);
  bool add_instance(const RelationInstance& inst);
  long rule_round();
  void match_node(Node n, std::vector<RelationInstance>& out);
  const std::vector<Node>& distinct_members(Node root);
  std::string reason_text(Reason r) const;

  TermStorePtr store_;
  SessionOptions options_;
  std::uint64_t issuer_;
  std::uint32_t stage_ = 0;
  long budget_ = 0;
  std::uint32_t size_bound_ = 0;
  bool exhausted_ = false;
  long merges_ = 0;
  long rounds_ = 0;
  bool fixpoint_ = false;

  std::vector<TermId> term_;
  std::unordered_map<TermId, Node> node_;
  mutable std::vector<Node> parent_;
  std::vector<std::vector<Node>> members_;  // valid at roots
  std::vector<std::vector<Node>> uses_;     // parents of the class, valid at roots
  struct PairHash {
    std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& p) const {
      return std::hash<std::uint64_t>()(p.first * 0x9e3779b97f4a7c15ull ^ p.second);
    }
  };
  std::unordered_map<std::pair<std::uint64_t, std::uint64_t>, Node, PairHash> table_;
  std::deque<Pending> pending_;
  std::vector<Node> proof_parent_;
  std::vector<Reason> proof_reason_;
  std::vector<std::pair<Node, Node>> congruence_pairs_;
  std::vector<std::string> planted_;
  // Per rule round: class members with pairwise distinct canonical signatures.
  std::unordered_map<Node, std::vector<Node>> round_members_;

  std::vector<RelationInstance> instances_;
  std::unordered_set<std::pair<std::uint64_t, std::uint64_t>, PairHash> instance_keys_;
};

/// Equal when same class; NotEqual when some separator maps the terms to
/// different cells; Unknown otherwise. Throws UsageError for terms outside the session.
Decision decide_equal(const CongruenceSession& s, TermId t1, TermId t2, const std::vector<Separator>& separators);

/// Smallest class member by (size, printed text).
TermId class_representative(const CongruenceSession& s, TermId t);

json decision_to_json(const Decision& d, const TermStore& store);

}  // namespace omega_cube
