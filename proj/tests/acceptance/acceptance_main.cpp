// Runs the acceptance suite and prints one PASS/FAIL line per criterion.
#include <cstdio>

#include "omega_cube/acceptance.hpp"

int main() {
  using namespace omega_cube;
  AcceptanceOptions o;
  o.seed = kDefaultSeed;
  o.soundness_assignments = 100;
  o.factorization_assignments = 20;
  o.morphisms = 10;
  o.budget = 200000;
  o.product_time_limit = 30.0;  // seconds per product run

  AcceptanceReport report = run_acceptance(o);
  for (const auto& c : report.criteria) {
    std::printf("%s [%d] %s: %s (%.2fs)\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), c.summary.c_str(),
                c.seconds);
  }
  std::printf("%s\n", report.all_pass() ? "all criteria pass" : "some criteria FAILED");
  return report.all_pass() ? 0 : 1;
}
