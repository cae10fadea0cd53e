#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cosmo/expr.hpp"

namespace cosmo::testing {

constexpr std::uint64_t kPropertySeed = 20240611;

/// Random expressions over t, x, y that stay finite for t, x, y in [0.1, 2].
class ExprGenerator {
 public:
  explicit ExprGenerator(std::uint64_t seed) : rng_(seed) {}

  Expr any(int depth);
  /// Strictly positive on the sampling box.
  Expr positive(int depth);
  /// Sum of c t^n and c exp(a t) terms, the closed-form antiderivative family.
  Expr integrable();
  Rational small_rational(int max_num = 5, int max_den = 4);
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::mt19937_64& rng() { return rng_; }

 private:
  Expr leaf();
  std::mt19937_64 rng_;
};

struct PropertyResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;
  bool ok() const { return cases > 0 && failures == 0; }
};

PropertyResult property_simplify_idempotent(int cases, std::uint64_t seed = kPropertySeed);
PropertyResult property_parse_print_round_trip(int cases, std::uint64_t seed = kPropertySeed);
PropertyResult property_antiderivative_inverse(int cases, std::uint64_t seed = kPropertySeed);
PropertyResult property_reverse_invariances(int cases, std::uint64_t seed = kPropertySeed);
PropertyResult property_session_round_trip(int cases, std::uint64_t seed = kPropertySeed);
PropertyResult property_diff_eval_consistency(int cases, std::uint64_t seed = kPropertySeed);
PropertyResult property_solve_back_substitution(int cases, std::uint64_t seed = kPropertySeed);

}  // namespace cosmo::testing
