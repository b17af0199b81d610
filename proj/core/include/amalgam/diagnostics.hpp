#pragma once

#include "amalgam/constructions.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace amalgam {

/// Outcome of a diagnostic. A failing verdict carries the first offending
/// coefficient (in order, then lexicographic tuple, then basis tuple order).
struct Verdict {
  bool pass = true;
  std::optional<IndexTuple> witness_tuple;
  /// Matrix units (row, col), 0-based, one per B-argument of the witness.
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> witness_args;
  std::optional<BMatrix> residual;
  std::vector<std::size_t> checked_orders;
  /// Free-form context, e.g. which identity or series failed.
  std::string detail;

  static Verdict failure(IndexTuple tuple, std::vector<std::size_t> basis, std::size_t d, BMatrix residual,
                         std::vector<std::size_t> orders, std::string detail = {});
};

/// Odd-order pure-`var` cumulants up to `order` all vanish.
Verdict is_b_even(const JointCumulantSpec& u, int var, std::size_t order);
/// Odd-order pure-`var` moments up to `order` all vanish.
Verdict is_b_even(const JointMomentSpec& m, int var, std::size_t order);

/// For a variable that is even up to 2k: the even-block restricted lattice
/// sums agree with the full sums, for both the moment-from-cumulant and the
/// cumulant-from-moment direction. Throws PreconditionError otherwise.
Verdict check_even_moment_formula(const JointCumulantSpec& u, int var, std::size_t k);

/// phi(x_1 b_2 x_2 ... b_n x_n) == b_n phi(x_n x_1 b_2 ... b_{n-1} x_{n-1})
/// for every order n <= `order`, tuple and basis argument tuple.
Verdict check_b_trace(const JointMomentSpec& m, std::size_t order);

/// Every coefficient up to `order` vanishes except at even orders on the
/// alternating tuples (1,2,...,1,2) and (2,1,...,2,1). Needs s = 2.
Verdict is_r_diagonal(const JointCumulantSpec& u, std::size_t order);

/// Determining series of an R-diagonal pair.
struct DeterminingSeries {
  /// Alternating cumulants k_{2n}(x,y,...,x,y) resp. (y,x,...), arity 2n-1,
  /// for n = 1..order.
  std::vector<MultilinearMap> f_full;
  std::vector<MultilinearMap> g_full;
  /// The same with 1_B in the slots inside each (x,y) pair and the series
  /// arguments between pairs, as single-variable series.
  JointCumulantSpec f;
  JointCumulantSpec g;
  /// Moebius transforms of the product cumulants R_xy, R_yx compared with f, g.
  Verdict reconstruction;
};

/// Throws PreconditionError (carrying the witness) unless u passes
/// is_r_diagonal up to 2 * order.
DeterminingSeries determining_series(const JointCumulantSpec& u, std::size_t order);

/// Parameters of the random generators. Numerators are uniform in
/// [-max_numerator, max_numerator], denominators uniform in {1, 2}.
struct RandomOptions {
  int max_numerator = 3;
};

/// Deterministic single-variable spec: odd orders zero, even-order
/// coefficients with random entries. Entries are drawn from std::mt19937_64
/// seeded with `seed`, one draw per entry in (order, input, output) order:
/// numerator = draw % 7 - 3, denominator = 1 + (draw / 7) % 2.
JointCumulantSpec random_even_spec(std::uint64_t seed, std::size_t d, std::size_t order,
                                   const RandomOptions& options = {});

/// Same generator for every tuple of a general s-variable spec.
JointCumulantSpec random_spec(std::uint64_t seed, std::size_t d, std::size_t s, std::size_t order,
                              const RandomOptions& options = {});

/// Random moment family of the same shape (no structure imposed).
JointMomentSpec random_moment_spec(std::uint64_t seed, std::size_t d, std::size_t s, std::size_t order,
                                   const RandomOptions& options = {});

/// Report of the harness for the pair (a a', a' a) built from two free even
/// elements a, a'.
struct EvenProductReport {
  std::uint64_t seed = 0;
  std::size_t d = 0;
  std::size_t pair_order = 0;
  Verdict mean_vanishes;       // phi(a a') = 0 = phi(a' a)
  Verdict sum_even;            // a + a' is even (cumulants and odd moments)
  Verdict r_diagonal;          // (a a', a' a)
  Verdict r_diagonal_swapped;  // (a' a, a a')
  Verdict determining_series;  // reconstruction of f, g at order pair_order / 2
  Verdict trace;               // informational: traciality of the pair's moments
  bool pass() const;
};

struct EvenProductOptions {
  /// Adds k_1(a) = this matrix to the first element (negative control).
  std::optional<BMatrix> inject_mean;
};

/// Builds a = random_even_spec(seed), a' = random_even_spec(seed + 1) at
/// inner order 2 * pair_order and checks the pair (a a', a' a).
EvenProductReport verify_even_product_pair(std::uint64_t seed, std::size_t d, std::size_t pair_order,
                                           const EvenProductOptions& options = {});

}  // namespace amalgam
