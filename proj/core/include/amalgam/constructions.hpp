#pragma once

#include "amalgam/cumulant_engine.hpp"

#include <optional>
#include <vector>

namespace amalgam {

/// Joint cumulants of the union of two mutually free families: pure tuples
/// copy their source (b's variables shifted by a's count), mixed tuples
/// vanish. Truncation is the smaller of the two.
JointCumulantSpec free_union(const JointCumulantSpec& a, const JointCumulantSpec& b);

/// Cumulants of the sums y_g = sum of the variables in groups[g-1], obtained
/// by multilinear expansion. `groups` must partition {1..s}; the result is
/// the sum family's R-transform when the summands come from free families.
JointCumulantSpec add_free_variables(const JointCumulantSpec& u, const std::vector<std::vector<int>>& groups);

/// Replaces variable `var` by b * var.
JointCumulantSpec left_scale(const BMatrix& b, const JointCumulantSpec& u, int var);

/// Cumulants of the product variables w_j = u_{words[j][0]} * u_{words[j][1]} * ...
/// up to order `order`, via moments of the concatenated letters followed by
/// Moebius inversion. Needs u.truncation() >= order * (longest word).
JointCumulantSpec product_word_cumulants(const JointCumulantSpec& u, const std::vector<IndexTuple>& words,
                                         std::size_t order);

/// Coefficient arguments used on the second factor of a boxed convolution.
struct BoxedArgs {
  enum class Kind { trivial, symmetric };
  Kind kind = Kind::trivial;
  BMatrix b0;  // used by Kind::symmetric

  static BoxedArgs trivial() { return {}; }
  static BoxedArgs symmetric(BMatrix b0) { return {Kind::symmetric, std::move(b0)}; }
};

/// Boxed convolution of two single-variable series: the order-n coefficient
/// at (b_2..b_n) sums, over pi in NC(n), the free-union family evaluated
/// along pi u Kr(pi) on f, g, b_2 f, B_2 g, ..., b_n f, B_n g, where B_j is 1_B
/// (trivial) or b0 (symmetric). Truncation is min(N_f, N_g) unless `order`
/// is given.
JointCumulantSpec boxed_convolution(const JointCumulantSpec& f, const JointCumulantSpec& g,
                                    const BoxedArgs& g_args = BoxedArgs::trivial(),
                                    std::optional<std::size_t> order = std::nullopt);

/// Boxed convolution keeping the second factor's arguments free: entry n-1
/// is a map of arity 2n-2 in the slot order (b_2, B_2, b_3, B_3, ..., b_n, B_n).
std::vector<MultilinearMap> boxed_convolution_full(const JointCumulantSpec& f, const JointCumulantSpec& g,
                                                   std::optional<std::size_t> order = std::nullopt);

/// Sum over NC(n) of f's partitioned values (boxed convolution with Zeta).
JointCumulantSpec zeta_transform(const JointCumulantSpec& f);

/// Moebius-weighted sum over NC(n) (boxed convolution with Mob).
JointCumulantSpec mobius_transform(const JointCumulantSpec& f);

}  // namespace amalgam
