#pragma once

#include "amalgam/balgebra.hpp"
#include "amalgam/nc_lattice.hpp"

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace amalgam {

/// Variable indices of one coefficient, 1-based; the order is its length.
using IndexTuple = std::vector<int>;

/// Storage shared by cumulant and moment families: a truncated table
/// (order n <= N, index tuple in {1..s}^n) -> multilinear map of arity n-1.
/// Only nonzero maps are stored; absent keys are zero maps.
class SeriesTable {
 public:
  SeriesTable() = default;
  /// Throws DimensionError for d = 0 or s = 0.
  SeriesTable(std::size_t d, std::size_t s, std::size_t truncation);

  std::size_t dim() const { return d_; }
  std::size_t variables() const { return s_; }
  std::size_t truncation() const { return n_; }

  /// nullptr for a zero (absent) coefficient.
  const MultilinearMap* find(const IndexTuple& key) const;
  /// Copy of the coefficient; the zero map when absent.
  MultilinearMap coefficient(const IndexTuple& key) const;
  bool is_zero_at(const IndexTuple& key) const { return find(key) == nullptr; }

  /// Stores a coefficient; zero maps erase the key. Throws ArgumentError on an
  /// invalid key and DimensionError on a shape mismatch.
  void set(const IndexTuple& key, MultilinearMap value);

  const std::map<IndexTuple, MultilinearMap>& entries() const { return table_; }

  /// Every index tuple of the given order, lexicographic.
  std::vector<IndexTuple> tuples(std::size_t order) const;

  /// Same data at a smaller truncation order.
  SeriesTable truncated(std::size_t order) const;

  void validate_key(const IndexTuple& key) const;

  friend bool operator==(const SeriesTable&, const SeriesTable&) = default;

 private:
  std::size_t d_ = 0;
  std::size_t s_ = 0;
  std::size_t n_ = 0;
  std::map<IndexTuple, MultilinearMap> table_;
};

enum class SeriesKind { cumulant, moment };

/// A truncated joint B-valued distribution of s variables, either as its
/// cumulant family (R-transform data) or its moment family.
template <SeriesKind Kind>
class JointSeries : public SeriesTable {
 public:
  static constexpr SeriesKind kind = Kind;

  JointSeries() = default;
  JointSeries(std::size_t d, std::size_t s, std::size_t truncation) : SeriesTable(d, s, truncation) {}
  explicit JointSeries(SeriesTable table) : SeriesTable(std::move(table)) {}

  JointSeries truncated(std::size_t order) const { return JointSeries(SeriesTable::truncated(order)); }

  friend bool operator==(const JointSeries&, const JointSeries&) = default;
};

using JointCumulantSpec = JointSeries<SeriesKind::cumulant>;
using JointMomentSpec = JointSeries<SeriesKind::moment>;

struct WordSlot {
  BMatrix left;  // coefficient multiplied in front of the variable
  int var = 1;
};

/// x_{i_1} (x) L_2 x_{i_2} (x) ... (x) L_n x_{i_n}, followed by a trailing
/// right coefficient. The first slot's left coefficient multiplies the
/// whole value from the left.
struct Word {
  std::vector<WordSlot> slots;
  BMatrix tail;

  std::size_t size() const { return slots.size(); }

  /// Word with L_1 = 1_B, L_j = E(basis[j-2]) for j >= 2 and tail 1_B.
  static Word basis_word(std::size_t d, const IndexTuple& vars, std::span<const std::size_t> basis);
  /// Word with the given left coefficients for slots 2..n; L_1 = tail = 1_B.
  static Word with_args(const IndexTuple& vars, std::span<const BMatrix> args);
};

/// Picks which of the currently contractible blocks to fold next; receives
/// the candidate block indices (into SetPartition::blocks()).
using ContractionChooser = std::function<std::size_t(std::span<const std::size_t> candidates)>;

/// Nested evaluation of the family along p on the word. Throws DomainError
/// for crossing p, DimensionError on size mismatch, ArgumentError on a bad
/// variable index, and TruncationError when a block exceeds the family's
/// truncation order.
BMatrix eval_partitioned(const SeriesTable& family, const nc::SetPartition& p, const Word& w);

/// Same with a caller-chosen contraction order.
BMatrix eval_partitioned(const SeriesTable& family, const nc::SetPartition& p, const Word& w,
                         const ContractionChooser& choose);

JointMomentSpec moments_from_cumulants(const JointCumulantSpec& c);
JointMomentSpec moments_from_cumulants(const JointCumulantSpec& c, std::size_t order);

JointCumulantSpec cumulants_from_moments(const JointMomentSpec& m);
JointCumulantSpec cumulants_from_moments(const JointMomentSpec& m, std::size_t order);

/// phi(word) = sum over NC(n) of the cumulant family's partitioned values.
BMatrix moment_of_word(const JointCumulantSpec& c, const Word& w);

/// Every coefficient evaluated at (b0, ..., b0).
std::map<IndexTuple, BMatrix> extract_series(const SeriesTable& spec, const BMatrix& b0);

namespace detail {

/// One step of a fixed contraction schedule: 0-based positions of a block
/// and the slot its value folds into (-1 for the trailing coefficient).
struct ContractionStep {
  std::vector<int> positions;
  int fold_into = -1;
};

struct ContractionPlan {
  int n = 0;
  std::vector<ContractionStep> steps;
};

/// Schedule contracting blocks by decreasing minimum; such a block is always
/// an interval of the remaining word.
ContractionPlan make_plan(const nc::SetPartition& p);

/// Plans for every element of NC(n), in lattice order; cached.
const std::vector<ContractionPlan>& lattice_plans(int n);

/// True if any block of the plan hits a zero coefficient for these variables.
bool plan_vanishes(const SeriesTable& family, const ContractionPlan& plan, std::span<const int> vars);

/// Evaluates a plan; the caller guarantees shape validity.
BMatrix eval_plan(const SeriesTable& family, const ContractionPlan& plan, const Word& w);

/// Lattice indices of NC(n) elements whose plans do not structurally vanish.
std::vector<std::size_t> surviving_partitions(const SeriesTable& family, std::span<const int> vars);

/// A plan with its block coefficients looked up for one variable tuple.
struct BoundPlan {
  std::size_t index = 0;  // position in lattice_plans(n)
  const ContractionPlan* plan = nullptr;
  std::vector<const MultilinearMap*> coeffs;  // one per step
};

/// Surviving plans of NC(vars.size()), bound to the family's coefficients.
std::vector<BoundPlan> bind_surviving(const SeriesTable& family, std::span<const int> vars);

/// Evaluates bound plans on words of one length, reusing scratch storage.
class PlanEvaluator {
 public:
  explicit PlanEvaluator(std::size_t d) : d_(d), tail_(d), value_(d), u_(d), product_(d) {}
  BMatrix operator()(const BoundPlan& bound, const Word& w);

 private:
  std::size_t d_;
  std::vector<BMatrix> left_;
  std::vector<BMatrix> args_;
  BMatrix tail_, value_, u_, product_;
};

}  // namespace detail

}  // namespace amalgam
