#pragma once

#include "amalgam/rational.hpp"

#include <compare>
#include <map>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace amalgam::nc {

/// Default upper bound on the ground-set size accepted by the enumerators.
inline constexpr int kDefaultMaxN = 10;

/// A partition of {1..n} in canonical form: every block ascends and blocks
/// are ordered by their minimum element. Construction validates and
/// canonicalizes, so two partitions are equal iff they are the same set
/// partition.
class SetPartition {
 public:
  using Block = std::vector<int>;

  SetPartition() = default;
  /// Throws StructuralError on overlap, gaps, empty blocks or n < 1.
  SetPartition(int n, std::vector<Block> blocks);

  /// 0_n, all singletons.
  static SetPartition singletons(int n);
  /// 1_n, a single block.
  static SetPartition full(int n);
  /// Builds a partition from one block label per element (elements 1..n).
  static SetPartition from_labels(std::span<const int> labels);

  int size() const { return n_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  std::size_t block_count() const { return blocks_.size(); }

  /// labels()[i-1] is the index (into blocks()) of the block holding i.
  std::vector<int> labels() const;

  std::string to_string() const;

  friend bool operator==(const SetPartition&, const SetPartition&) = default;
  friend auto operator<=>(const SetPartition&, const SetPartition&) = default;

 private:
  int n_ = 0;
  std::vector<Block> blocks_;
};

bool is_noncrossing(const SetPartition& p);

/// All noncrossing partitions of {1..n}, sorted lexicographically by their
/// canonical block lists. Throws RangeError unless 1 <= n <= max_n.
std::vector<SetPartition> enumerate_nc(int n, int max_n = kDefaultMaxN);

/// The noncrossing partitions of {1..n} whose blocks all have even size.
/// Throws RangeError for odd or out-of-range n.
std::vector<SetPartition> enumerate_nc_even(int n, int max_n = kDefaultMaxN);

bool has_odd_block(const SetPartition& p);

/// Refinement order: every block of p lies inside a block of q.
bool leq_refine(const SetPartition& p, const SetPartition& q);

/// Kreweras complement on the barred copy of {1..n}, relabeled 1..n.
/// Throws DomainError for crossing input.
SetPartition kreweras(const SetPartition& p);

/// p on the odd positions of {1..2n} and kreweras(p) on the even positions.
SetPartition alternating_union(const SetPartition& p);

/// Moebius function of the interval [p, q] in NC(n).
/// Throws OrderError unless p <= q, DomainError for crossing input.
Rational mobius_nc(const SetPartition& p, const SetPartition& q);

/// Elements of NC(n) together with lazily built, cached tables. Instances
/// are immutable once published; get() is safe to call concurrently.
class NcLattice {
 public:
  static const NcLattice& get(int n, int max_n = kDefaultMaxN);

  int size() const { return n_; }
  const std::vector<SetPartition>& elements() const { return elements_; }
  std::size_t index_of(const SetPartition& p) const;

  /// mobius_to_top()[i] == mu(elements()[i], 1_n).
  const std::vector<Rational>& mobius_to_top() const;
  /// Moebius value mu(elements()[i], 1_n).
  const Rational& mobius_to_top(std::size_t i) const { return mobius_to_top()[i]; }

  /// Memoized interval Moebius value by element indices; requires p <= q.
  Rational mobius(std::size_t p, std::size_t q) const;

  explicit NcLattice(int n);

 private:
  bool leq_index(std::size_t p, std::size_t q) const;

  int n_;
  std::vector<SetPartition> elements_;
  // Per element: label of each position, and the minimum of its block.
  std::vector<std::vector<unsigned char>> labels_;
  std::vector<std::vector<unsigned char>> block_min_;

  mutable std::once_flag top_once_;
  mutable std::vector<Rational> top_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::pair<std::size_t, std::size_t>, Rational> memo_;
};

namespace detail {

/// Finest noncrossing partition coarser than both a and b (join in NC(n)).
/// Test utility only.
SetPartition nc_join(const SetPartition& a, const SetPartition& b);

}  // namespace detail

}  // namespace amalgam::nc
