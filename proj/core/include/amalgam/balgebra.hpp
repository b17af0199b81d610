#pragma once

#include "amalgam/rational.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace amalgam {

/// An element of B = M_d over the rationals, stored row-major.
class BMatrix {
 public:
  BMatrix() = default;
  /// The zero matrix of dimension d.
  explicit BMatrix(std::size_t d);
  /// Row-major entries; throws DimensionError unless entries.size() == d*d.
  BMatrix(std::size_t d, std::vector<Rational> entries);

  static BMatrix zero(std::size_t d) { return BMatrix(d); }
  static BMatrix identity(std::size_t d);
  /// Matrix unit E_{kl}, 0-based row k and column l.
  static BMatrix unit(std::size_t d, std::size_t k, std::size_t l);
  /// Matrix unit for the row-major basis index k*d + l.
  static BMatrix basis(std::size_t d, std::size_t index) { return unit(d, index / d, index % d); }
  /// Scalar multiple of the identity.
  static BMatrix scalar(std::size_t d, const Rational& value);

  std::size_t dim() const { return d_; }
  const Rational& operator()(std::size_t row, std::size_t col) const { return entries_[row * d_ + col]; }
  Rational& operator()(std::size_t row, std::size_t col) { return entries_[row * d_ + col]; }
  /// Entry by row-major basis index.
  const Rational& operator[](std::size_t index) const { return entries_[index]; }
  Rational& operator[](std::size_t index) { return entries_[index]; }
  std::span<const Rational> entries() const { return entries_; }

  bool is_zero() const;
  /// Zeroes every entry in place, keeping the storage.
  void set_zero();

  BMatrix& operator+=(const BMatrix& other);
  BMatrix& operator-=(const BMatrix& other);
  BMatrix& operator*=(const Rational& factor);

  friend BMatrix operator+(BMatrix a, const BMatrix& b) { return a += b; }
  friend BMatrix operator-(BMatrix a, const BMatrix& b) { return a -= b; }
  friend BMatrix operator*(BMatrix a, const Rational& f) { return a *= f; }
  friend BMatrix operator*(const Rational& f, BMatrix a) { return a *= f; }
  friend BMatrix operator*(const BMatrix& a, const BMatrix& b);
  /// out = a * b without allocating when out already has dimension d; out
  /// must not alias a or b.
  friend void multiply_into(BMatrix& out, const BMatrix& a, const BMatrix& b);
  friend bool operator==(const BMatrix& a, const BMatrix& b) = default;

  std::string to_string() const;

 private:
  std::size_t d_ = 0;
  std::vector<Rational> entries_;
};

enum class BOp { add, mul, scale, eq };

/// Result of b_arith: a matrix for add/mul/scale, a truth value for eq.
struct BArithResult {
  BMatrix matrix;
  bool truth = false;
};

/// Exact matrix arithmetic dispatch. `scale` reads `factor` and ignores `y`.
BArithResult b_arith(BOp op, const BMatrix& x, const BMatrix& y, const Rational& factor = 0);

/// Number of basis tuples of r inputs: (d^2)^r.
std::size_t basis_tuple_count(std::size_t d, std::size_t arity);

/// Decodes a flat input index into per-slot basis indices, first slot most
/// significant.
std::vector<std::size_t> decode_tuple(std::size_t d, std::size_t arity, std::size_t flat);

/// Encodes per-slot basis indices into a flat input index.
std::size_t encode_tuple(std::size_t d, std::span<const std::size_t> basis);

/// One stored value of a sparse multilinear map: output entry (row, col),
/// input matrix units (k, l) per slot, all 0-based.
struct SparseEntry {
  std::size_t out_row = 0;
  std::size_t out_col = 0;
  std::vector<std::pair<std::size_t, std::size_t>> inputs;
  Rational value;
};

/// A linear map from the r-fold tensor power of M_d to M_d, stored densely
/// against the matrix-unit basis. r = 0 is a constant element.
class MultilinearMap {
 public:
  MultilinearMap() = default;
  /// The zero map.
  MultilinearMap(std::size_t d, std::size_t arity);

  static MultilinearMap constant(const BMatrix& value);
  static MultilinearMap from_sparse(std::size_t d, std::size_t arity, std::span<const SparseEntry> entries);

  std::size_t dim() const { return d_; }
  std::size_t arity() const { return arity_; }
  /// (d^2)^arity.
  std::size_t input_count() const { return inputs_; }

  /// Coefficient of output basis `out` at flat input basis tuple `in`.
  const Rational& at(std::size_t out, std::size_t in) const { return data_[in * d_ * d_ + out]; }
  Rational& at(std::size_t out, std::size_t in) { return data_[in * d_ * d_ + out]; }

  /// Value at a flat basis tuple.
  BMatrix column(std::size_t in) const;
  void set_column(std::size_t in, const BMatrix& value);

  /// Evaluates the map; throws DimensionError on arity or dimension mismatch.
  BMatrix apply(std::span<const BMatrix> args) const;

  bool is_zero() const;
  std::vector<SparseEntry> to_sparse() const;

  MultilinearMap& operator+=(const MultilinearMap& other);
  friend MultilinearMap operator+(MultilinearMap a, const MultilinearMap& b) { return a += b; }
  friend bool operator==(const MultilinearMap& a, const MultilinearMap& b) = default;

 private:
  friend BMatrix apply_unchecked(const MultilinearMap& m, std::span<const BMatrix> args);
/// apply_unchecked writing into out; out must not alias an argument.
void apply_into(BMatrix& out, const MultilinearMap& m, std::span<const BMatrix> args);
void multiply_into(BMatrix& out, const BMatrix& a, const BMatrix& b);
  friend void apply_into(BMatrix& out, const MultilinearMap& m, std::span<const BMatrix> args);

  std::size_t d_ = 0;
  std::size_t arity_ = 0;
  std::size_t inputs_ = 1;
  std::vector<Rational> data_;  // input-major: data_[in * d^2 + out]
};

/// Free-function form of MultilinearMap::apply.
BMatrix apply_multilinear(const MultilinearMap& m, std::span<const BMatrix> args);

/// Same as apply_multilinear without argument validation; hot path.
BMatrix apply_unchecked(const MultilinearMap& m, std::span<const BMatrix> args);
/// apply_unchecked writing into out; out must not alias an argument.
void apply_into(BMatrix& out, const MultilinearMap& m, std::span<const BMatrix> args);
void multiply_into(BMatrix& out, const BMatrix& a, const BMatrix& b);

/// A multilinear map kept as an explicit entry list; evaluates by direct
/// summation over its entries.
class SparseMultilinearMap {
 public:
  SparseMultilinearMap(std::size_t d, std::size_t arity, std::vector<SparseEntry> entries);
  explicit SparseMultilinearMap(const MultilinearMap& dense);

  std::size_t dim() const { return d_; }
  std::size_t arity() const { return arity_; }
  const std::vector<SparseEntry>& entries() const { return entries_; }

  BMatrix apply(std::span<const BMatrix> args) const;
  MultilinearMap to_dense() const { return MultilinearMap::from_sparse(d_, arity_, entries_); }

 private:
  std::size_t d_;
  std::size_t arity_;
  std::vector<SparseEntry> entries_;
};

}  // namespace amalgam
