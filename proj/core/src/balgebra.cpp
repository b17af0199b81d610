#include "amalgam/balgebra.hpp"

#include "amalgam/errors.hpp"

#include <sstream>

namespace amalgam {

BMatrix::BMatrix(std::size_t d) : d_(d), entries_(d * d) {
  if (d == 0) throw DimensionError("matrix dimension must be positive");
}

BMatrix::BMatrix(std::size_t d, std::vector<Rational> entries) : d_(d), entries_(std::move(entries)) {
  if (d == 0) throw DimensionError("matrix dimension must be positive");
  if (entries_.size() != d * d) {
    throw DimensionError("matrix of dimension " + std::to_string(d) + " needs " + std::to_string(d * d) +
                         " entries, got " + std::to_string(entries_.size()));
  }
}

BMatrix BMatrix::identity(std::size_t d) {
  BMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = 1;
  return m;
}

BMatrix BMatrix::unit(std::size_t d, std::size_t k, std::size_t l) {
  if (k >= d || l >= d) throw DimensionError("matrix unit index outside dimension " + std::to_string(d));
  BMatrix m(d);
  m(k, l) = 1;
  return m;
}

BMatrix BMatrix::scalar(std::size_t d, const Rational& value) {
  BMatrix m(d);
  for (std::size_t i = 0; i < d; ++i) m(i, i) = value;
  return m;
}

bool BMatrix::is_zero() const {
  for (const auto& e : entries_) {
    if (sgn(e) != 0) return false;
  }
  return true;
}

namespace {

void require_same_dim(const BMatrix& a, const BMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("matrix dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()) +
                         " differ");
  }
}

}  // namespace

BMatrix& BMatrix::operator+=(const BMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += other.entries_[i];
  return *this;
}

BMatrix& BMatrix::operator-=(const BMatrix& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= other.entries_[i];
  return *this;
}

BMatrix& BMatrix::operator*=(const Rational& factor) {
  for (auto& e : entries_) e *= factor;
  return *this;
}

namespace {

bool is_one(const Rational& r) { return mpq_cmp_ui(r.get_mpq_t(), 1, 1) == 0; }

// acc += x * y, skipping the multiplication for unit factors and the
// addition into zero; these dominate products of matrix-unit words.
void add_product(Rational& acc, const Rational& x, const Rational& y, Rational& tmp) {
  const Rational* term = &tmp;
  if (is_one(x)) {
    term = &y;
  } else if (is_one(y)) {
    term = &x;
  } else {
    mpq_mul(tmp.get_mpq_t(), x.get_mpq_t(), y.get_mpq_t());
  }
  if (sgn(acc) == 0) {
    acc = *term;
  } else {
    acc += *term;
  }
}

}  // namespace

void BMatrix::set_zero() {
  for (auto& e : entries_) {
    if (sgn(e) != 0) e = 0;
  }
}

void multiply_into(BMatrix& out, const BMatrix& a, const BMatrix& b) {
  require_same_dim(a, b);
  const std::size_t d = a.d_;
  if (out.d_ != d) {
    out = BMatrix(d);
  } else {
    out.set_zero();
  }
  thread_local Rational tmp;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      const Rational& aik = a.entries_[i * d + k];
      if (sgn(aik) == 0) continue;
      for (std::size_t j = 0; j < d; ++j) {
        const Rational& bkj = b.entries_[k * d + j];
        if (sgn(bkj) == 0) continue;
        add_product(out.entries_[i * d + j], aik, bkj, tmp);
      }
    }
  }
}

BMatrix operator*(const BMatrix& a, const BMatrix& b) {
  BMatrix out(a.d_);
  multiply_into(out, a, b);
  return out;
}

std::string BMatrix::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < d_; ++i) {
    if (i) os << ", ";
    os << '[';
    for (std::size_t j = 0; j < d_; ++j) {
      if (j) os << ", ";
      os << amalgam::to_string((*this)(i, j));
    }
    os << ']';
  }
  os << ']';
  return os.str();
}

BArithResult b_arith(BOp op, const BMatrix& x, const BMatrix& y, const Rational& factor) {
  switch (op) {
    case BOp::add:
      return {x + y, false};
    case BOp::mul:
      return {x * y, false};
    case BOp::scale:
      return {x * factor, false};
    case BOp::eq:
      require_same_dim(x, y);
      return {BMatrix{}, x == y};
  }
  throw ArgumentError("unknown matrix operation");
}

std::size_t basis_tuple_count(std::size_t d, std::size_t arity) {
  std::size_t count = 1;
  for (std::size_t i = 0; i < arity; ++i) count *= d * d;
  return count;
}

std::vector<std::size_t> decode_tuple(std::size_t d, std::size_t arity, std::size_t flat) {
  std::vector<std::size_t> out(arity);
  const std::size_t base = d * d;
  for (std::size_t i = arity; i-- > 0;) {
    out[i] = flat % base;
    flat /= base;
  }
  return out;
}

std::size_t encode_tuple(std::size_t d, std::span<const std::size_t> basis) {
  std::size_t flat = 0;
  for (std::size_t b : basis) flat = flat * d * d + b;
  return flat;
}

// ---------------------------------------------------------------------------

MultilinearMap::MultilinearMap(std::size_t d, std::size_t arity)
    : d_(d), arity_(arity), inputs_(basis_tuple_count(d, arity)), data_(inputs_ * d * d) {
  if (d == 0) throw DimensionError("map dimension must be positive");
}

MultilinearMap MultilinearMap::constant(const BMatrix& value) {
  MultilinearMap m(value.dim(), 0);
  m.set_column(0, value);
  return m;
}

MultilinearMap MultilinearMap::from_sparse(std::size_t d, std::size_t arity, std::span<const SparseEntry> entries) {
  MultilinearMap m(d, arity);
  for (const auto& e : entries) {
    if (e.inputs.size() != arity) {
      throw DimensionError("sparse entry has " + std::to_string(e.inputs.size()) + " inputs, map arity is " +
                           std::to_string(arity));
    }
    if (e.out_row >= d || e.out_col >= d) throw DimensionError("sparse entry output index outside dimension");
    std::vector<std::size_t> basis;
    for (const auto& [k, l] : e.inputs) {
      if (k >= d || l >= d) throw DimensionError("sparse entry input index outside dimension");
      basis.push_back(k * d + l);
    }
    m.at(e.out_row * d + e.out_col, encode_tuple(d, basis)) += e.value;
  }
  return m;
}

BMatrix MultilinearMap::column(std::size_t in) const {
  const std::size_t dd = d_ * d_;
  std::vector<Rational> entries(data_.begin() + static_cast<std::ptrdiff_t>(in * dd),
                                data_.begin() + static_cast<std::ptrdiff_t>((in + 1) * dd));
  return BMatrix(d_, std::move(entries));
}

void MultilinearMap::set_column(std::size_t in, const BMatrix& value) {
  if (value.dim() != d_) throw DimensionError("column dimension mismatch");
  const std::size_t dd = d_ * d_;
  for (std::size_t o = 0; o < dd; ++o) data_[in * dd + o] = value[o];
}

BMatrix MultilinearMap::apply(std::span<const BMatrix> args) const {
  if (args.size() != arity_) {
    throw DimensionError("map of arity " + std::to_string(arity_) + " applied to " + std::to_string(args.size()) +
                         " arguments");
  }
  for (const auto& a : args) {
    if (a.dim() != d_) throw DimensionError("argument dimension does not match map dimension");
  }
  return apply_unchecked(*this, args);
}

BMatrix apply_multilinear(const MultilinearMap& m, std::span<const BMatrix> args) { return m.apply(args); }

BMatrix apply_unchecked(const MultilinearMap& m, std::span<const BMatrix> args) {
  BMatrix out(m.d_);
  apply_into(out, m, args);
  return out;
}

void apply_into(BMatrix& out, const MultilinearMap& m, std::span<const BMatrix> args) {
  const std::size_t d = m.d_;
  const std::size_t dd = d * d;
  if (out.dim() != d) {
    out = BMatrix(d);
  } else {
    out.set_zero();
  }
  if (m.arity_ == 0) {
    for (std::size_t o = 0; o < dd; ++o) out[o] = m.data_[o];
    return;
  }
  // Expand every argument in the matrix-unit basis, keeping only nonzeros:
  // nz holds the basis indices slot after slot, start[s] the offsets.
  thread_local std::vector<std::size_t> nz, start, pos;
  thread_local std::vector<Rational> prefix;
  nz.clear();
  start.assign(1, 0);
  for (std::size_t s = 0; s < m.arity_; ++s) {
    for (std::size_t b = 0; b < dd; ++b) {
      if (sgn(args[s][b]) != 0) nz.push_back(b);
    }
    if (nz.size() == start.back()) return;
    start.push_back(nz.size());
  }
  pos.assign(m.arity_, 0);
  // prefix[s] = product of the chosen coefficients of slots < s.
  prefix.resize(m.arity_ + 1);
  prefix[0] = 1;
  auto chosen = [&](std::size_t s) -> const Rational& { return args[s][nz[start[s] + pos[s]]]; };
  for (std::size_t s = 0; s < m.arity_; ++s) prefix[s + 1] = prefix[s] * chosen(s);
  thread_local Rational tmp;
  while (true) {
    std::size_t flat = 0;
    for (std::size_t s = 0; s < m.arity_; ++s) flat = flat * dd + nz[start[s] + pos[s]];
    const Rational& coeff = prefix[m.arity_];
    const std::size_t base = flat * dd;
    for (std::size_t o = 0; o < dd; ++o) {
      const Rational& t = m.data_[base + o];
      if (sgn(t) == 0) continue;
      add_product(out[o], t, coeff, tmp);
    }
    // Advance the odometer, last slot fastest.
    std::size_t s = m.arity_;
    while (s > 0) {
      --s;
      if (++pos[s] < start[s + 1] - start[s]) break;
      pos[s] = 0;
      if (s == 0) return;
    }
    for (std::size_t t = s; t < m.arity_; ++t) {
      const Rational& c = chosen(t);
      if (is_one(c)) {
        prefix[t + 1] = prefix[t];
      } else {
        prefix[t + 1] = prefix[t] * c;
      }
    }
  }
}

bool MultilinearMap::is_zero() const {
  for (const auto& e : data_) {
    if (sgn(e) != 0) return false;
  }
  return true;
}

std::vector<SparseEntry> MultilinearMap::to_sparse() const {
  std::vector<SparseEntry> out;
  const std::size_t dd = d_ * d_;
  for (std::size_t in = 0; in < inputs_; ++in) {
    const auto basis = decode_tuple(d_, arity_, in);
    for (std::size_t o = 0; o < dd; ++o) {
      const Rational& v = data_[in * dd + o];
      if (sgn(v) == 0) continue;
      SparseEntry e;
      e.out_row = o / d_;
      e.out_col = o % d_;
      for (std::size_t b : basis) e.inputs.emplace_back(b / d_, b % d_);
      e.value = v;
      out.push_back(std::move(e));
    }
  }
  return out;
}

MultilinearMap& MultilinearMap::operator+=(const MultilinearMap& other) {
  if (other.d_ != d_ || other.arity_ != arity_) throw DimensionError("adding maps of different shape");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

// ---------------------------------------------------------------------------

SparseMultilinearMap::SparseMultilinearMap(std::size_t d, std::size_t arity, std::vector<SparseEntry> entries)
    : d_(d), arity_(arity), entries_(std::move(entries)) {
  for (const auto& e : entries_) {
    if (e.inputs.size() != arity_) throw DimensionError("sparse entry arity mismatch");
  }
}

SparseMultilinearMap::SparseMultilinearMap(const MultilinearMap& dense)
    : d_(dense.dim()), arity_(dense.arity()), entries_(dense.to_sparse()) {}

BMatrix SparseMultilinearMap::apply(std::span<const BMatrix> args) const {
  if (args.size() != arity_) throw DimensionError("sparse map arity mismatch");
  BMatrix out(d_);
  for (const auto& e : entries_) {
    Rational term = e.value;
    for (std::size_t s = 0; s < arity_; ++s) {
      term *= args[s](e.inputs[s].first, e.inputs[s].second);
      if (sgn(term) == 0) break;
    }
    out(e.out_row, e.out_col) += term;
  }
  return out;
}

}  // namespace amalgam
