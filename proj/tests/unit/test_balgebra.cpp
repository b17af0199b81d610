#include "amalgam/balgebra.hpp"
#include "amalgam/errors.hpp"

#include <doctest.h>

#include <random>

using namespace amalgam;

namespace {

Rational small(std::mt19937_64& rng) {
  Rational r(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 3) + 1);
  r.canonicalize();
  return r;
}

BMatrix random_matrix(std::mt19937_64& rng, std::size_t d) {
  BMatrix m(d);
  for (std::size_t i = 0; i < d * d; ++i) m[i] = small(rng);
  return m;
}

MultilinearMap random_map(std::mt19937_64& rng, std::size_t d, std::size_t arity) {
  MultilinearMap m(d, arity);
  for (std::size_t in = 0; in < m.input_count(); ++in)
    for (std::size_t out = 0; out < d * d; ++out) m.at(out, in) = small(rng);
  return m;
}

}  // namespace

TEST_CASE("rational text form") {
  CHECK(to_string(Rational(3, 2)) == "3/2");
  CHECK(to_string(Rational(0)) == "0/1");
  CHECK(to_string(Rational(-4)) == "-4/1");
  CHECK(parse_rational("-7/3") == Rational(-7, 3));
  CHECK(parse_rational("0/1") == 0);
  for (const char* bad : {"2/4", "1/0", "3", "1/-2", "-0/1", "01/2", "1/02", "a/b", "", "/", "1/", "+1/2", "1 /2"}) {
    CAPTURE(bad);
    CHECK_THROWS_AS(parse_rational(bad), ParseError);
  }
}

TEST_CASE("matrix arithmetic") {
  const std::size_t d = 2;
  const BMatrix x(d, {Rational(1), Rational(2), Rational(3, 2), Rational(-1)});
  CHECK(b_arith(BOp::mul, BMatrix::identity(d), x).matrix == x);
  CHECK(b_arith(BOp::mul, x, BMatrix::identity(d)).matrix == x);
  CHECK(b_arith(BOp::add, x, BMatrix::zero(d)).matrix == x);
  CHECK(b_arith(BOp::mul, BMatrix::unit(d, 0, 1), BMatrix::unit(d, 1, 0)).matrix == BMatrix::unit(d, 0, 0));
  CHECK(b_arith(BOp::scale, x, BMatrix(), Rational(2)).matrix == x + x);
  CHECK(b_arith(BOp::eq, x, x).truth);
  CHECK_FALSE(b_arith(BOp::eq, x, BMatrix::zero(d)).truth);
  CHECK_THROWS_AS(b_arith(BOp::add, x, BMatrix::identity(3)), DimensionError);
  CHECK_THROWS_AS(BMatrix(2, {Rational(1)}), DimensionError);
  CHECK(BMatrix::basis(2, 1) == BMatrix::unit(2, 0, 1));
  CHECK(BMatrix::basis(2, 2) == BMatrix::unit(2, 1, 0));
  // Matrix-unit product rule E_ij E_kl = delta_jk E_il.
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        for (std::size_t l = 0; l < 3; ++l) {
          const BMatrix p = BMatrix::unit(3, i, j) * BMatrix::unit(3, k, l);
          CHECK(p == (j == k ? BMatrix::unit(3, i, l) : BMatrix::zero(3)));
        }
}

TEST_CASE("basis tuple encoding puts the first slot first") {
  CHECK(basis_tuple_count(2, 3) == 64);
  CHECK(basis_tuple_count(2, 0) == 1);
  CHECK(decode_tuple(2, 2, 1) == std::vector<std::size_t>{0, 1});
  CHECK(decode_tuple(2, 2, 4) == std::vector<std::size_t>{1, 0});
  for (std::size_t flat = 0; flat < 64; ++flat) {
    const auto t = decode_tuple(2, 3, flat);
    CHECK(encode_tuple(2, t) == flat);
  }
}

TEST_CASE("applying multilinear maps") {
  const BMatrix c(2, {Rational(1), Rational(0), Rational(5), Rational(7)});
  CHECK(MultilinearMap::constant(c).apply({}) == c);

  MultilinearMap id(1, 1);
  id.at(0, 0) = 1;
  const std::vector<BMatrix> arg{BMatrix::scalar(1, Rational(3, 2))};
  CHECK(id.apply(arg) == BMatrix::scalar(1, Rational(3, 2)));

  // b -> u b v at d = 2.
  const BMatrix u(2, {Rational(1), Rational(2), Rational(0), Rational(-1)});
  const BMatrix v(2, {Rational(3), Rational(0), Rational(1, 2), Rational(1)});
  MultilinearMap sandwich(2, 1);
  for (std::size_t in = 0; in < 4; ++in) sandwich.set_column(in, u * BMatrix::basis(2, in) * v);
  for (std::size_t in = 0; in < 4; ++in) {
    const std::vector<BMatrix> e{BMatrix::basis(2, in)};
    CHECK(sandwich.apply(e) == u * BMatrix::basis(2, in) * v);
  }
  std::mt19937_64 rng(5);
  const BMatrix b = random_matrix(rng, 2);
  const std::vector<BMatrix> bs{b};
  CHECK(sandwich.apply(bs) == u * b * v);

  const std::vector<BMatrix> wrong_dim{BMatrix::identity(3)};
  CHECK_THROWS_AS(sandwich.apply(wrong_dim), DimensionError);
  CHECK_THROWS_AS(sandwich.apply({}), DimensionError);
}

TEST_CASE("multilinearity probes") {
  std::mt19937_64 rng(11);
  for (std::size_t d : {1u, 2u}) {
    for (std::size_t arity = 1; arity <= 3; ++arity) {
      const MultilinearMap m = random_map(rng, d, arity);
      for (int probe = 0; probe < 5; ++probe) {
        std::vector<BMatrix> args;
        for (std::size_t j = 0; j < arity; ++j) args.push_back(random_matrix(rng, d));
        const std::size_t slot = rng() % arity;
        const BMatrix extra = random_matrix(rng, d);
        const Rational t = small(rng);
        auto sum_args = args;
        sum_args[slot] = args[slot] + extra;
        auto extra_args = args;
        extra_args[slot] = extra;
        CHECK(m.apply(sum_args) == m.apply(args) + m.apply(extra_args));
        auto scaled = args;
        scaled[slot] = args[slot] * t;
        CHECK(m.apply(scaled) == m.apply(args) * t);
      }
    }
  }
}

TEST_CASE("dense and sparse forms agree") {
  std::mt19937_64 rng(3);
  for (std::size_t arity = 0; arity <= 3; ++arity) {
    MultilinearMap m = random_map(rng, 2, arity);
    // Thin it out so the sparse form is actually sparse.
    for (std::size_t in = 0; in < m.input_count(); ++in)
      for (std::size_t out = 0; out < 4; ++out)
        if (rng() % 3 != 0) m.at(out, in) = 0;
    const auto entries = m.to_sparse();
    const SparseMultilinearMap sparse(2, arity, entries);
    CHECK(sparse.to_dense() == m);
    CHECK(SparseMultilinearMap(m).to_dense() == m);
    for (std::size_t flat = 0; flat < m.input_count(); ++flat) {
      std::vector<BMatrix> args;
      for (std::size_t b : decode_tuple(2, arity, flat)) args.push_back(BMatrix::basis(2, b));
      CHECK(sparse.apply(args) == m.apply(args));
    }
    std::vector<BMatrix> args;
    for (std::size_t j = 0; j < arity; ++j) args.push_back(random_matrix(rng, 2));
    CHECK(sparse.apply(args) == apply_multilinear(m, args));
  }
  CHECK(MultilinearMap(2, 2).is_zero());
  CHECK(MultilinearMap(2, 2).to_sparse().empty());
}
