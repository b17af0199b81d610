#include "amalgam/diagnostics.hpp"
#include "amalgam/errors.hpp"

#include <doctest.h>

#include <set>

using namespace amalgam;

namespace {

MultilinearMap scalar_map(std::size_t arity, const Rational& v) {
  MultilinearMap m(1, arity);
  m.at(0, 0) = v;
  return m;
}

bool odd_moments_zero(const JointMomentSpec& m, int var) {
  for (std::size_t n = 1; n <= m.truncation(); n += 2) {
    if (!m.is_zero_at(IndexTuple(n, var))) return false;
  }
  return true;
}

bool odd_cumulants_zero(const JointCumulantSpec& c, int var) {
  for (std::size_t n = 1; n <= c.truncation(); n += 2) {
    if (!c.is_zero_at(IndexTuple(n, var))) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("evenness: examples") {
  const std::size_t d = 2;
  CHECK(is_b_even(JointCumulantSpec(d, 1, 4), 1, 4).pass);
  JointCumulantSpec mean(d, 2, 3);
  mean.set({2}, MultilinearMap::constant(BMatrix::identity(d)));
  CHECK(is_b_even(mean, 1, 3).pass);
  const Verdict v = is_b_even(mean, 2, 3);
  CHECK_FALSE(v.pass);
  CHECK(v.witness_tuple == IndexTuple{2});
  CHECK(v.witness_args->empty());
  CHECK(v.residual == BMatrix::identity(d));
  CHECK_THROWS_AS(is_b_even(mean, 3, 3), ArgumentError);
  CHECK_THROWS_AS(is_b_even(mean, 0, 3), ArgumentError);
  CHECK_THROWS_AS(is_b_even(mean, 1, 4), TruncationError);
}

TEST_CASE("evenness: odd cumulants vanish iff odd moments vanish") {
  const std::size_t d = 2;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto even = random_even_spec(seed, d, 6);
    CHECK(is_b_even(even, 1, 6).pass);
    const auto m = moments_from_cumulants(even);
    CHECK(odd_moments_zero(m, 1));
    CHECK(is_b_even(m, 1, 6).pass);
    CHECK(cumulants_from_moments(m) == even);

    // One odd order perturbed on either side breaks the other side too.
    for (std::size_t odd : {1u, 3u, 5u}) {
      JointCumulantSpec bumped = even;
      MultilinearMap extra(d, odd - 1);
      extra.at(3, extra.input_count() - 1) = 1;
      bumped.set(IndexTuple(odd, 1), extra);
      CHECK_FALSE(odd_moments_zero(moments_from_cumulants(bumped), 1));
      const Verdict v = is_b_even(moments_from_cumulants(bumped), 1, 6);
      CHECK_FALSE(v.pass);
      CHECK(v.witness_tuple->size() == odd);

      JointMomentSpec moved = m;
      moved.set(IndexTuple(odd, 1), extra);
      CHECK_FALSE(odd_cumulants_zero(cumulants_from_moments(moved), 1));
    }
  }
}

TEST_CASE("even-partition lattice sums") {
  const std::size_t d = 2;
  for (std::uint64_t seed = 0; seed < 2; ++seed) {
    const auto even = random_even_spec(seed + 10, d, 6);
    for (std::size_t k = 1; k <= 3; ++k) CHECK(check_even_moment_formula(even, 1, k).pass);
  }
  // k = 1: phi(a b a) = k_2(b).
  const auto even = random_even_spec(3, d, 2);
  CHECK(moments_from_cumulants(even).coefficient({1, 1}) == even.coefficient({1, 1}));

  JointCumulantSpec semi(1, 1, 4);
  semi.set({1, 1}, scalar_map(1, 1));
  CHECK(check_even_moment_formula(semi, 1, 2).pass);

  JointCumulantSpec odd = semi;
  odd.set({1, 1, 1}, scalar_map(2, 1));
  CHECK_THROWS_AS(check_even_moment_formula(odd, 1, 2), PreconditionError);
  CHECK_THROWS_AS(check_even_moment_formula(semi, 1, 3), TruncationError);
}

TEST_CASE("B-trace check") {
  // Scalar single-variable moments are trivially tracial.
  JointMomentSpec m(1, 1, 2);
  m.set({1}, scalar_map(0, 2));
  m.set({1, 1}, scalar_map(1, 5));
  CHECK(check_b_trace(m, 2).pass);

  JointMomentSpec asym(1, 2, 2);
  asym.set({1, 2}, scalar_map(1, 1));
  asym.set({2, 1}, scalar_map(1, 2));
  const Verdict v = check_b_trace(asym, 2);
  CHECK_FALSE(v.pass);
  CHECK(v.witness_tuple == IndexTuple{1, 2});
  CHECK(v.residual == BMatrix::scalar(1, -1));

  // Free products of traces are traces.
  const auto u = free_union(random_spec(1, 1, 1, 4), random_spec(2, 1, 1, 4));
  CHECK(check_b_trace(moments_from_cumulants(u), 4).pass);
}

TEST_CASE("R-diagonal support") {
  const std::size_t d = 2;
  CHECK(is_r_diagonal(JointCumulantSpec(d, 2, 4), 4).pass);
  JointCumulantSpec pure(d, 2, 4);
  MultilinearMap one(d, 1);
  one.at(0, 0) = 1;
  pure.set({1, 1}, one);
  const Verdict v = is_r_diagonal(pure, 4);
  CHECK_FALSE(v.pass);
  CHECK(v.witness_tuple == IndexTuple{1, 1});
  CHECK(v.witness_args->size() == 1);

  JointCumulantSpec alternating(d, 2, 4);
  alternating.set({1, 2}, one);
  alternating.set({2, 1, 2, 1}, MultilinearMap(d, 3));
  CHECK(is_r_diagonal(alternating, 4).pass);
  MultilinearMap three(d, 2);
  three.at(1, 5) = Rational(1, 2);
  alternating.set({1, 2, 1}, three);
  const Verdict odd = is_r_diagonal(alternating, 4);
  CHECK_FALSE(odd.pass);
  CHECK(odd.witness_tuple == IndexTuple{1, 2, 1});
  CHECK(*odd.witness_args == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 1}});
  CHECK_THROWS_AS(is_r_diagonal(random_spec(1, d, 1, 2), 2), ArgumentError);
}

TEST_CASE("determining series: small cases") {
  const auto zero = determining_series(JointCumulantSpec(2, 2, 4), 2);
  CHECK(zero.reconstruction.pass);
  CHECK(zero.f.entries().empty());
  CHECK(zero.g.entries().empty());

  JointCumulantSpec pair(1, 2, 4);
  pair.set({1, 2}, scalar_map(1, 1));
  pair.set({2, 1}, scalar_map(1, 1));
  const auto ds = determining_series(pair, 2);
  CHECK(ds.f.coefficient({1}).column(0) == BMatrix::identity(1));
  CHECK(ds.g.coefficient({1}).column(0) == BMatrix::identity(1));
  CHECK(ds.f.is_zero_at({1, 1}));
  CHECK(ds.reconstruction.pass);

  JointCumulantSpec bad = pair;
  bad.set({2, 2}, scalar_map(1, 1));
  CHECK_THROWS_AS(determining_series(bad, 2), PreconditionError);
}

TEST_CASE("determining series: the order-2 residual has a closed form") {
  // For the pair (a a', a' a) the Moebius transform of R_xy differs from the
  // restricted f_2 by f_1(g_1(b)) - f_1(1) b f_1(1), with f_1(c) = k_2(x, c y)
  // and g_1(c) = k_2(y, c x).
  const std::size_t d = 2;
  const auto a = random_even_spec(0, d, 8);
  const auto a_prime = random_even_spec(1, d, 8);
  const auto pair = product_word_cumulants(free_union(a, a_prime), {{1, 2}, {2, 1}}, 4);
  REQUIRE(is_r_diagonal(pair, 4).pass);
  const auto ds = determining_series(pair, 2);
  const auto mob = mobius_transform(product_word_cumulants(pair, {{1, 2}}, 2));
  const MultilinearMap f1 = pair.coefficient({1, 2});
  const MultilinearMap g1 = pair.coefficient({2, 1});
  const BMatrix one = BMatrix::identity(d);
  const std::vector<BMatrix> at_one{one};
  const BMatrix f1_one = f1.apply(at_one);
  bool any_nonzero = false;
  for (std::size_t b = 0; b < d * d; ++b) {
    const std::vector<BMatrix> eb{BMatrix::basis(d, b)};
    const std::vector<BMatrix> inner{g1.apply(eb)};
    const BMatrix expected = f1.apply(inner) - f1_one * BMatrix::basis(d, b) * f1_one;
    CHECK(mob.coefficient({1, 1}).column(b) - ds.f.coefficient({1, 1}).column(b) == expected);
    any_nonzero = any_nonzero || !expected.is_zero();
  }
  CHECK(mob.coefficient({1}) == ds.f.coefficient({1}));
  CHECK(any_nonzero);
  CHECK_FALSE(ds.reconstruction.pass);
  CHECK(ds.reconstruction.witness_tuple == IndexTuple{1, 1});
}

TEST_CASE("random generators") {
  const auto a = random_even_spec(7, 2, 4);
  CHECK(a == random_even_spec(7, 2, 4));
  std::set<std::vector<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = random_even_spec(seed, 2, 4);
    std::vector<std::string> flat;
    for (const auto& [key, map] : s.entries()) {
      CHECK(key.size() % 2 == 0);
      for (std::size_t in = 0; in < map.input_count(); ++in)
        for (std::size_t out = 0; out < 4; ++out) {
          const Rational& r = map.at(out, in);
          CHECK(abs(r.get_num()) <= 3);
          CHECK((r.get_den() == 1 || r.get_den() == 2));
          flat.push_back(to_string(r));
        }
    }
    seen.insert(flat);
  }
  CHECK(seen.size() == 20);
  const auto general = random_spec(1, 2, 2, 3);
  CHECK_FALSE(general.is_zero_at({1}));
  CHECK_FALSE(general.is_zero_at({2, 1, 2}));
}

TEST_CASE("even product harness") {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto rep = verify_even_product_pair(seed, 2, 3);
    CHECK(rep.mean_vanishes.pass);
    CHECK(rep.sum_even.pass);
    CHECK(rep.r_diagonal.pass);
    CHECK(rep.r_diagonal_swapped.pass);
    CHECK(rep.determining_series.pass);
    CHECK(rep.pass());
  }
  CHECK(verify_even_product_pair(4, 1, 3).pass());

  EvenProductOptions control;
  control.inject_mean = BMatrix::identity(2);
  const auto bad = verify_even_product_pair(0, 2, 3, control);
  CHECK_FALSE(bad.pass());
  CHECK(bad.mean_vanishes.pass);
  CHECK(bad.sum_even.witness_tuple == IndexTuple{1});
  CHECK_FALSE(bad.r_diagonal.pass);
  CHECK(bad.r_diagonal.witness_tuple == IndexTuple{1, 1});
  CHECK_FALSE(bad.determining_series.pass);
  CHECK_THROWS_AS(verify_even_product_pair(0, 2, 0), ArgumentError);
}
