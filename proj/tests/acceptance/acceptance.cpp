// One line per acceptance criterion, all checks exact. Exit status is the
// number of failed criteria.

#include "amalgam/diagnostics.hpp"
#include "golden_cases.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace amalgam;
using nc::SetPartition;

namespace {

// Collects failures; the first few are echoed in the summary line.
class Tally {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok) failures_.push_back(what);
  }
  void note(const std::string& s) { notes_.push_back(s); }
  bool pass() const { return failures_.empty(); }
  std::string summary() const {
    std::ostringstream s;
    s << checks_ << " checks";
    if (!failures_.empty()) {
      s << ", " << failures_.size() << " failed:";
      for (std::size_t i = 0; i < failures_.size() && i < 4; ++i) s << " [" << failures_[i] << "]";
      if (failures_.size() > 4) s << " ...";
    }
    for (const auto& n : notes_) s << "; " << n;
    return s.str();
  }

 private:
  std::size_t checks_ = 0;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::function<void(Tally&)> body;
};

std::string tuple_text(const std::optional<IndexTuple>& t) {
  if (!t) return "none";
  std::string s = "(";
  for (std::size_t i = 0; i < t->size(); ++i) s += (i ? "," : "") + std::to_string((*t)[i]);
  return s + ")";
}

BMatrix random_matrix(std::mt19937_64& rng, std::size_t d) {
  BMatrix m(d);
  for (std::size_t i = 0; i < d * d; ++i) {
    Rational r(static_cast<long>(rng() % 7) - 3, static_cast<long>(rng() % 2) + 1);
    r.canonicalize();
    m[i] = r;
  }
  return m;
}

Word random_word(std::mt19937_64& rng, std::size_t d, const IndexTuple& vars) {
  Word w;
  for (int v : vars) w.slots.push_back({random_matrix(rng, d), v});
  w.tail = random_matrix(rng, d);
  return w;
}

// Nonzero map of the given arity with one entry per output row.
MultilinearMap bump(std::mt19937_64& rng, std::size_t d, std::size_t arity) {
  MultilinearMap m(d, arity);
  for (std::size_t out = 0; out < d * d; ++out) m.at(out, rng() % m.input_count()) = Rational(1 + rng() % 3);
  return m;
}

// Same coefficients, larger truncation order.
JointCumulantSpec widen(const JointCumulantSpec& c, std::size_t order) {
  JointCumulantSpec out(c.dim(), c.variables(), order);
  for (const auto& [key, map] : c.entries()) out.set(key, map);
  return out;
}

void lattice_suite(Tally& t) {
  const std::vector<long> catalan{1, 2, 5, 14, 42, 132, 429, 1430};
  for (int n = 1; n <= 8; ++n) {
    const auto list = nc::enumerate_nc(n);
    std::set<std::vector<int>> got;
    for (const auto& p : list) got.insert(p.labels());
    const auto filtered = oracle::block_sizes_ok(n, false);
    const std::set<std::vector<int>> expected(filtered.begin(), filtered.end());
    t.expect(static_cast<long>(list.size()) == catalan[static_cast<std::size_t>(n - 1)],
             "|NC(" + std::to_string(n) + ")|");
    t.expect(got == expected, "NC(" + std::to_string(n) + ") vs filter oracle");
  }
  for (int n = 1; n <= 6; ++n) {
    const auto list = nc::enumerate_nc(n);
    std::set<SetPartition> image;
    for (const auto& p : list) {
      const SetPartition k = nc::kreweras(p);
      image.insert(k);
      t.expect(k.labels() == oracle::kreweras_brute(p.labels()), "Kr" + p.to_string() + " vs brute force");
    }
    t.expect(image.size() == list.size(), "Kr bijective on NC(" + std::to_string(n) + ")");
    Rational expected = oracle::catalan(n - 1);
    if (n % 2 == 0) expected = -expected;
    t.expect(nc::mobius_nc(SetPartition::singletons(n), SetPartition::full(n)) == expected,
             "mu(0_" + std::to_string(n) + ", 1_" + std::to_string(n) + ")");
  }
  const std::vector<std::size_t> even_counts{1, 3, 12};
  for (int k = 1; k <= 3; ++k) {
    const auto even = nc::enumerate_nc_even(2 * k);
    t.expect(even.size() == even_counts[static_cast<std::size_t>(k - 1)] &&
                 oracle::block_sizes_ok(2 * k, true).size() == even.size(),
             "|NC_even(" + std::to_string(2 * k) + ")|");
  }
}

void transform_suite(Tally& t) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t s = 1 + seed % 2;
    const auto c = random_spec(seed, 2, s, 5);
    const auto m = random_moment_spec(seed, 2, s, 5);
    const std::string tag = "seed " + std::to_string(seed);
    t.expect(cumulants_from_moments(moments_from_cumulants(c)) == c, tag + " cumulants round trip");
    t.expect(moments_from_cumulants(cumulants_from_moments(m)) == m, tag + " moments round trip");
    // zeta and Moebius act on single-variable series.
    const auto f = random_spec(seed + 1000, 2, 1, 5);
    t.expect(mobius_transform(zeta_transform(f)) == f, tag + " mob(zeta f)");
    t.expect(zeta_transform(mobius_transform(f)) == f, tag + " zeta(mob f)");
  }
}

void scalar_regression(Tally& t) {
  JointCumulantSpec semi(1, 1, 6);
  MultilinearMap one(1, 1);
  one.at(0, 0) = 1;
  semi.set({1, 1}, one);
  const auto m = moments_from_cumulants(semi);
  const std::vector<long> expected{1, 2, 5};
  for (std::size_t k = 1; k <= 3; ++k) {
    t.expect(m.coefficient(IndexTuple(2 * k, 1)).column(0) == BMatrix::scalar(1, expected[k - 1]),
             "m_" + std::to_string(2 * k));
  }
}

void contraction_orders(Tally& t) {
  std::mt19937_64 rng(2024);
  for (std::uint64_t family = 0; family < 5; ++family) {
    const auto c = random_spec(family, 2, 2, 6);
    for (const auto& p : nc::enumerate_nc(4)) {
      IndexTuple vars(4);
      for (int& v : vars) v = static_cast<int>(1 + rng() % 2);
      const Word w = random_word(rng, 2, vars);
      const BMatrix expected = eval_partitioned(c, p, w);
      for (const BMatrix& v : oracle::all_contraction_values(c, p, w)) {
        t.expect(v == expected, "family " + std::to_string(family) + " " + p.to_string());
      }
    }
    // Spot checks at n = 6 with random choices.
    const auto six = nc::enumerate_nc(6);
    for (int trial = 0; trial < 20; ++trial) {
      const SetPartition& p = six[rng() % six.size()];
      IndexTuple vars(6);
      for (int& v : vars) v = static_cast<int>(1 + rng() % 2);
      const Word w = random_word(rng, 2, vars);
      const BMatrix expected = eval_partitioned(c, p, w);
      auto chooser = [&](std::span<const std::size_t> candidates) { return rng() % candidates.size(); };
      t.expect(eval_partitioned(c, p, w, chooser) == expected,
               "family " + std::to_string(family) + " random order " + p.to_string());
    }
  }
}

void additivity_suite(Tally& t) {
  for (std::size_t d : {1u, 2u}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto x = random_spec(seed, d, 1, 4);
      const auto y = random_spec(seed + 500, d, 1, 4);
      const auto u = free_union(x, y);
      const auto direct = add_free_variables(u, {{1, 2}});
      const auto via_moments = cumulants_from_moments(oracle::expanded_sum_moments(u, {{1, 2}}, 4));
      JointCumulantSpec sum(d, 1, 4);
      for (std::size_t n = 1; n <= 4; ++n) {
        const IndexTuple key(n, 1);
        MultilinearMap total = x.coefficient(key);
        const MultilinearMap& other = y.coefficient(key);
        for (std::size_t in = 0; in < total.input_count(); ++in)
          total.set_column(in, total.column(in) + other.column(in));
        sum.set(key, total);
      }
      const std::string tag = "d=" + std::to_string(d) + " seed " + std::to_string(seed);
      t.expect(via_moments == direct, tag + " dual route");
      t.expect(direct == sum, tag + " R_x + R_y");
    }
  }
  // Boxed convolution against the cumulants of the product word.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto fx = random_spec(seed + 20, 2, 1, 4);
    const auto gy = random_spec(seed + 40, 2, 1, 4);
    const auto boxed = boxed_convolution(fx, gy, BoxedArgs::trivial(), 4);
    const auto product = product_word_cumulants(free_union(widen(fx, 8), widen(gy, 8)), {{1, 2}}, 4);
    for (std::size_t n = 1; n <= 4; ++n) {
      const IndexTuple key(n, 1);
      t.expect(boxed.coefficient(key) == product.coefficient(key),
               "seed " + std::to_string(seed) + " boxed vs product at order " + std::to_string(n));
    }
  }
}

void evenness_suite(Tally& t) {
  const std::size_t d = 2;
  std::mt19937_64 rng(77);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::string tag = "seed " + std::to_string(seed);
    const auto even = random_even_spec(seed, d, 6);
    const auto m = moments_from_cumulants(even);
    t.expect(is_b_even(even, 1, 6).pass && is_b_even(m, 1, 6).pass, tag + " even cumulants give even moments");
    t.expect(is_b_even(cumulants_from_moments(m), 1, 6).pass, tag + " even moments give even cumulants");
    for (std::size_t odd : {1u, 3u, 5u}) {
      JointCumulantSpec bumped = even;
      bumped.set(IndexTuple(odd, 1), bump(rng, d, odd - 1));
      const Verdict vm = is_b_even(moments_from_cumulants(bumped), 1, 6);
      t.expect(!vm.pass, tag + " odd cumulant " + std::to_string(odd) + " leaks into moments");
      JointMomentSpec moved = m;
      moved.set(IndexTuple(odd, 1), bump(rng, d, odd - 1));
      const Verdict vc = is_b_even(cumulants_from_moments(moved), 1, 6);
      t.expect(!vc.pass, tag + " odd moment " + std::to_string(odd) + " leaks into cumulants");
    }
    for (std::size_t k = 1; k <= 3; ++k) {
      t.expect(check_even_moment_formula(even, 1, k).pass, tag + " even-partition sum at " + std::to_string(2 * k));
    }
    const auto other = random_even_spec(seed + 100, d, 6);
    t.expect(is_b_even(add_free_variables(free_union(even, other), {{1, 2}}), 1, 6).pass, tag + " free sum even");
    t.expect(is_b_even(left_scale(random_matrix(rng, d), even, 1), 1, 6).pass, tag + " left_scale even");
  }
}

void product_pair_suite(Tally& t) {
  std::size_t rdiag_runs = 0;
  std::vector<std::string> recon_failures;
  auto harness = [&](std::uint64_t seed, std::size_t order) {
    const auto rep = verify_even_product_pair(seed, 2, order);
    const std::string tag = "N_pair=" + std::to_string(order) + " seed " + std::to_string(seed);
    t.expect(rep.mean_vanishes.pass, tag + " phi(aa') = 0 = phi(a'a)");
    t.expect(rep.sum_even.pass, tag + " a + a' even");
    t.expect(rep.r_diagonal.pass, tag + " (aa', a'a) R-diagonal");
    t.expect(rep.r_diagonal_swapped.pass, tag + " (a'a, aa') R-diagonal");
    if (rep.r_diagonal.pass && rep.r_diagonal_swapped.pass) {
      ++rdiag_runs;
      if (!rep.determining_series.pass) {
        recon_failures.push_back(tag + " witness " + tuple_text(rep.determining_series.witness_tuple));
      }
    }
  };
  for (std::uint64_t seed = 0; seed < 20; ++seed) harness(seed, 3);
  for (std::uint64_t seed = 0; seed < 3; ++seed) harness(seed, 4);
  t.expect(recon_failures.empty(), "determining-series reconstruction on R-diagonal pairs: " +
                                       std::to_string(recon_failures.size()) + " of " + std::to_string(rdiag_runs) +
                                       " fail" + (recon_failures.empty() ? "" : ", first " + recon_failures.front()));

  // Negative controls.
  const std::size_t d = 2;
  EvenProductOptions control;
  control.inject_mean = BMatrix::identity(d);
  const auto injected = verify_even_product_pair(0, d, 3, control);
  t.expect(!injected.sum_even.pass && injected.sum_even.witness_tuple == IndexTuple{1}, "injected mean: sum witness");
  t.expect(!injected.r_diagonal.pass && injected.r_diagonal.witness_tuple == IndexTuple{1, 1},
           "injected mean: R-diagonal witness");

  JointCumulantSpec odd = random_even_spec(3, d, 4);
  MultilinearMap k3(d, 2);
  k3.at(1, 9) = Rational(1, 2);
  odd.set({1, 1, 1}, k3);
  const Verdict odd_verdict = is_b_even(odd, 1, 4);
  t.expect(!odd_verdict.pass && odd_verdict.witness_tuple == IndexTuple{1, 1, 1} && odd_verdict.residual == BMatrix::unit(d, 0, 1) * Rational(1, 2),
           "injected odd cumulant: witness (1,1,1)");

  JointCumulantSpec pure(d, 2, 4);
  MultilinearMap one(d, 1);
  one.at(0, 0) = 1;
  pure.set({1, 2}, one);
  pure.set({2, 2}, one);
  const Verdict pure_verdict = is_r_diagonal(pure, 4);
  t.expect(!pure_verdict.pass && pure_verdict.witness_tuple == IndexTuple{2, 2}, "pure cumulant: witness (2,2)");

  JointCumulantSpec non_alt(d, 2, 4);
  non_alt.set({1, 2}, one);
  MultilinearMap three(d, 3);
  three.at(3, 0) = -1;
  non_alt.set({1, 2, 2, 1}, three);
  const Verdict non_alt_verdict = is_r_diagonal(non_alt, 4);
  t.expect(!non_alt_verdict.pass && non_alt_verdict.witness_tuple == IndexTuple{1, 2, 2, 1} &&
               non_alt_verdict.residual == BMatrix::unit(d, 1, 1) * Rational(-1),
           "non-alternating cumulant: witness (1,2,2,1)");
}

void cli_suite(Tally& t) {
  const std::filesystem::path data = AMALGAM_TEST_DATA_DIR;
  const std::filesystem::path golden_dir = AMALGAM_GOLDEN_DIR;
  golden::DataDir here(data);
  std::set<std::string> commands;
  std::set<int> codes;
  for (const auto& c : golden::cases()) {
    const std::string problem = golden::check(c, golden_dir);
    t.expect(problem.empty(), c.name + ": " + problem);
    if (problem.empty()) {
      codes.insert(c.exit_code);
      if (c.has_golden) commands.insert(c.args.front());
    }
  }
  const std::set<std::string> all{"nc", "moments", "cumulants", "check-even", "check-trace",
                                  "check-rdiag", "det-series", "boxconv", "verify-thm27"};
  t.expect(commands == all, "golden coverage of every subcommand");
  t.expect(codes == std::set<int>{0, 1, 2}, "exit codes 0, 1 and 2 exercised");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "lattice suite", 10, lattice_suite},
      {2, "transform round trips", 60, transform_suite},
      {3, "scalar semicircular regression", 1, scalar_regression},
      {4, "contraction-order independence", 30, contraction_orders},
      {5, "free additivity and boxed convolution", 180, additivity_suite},
      {6, "evenness", 120, evenness_suite},
      {7, "even products and R-diagonality", 600, product_pair_suite},
      {8, "CLI golden files and exit codes", 30, cli_suite},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Tally t;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(t);
    } catch (const std::exception& e) {
      t.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    t.expect(seconds < c.limit_seconds, "runtime above " + std::to_string(static_cast<int>(c.limit_seconds)) + " s");
    if (!t.pass()) ++failed;
    std::printf("criterion %d %s: %s (%.2f s) %s\n", c.id, c.title.c_str(), t.pass() ? "PASS" : "FAIL", seconds,
                t.summary().c_str());
    std::fflush(stdout);
  }
  return failed;
}
