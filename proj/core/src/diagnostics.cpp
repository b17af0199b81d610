#include "amalgam/diagnostics.hpp"

#include "amalgam/errors.hpp"

#include <random>

namespace amalgam {

Verdict Verdict::failure(IndexTuple tuple, std::vector<std::size_t> basis, std::size_t d, BMatrix residual,
                         std::vector<std::size_t> orders, std::string detail) {
  Verdict v;
  v.pass = false;
  v.witness_tuple = std::move(tuple);
  std::vector<std::pair<std::size_t, std::size_t>> args;
  for (std::size_t b : basis) args.emplace_back(b / d, b % d);
  v.witness_args = std::move(args);
  v.residual = std::move(residual);
  v.checked_orders = std::move(orders);
  v.detail = std::move(detail);
  return v;
}

namespace {

void require_var(const SeriesTable& t, int var) {
  if (var < 1 || static_cast<std::size_t>(var) > t.variables()) {
    throw ArgumentError("variable index " + std::to_string(var) + " outside 1.." + std::to_string(t.variables()));
  }
}

void require_order(const SeriesTable& t, std::size_t order) {
  if (order > t.truncation()) {
    throw TruncationError("check up to order " + std::to_string(order) + " exceeds truncation order " +
                          std::to_string(t.truncation()));
  }
}

// First nonzero column of a map, in flat basis order.
std::optional<std::pair<std::size_t, BMatrix>> first_nonzero(const MultilinearMap& m) {
  for (std::size_t flat = 0; flat < m.input_count(); ++flat) {
    BMatrix col = m.column(flat);
    if (!col.is_zero()) return std::pair{flat, std::move(col)};
  }
  return std::nullopt;
}

std::optional<Verdict> nonzero_witness(const SeriesTable& t, const IndexTuple& key, const std::vector<std::size_t>& orders,
                                       std::string detail = {}) {
  const auto* m = t.find(key);
  if (m == nullptr) return std::nullopt;
  auto hit = first_nonzero(*m);
  if (!hit) return std::nullopt;
  return Verdict::failure(key, decode_tuple(t.dim(), m->arity(), hit->first), t.dim(), std::move(hit->second), orders,
                          std::move(detail));
}

Verdict odd_orders_vanish(const SeriesTable& t, int var, std::size_t order) {
  require_var(t, var);
  require_order(t, order);
  std::vector<std::size_t> orders;
  for (std::size_t n = 1; n <= order; n += 2) {
    orders.push_back(n);
    if (auto w = nonzero_witness(t, IndexTuple(n, var), orders)) return *w;
  }
  Verdict v;
  v.checked_orders = std::move(orders);
  return v;
}

// Odd pure moments of `var` computed on the fly from cumulants.
Verdict odd_moments_vanish(const JointCumulantSpec& c, int var, std::size_t order) {
  const std::size_t d = c.dim();
  std::vector<std::size_t> orders;
  for (std::size_t n = 1; n <= order; n += 2) {
    orders.push_back(n);
    const IndexTuple vars(n, var);
    const auto bound = detail::bind_surviving(c, vars);
    if (bound.empty()) continue;
    detail::PlanEvaluator eval(d);
    for (std::size_t flat = 0; flat < basis_tuple_count(d, n - 1); ++flat) {
      const auto basis = decode_tuple(d, n - 1, flat);
      const Word w = Word::basis_word(d, vars, basis);
      BMatrix total(d);
      for (const auto& b : bound) total += eval(b, w);
      if (!total.is_zero()) return Verdict::failure(vars, basis, d, std::move(total), orders, "odd moment");
    }
  }
  Verdict v;
  v.checked_orders = std::move(orders);
  return v;
}

JointCumulantSpec restrict_to(const JointCumulantSpec& u, int var, std::size_t order) {
  JointCumulantSpec out(u.dim(), 1, order);
  for (std::size_t n = 1; n <= order; ++n) {
    if (const auto* m = u.find(IndexTuple(n, var))) out.set(IndexTuple(n, 1), *m);
  }
  return out;
}

bool alternating(const IndexTuple& t) {
  if (t.size() % 2 != 0) return false;
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (t[i] == t[i - 1]) return false;
  }
  return true;
}

std::string tuple_text(const IndexTuple& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "," : "") + std::to_string(t[i]);
  return out + ")";
}

}  // namespace

Verdict is_b_even(const JointCumulantSpec& u, int var, std::size_t order) { return odd_orders_vanish(u, var, order); }

Verdict is_b_even(const JointMomentSpec& m, int var, std::size_t order) { return odd_orders_vanish(m, var, order); }

Verdict check_even_moment_formula(const JointCumulantSpec& u, int var, std::size_t k) {
  require_var(u, var);
  if (k == 0) throw ArgumentError("even moment formula needs k >= 1");
  const std::size_t n = 2 * k;
  require_order(u, n);
  if (!is_b_even(u, var, n).pass) {
    throw PreconditionError("variable " + std::to_string(var) + " is not even up to order " + std::to_string(n));
  }
  const std::size_t d = u.dim();
  const JointCumulantSpec c = restrict_to(u, var, n);
  const JointMomentSpec m = moments_from_cumulants(c);
  const int ni = static_cast<int>(n);
  const auto& lattice = nc::NcLattice::get(ni, std::max(ni, nc::kDefaultMaxN));
  const auto& plans = detail::lattice_plans(ni);
  const auto& mu = lattice.mobius_to_top();
  std::vector<char> even(lattice.elements().size());
  for (std::size_t i = 0; i < even.size(); ++i) even[i] = !nc::has_odd_block(lattice.elements()[i]);

  const IndexTuple vars(n, 1);
  const std::vector<std::size_t> orders{n};
  for (std::size_t flat = 0; flat < basis_tuple_count(d, n - 1); ++flat) {
    const auto basis = decode_tuple(d, n - 1, flat);
    const Word w = Word::basis_word(d, vars, basis);
    BMatrix moment_full(d), moment_even(d), cumulant_full(d), cumulant_even(d);
    for (std::size_t i = 0; i < plans.size(); ++i) {
      const BMatrix from_c = detail::eval_plan(c, plans[i], w);
      const BMatrix from_m = detail::eval_plan(m, plans[i], w) * mu[i];
      moment_full += from_c;
      cumulant_full += from_m;
      if (even[i]) {
        moment_even += from_c;
        cumulant_even += from_m;
      }
    }
    if (moment_full != moment_even) {
      return Verdict::failure(IndexTuple(n, var), basis, d, moment_full - moment_even, orders, "moment form");
    }
    if (cumulant_full != cumulant_even) {
      return Verdict::failure(IndexTuple(n, var), basis, d, cumulant_full - cumulant_even, orders, "cumulant form");
    }
  }
  Verdict v;
  v.checked_orders = orders;
  return v;
}

Verdict check_b_trace(const JointMomentSpec& m, std::size_t order) {
  require_order(m, order);
  const std::size_t d = m.dim();
  std::vector<std::size_t> orders;
  for (std::size_t n = 1; n <= order; ++n) {
    orders.push_back(n);
    if (n == 1) continue;  // a one-letter rotation is the identity
    for (const auto& t : m.tuples(n)) {
      IndexTuple rotated{t.back()};
      rotated.insert(rotated.end(), t.begin(), t.end() - 1);
      const MultilinearMap lhs = m.coefficient(t);
      const MultilinearMap rhs_map = m.coefficient(rotated);
      for (std::size_t flat = 0; flat < lhs.input_count(); ++flat) {
        const auto basis = decode_tuple(d, n - 1, flat);
        std::vector<BMatrix> args{BMatrix::identity(d)};
        for (std::size_t j = 0; j + 1 < basis.size(); ++j) args.push_back(BMatrix::basis(d, basis[j]));
        const BMatrix rhs = BMatrix::basis(d, basis.back()) * apply_unchecked(rhs_map, args);
        const BMatrix value = lhs.column(flat);
        if (value != rhs) return Verdict::failure(t, basis, d, value - rhs, orders, "cyclic rotation");
      }
    }
  }
  Verdict v;
  v.checked_orders = std::move(orders);
  return v;
}

Verdict is_r_diagonal(const JointCumulantSpec& u, std::size_t order) {
  if (u.variables() != 2) {
    throw ArgumentError("R-diagonality is a property of pairs; spec has " + std::to_string(u.variables()) +
                        " variables");
  }
  require_order(u, order);
  std::vector<std::size_t> orders;
  for (std::size_t n = 1; n <= order; ++n) {
    orders.push_back(n);
    for (const auto& t : u.tuples(n)) {
      if (alternating(t)) continue;
      if (auto w = nonzero_witness(u, t, orders, "coefficient outside the alternating support")) return *w;
    }
  }
  Verdict v;
  v.checked_orders = std::move(orders);
  return v;
}

namespace {

IndexTuple alternating_tuple(std::size_t pairs, int first) {
  IndexTuple t;
  for (std::size_t i = 0; i < pairs; ++i) {
    t.push_back(first);
    t.push_back(3 - first);
  }
  return t;
}

// Inserts 1_B inside each pair and the series arguments between pairs.
MultilinearMap restrict_to_pairs(const MultilinearMap& full, std::size_t pairs) {
  const std::size_t d = full.dim();
  MultilinearMap out(d, pairs - 1);
  for (std::size_t flat = 0; flat < out.input_count(); ++flat) {
    const auto basis = decode_tuple(d, pairs - 1, flat);
    std::vector<BMatrix> args{BMatrix::identity(d)};
    for (std::size_t b : basis) {
      args.push_back(BMatrix::basis(d, b));
      args.push_back(BMatrix::identity(d));
    }
    out.set_column(flat, apply_unchecked(full, args));
  }
  return out;
}

std::optional<Verdict> compare_series(const JointCumulantSpec& expected, const JointCumulantSpec& actual,
                                      const std::string& label) {
  const std::size_t d = expected.dim();
  std::vector<std::size_t> orders;
  for (std::size_t n = 1; n <= expected.truncation(); ++n) {
    orders.push_back(n);
    const IndexTuple key(n, 1);
    const MultilinearMap a = expected.coefficient(key);
    const MultilinearMap b = actual.coefficient(key);
    for (std::size_t flat = 0; flat < a.input_count(); ++flat) {
      BMatrix diff = a.column(flat) - b.column(flat);
      if (!diff.is_zero()) {
        return Verdict::failure(key, decode_tuple(d, n - 1, flat), d, std::move(diff), orders,
                                "Moebius transform of " + label + " differs from the determining series");
      }
    }
  }
  return std::nullopt;
}

}  // namespace

DeterminingSeries determining_series(const JointCumulantSpec& u, std::size_t order) {
  const Verdict support = is_r_diagonal(u, 2 * order);
  if (!support.pass) {
    throw PreconditionError("pair is not R-diagonal up to order " + std::to_string(2 * order) +
                            ": nonzero coefficient at " + tuple_text(*support.witness_tuple));
  }
  const std::size_t d = u.dim();
  DeterminingSeries out{{}, {}, JointCumulantSpec(d, 1, order), JointCumulantSpec(d, 1, order), {}};
  for (std::size_t n = 1; n <= order; ++n) {
    out.f_full.push_back(u.coefficient(alternating_tuple(n, 1)));
    out.g_full.push_back(u.coefficient(alternating_tuple(n, 2)));
    out.f.set(IndexTuple(n, 1), restrict_to_pairs(out.f_full.back(), n));
    out.g.set(IndexTuple(n, 1), restrict_to_pairs(out.g_full.back(), n));
  }
  std::vector<std::size_t> orders;
  for (std::size_t n = 1; n <= order; ++n) orders.push_back(n);
  out.reconstruction.checked_orders = orders;
  if (order == 0) return out;
  const JointCumulantSpec from_xy = mobius_transform(product_word_cumulants(u, {{1, 2}}, order));
  if (auto bad = compare_series(out.f, from_xy, "R_xy")) {
    out.reconstruction = *bad;
    return out;
  }
  const JointCumulantSpec from_yx = mobius_transform(product_word_cumulants(u, {{2, 1}}, order));
  if (auto bad = compare_series(out.g, from_yx, "R_yx")) out.reconstruction = *bad;
  return out;
}

namespace {

class EntryDraw {
 public:
  EntryDraw(std::uint64_t seed, const RandomOptions& options) : engine_(seed), max_(options.max_numerator) {
    if (max_ < 0) throw ArgumentError("max_numerator must be nonnegative");
  }

  Rational next() {
    const std::uint64_t draw = engine_();
    const auto width = static_cast<std::uint64_t>(2 * max_ + 1);
    const long num = static_cast<long>(draw % width) - max_;
    const long den = 1 + static_cast<long>((draw / width) % 2);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

 private:
  std::mt19937_64 engine_;
  int max_;
};

MultilinearMap random_map(EntryDraw& draw, std::size_t d, std::size_t arity) {
  MultilinearMap m(d, arity);
  for (std::size_t in = 0; in < m.input_count(); ++in) {
    for (std::size_t out = 0; out < d * d; ++out) m.at(out, in) = draw.next();
  }
  return m;
}

template <class Spec>
Spec random_table(std::uint64_t seed, std::size_t d, std::size_t s, std::size_t order, const RandomOptions& options,
                  bool even_only) {
  EntryDraw draw(seed, options);
  Spec out(d, s, order);
  for (std::size_t n = 1; n <= order; ++n) {
    if (even_only && n % 2 == 1) continue;
    for (const auto& key : out.tuples(n)) out.set(key, random_map(draw, d, n - 1));
  }
  return out;
}

}  // namespace

JointCumulantSpec random_even_spec(std::uint64_t seed, std::size_t d, std::size_t order, const RandomOptions& options) {
  return random_table<JointCumulantSpec>(seed, d, 1, order, options, true);
}

JointCumulantSpec random_spec(std::uint64_t seed, std::size_t d, std::size_t s, std::size_t order,
                              const RandomOptions& options) {
  return random_table<JointCumulantSpec>(seed, d, s, order, options, false);
}

JointMomentSpec random_moment_spec(std::uint64_t seed, std::size_t d, std::size_t s, std::size_t order,
                                   const RandomOptions& options) {
  return random_table<JointMomentSpec>(seed, d, s, order, options, false);
}

bool EvenProductReport::pass() const {
  return mean_vanishes.pass && sum_even.pass && r_diagonal.pass && r_diagonal_swapped.pass && determining_series.pass;
}

namespace {

JointCumulantSpec swap_pair(const JointCumulantSpec& u) {
  JointCumulantSpec out(u.dim(), 2, u.truncation());
  for (const auto& [key, map] : u.entries()) {
    IndexTuple swapped = key;
    for (int& v : swapped) v = 3 - v;
    out.set(swapped, map);
  }
  return out;
}

Verdict mixed_means_vanish(const JointCumulantSpec& united) {
  const std::size_t d = united.dim();
  for (const IndexTuple& vars : {IndexTuple{1, 2}, IndexTuple{2, 1}}) {
    for (std::size_t b = 0; b < d * d; ++b) {
      const std::vector<std::size_t> basis{b};
      BMatrix value = moment_of_word(united, Word::basis_word(d, vars, basis));
      if (!value.is_zero()) return Verdict::failure(vars, basis, d, std::move(value), {2}, "phi of a mixed product");
    }
  }
  Verdict v;
  v.checked_orders = {2};
  return v;
}

}  // namespace

EvenProductReport verify_even_product_pair(std::uint64_t seed, std::size_t d, std::size_t pair_order,
                                           const EvenProductOptions& options) {
  if (pair_order == 0) throw ArgumentError("pair order must be at least 1");
  const std::size_t inner = 2 * pair_order;
  EvenProductReport report;
  report.seed = seed;
  report.d = d;
  report.pair_order = pair_order;

  JointCumulantSpec a = random_even_spec(seed, d, inner);
  if (options.inject_mean) a.set({1}, MultilinearMap::constant(*options.inject_mean));
  const JointCumulantSpec a_prime = random_even_spec(seed + 1, d, inner);
  const JointCumulantSpec united = free_union(a, a_prime);

  report.mean_vanishes = mixed_means_vanish(united);

  const JointCumulantSpec sum = add_free_variables(united, {{1, 2}});
  report.sum_even = is_b_even(sum, 1, inner);
  if (report.sum_even.pass) {
    Verdict moments = odd_moments_vanish(sum, 1, inner);
    if (!moments.pass) report.sum_even = moments;
  }

  const JointCumulantSpec pair = product_word_cumulants(united, {{1, 2}, {2, 1}}, pair_order);
  report.r_diagonal = is_r_diagonal(pair, pair_order);
  report.r_diagonal_swapped = is_r_diagonal(swap_pair(pair), pair_order);

  const std::size_t series_order = pair_order / 2;
  if (!report.r_diagonal.pass) {
    report.determining_series = report.r_diagonal;
    report.determining_series.detail = "not evaluated: pair fails the R-diagonal support check";
  } else if (series_order == 0) {
    report.determining_series = Verdict{};
  } else {
    report.determining_series = determining_series(pair, series_order).reconstruction;
  }

  report.trace = check_b_trace(moments_from_cumulants(pair), pair_order);
  return report;
}

}  // namespace amalgam
