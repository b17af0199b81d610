#include "amalgam/constructions.hpp"

#include "amalgam/errors.hpp"

#include <algorithm>

namespace amalgam {

namespace {

void require_same_dim(const SeriesTable& a, const SeriesTable& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("families over B of dimension " + std::to_string(a.dim()) + " and " +
                         std::to_string(b.dim()));
  }
}

void require_single_variable(const SeriesTable& f, const char* what) {
  if (f.variables() != 1) {
    throw ArgumentError(std::string(what) + " needs a single-variable series, got " +
                        std::to_string(f.variables()) + " variables");
  }
}

}  // namespace

JointCumulantSpec free_union(const JointCumulantSpec& a, const JointCumulantSpec& b) {
  require_same_dim(a, b);
  const std::size_t order = std::min(a.truncation(), b.truncation());
  const int shift = static_cast<int>(a.variables());
  JointCumulantSpec out(a.dim(), a.variables() + b.variables(), order);
  for (const auto& [key, map] : a.entries()) {
    if (key.size() <= order) out.set(key, map);
  }
  for (const auto& [key, map] : b.entries()) {
    if (key.size() > order) continue;
    IndexTuple shifted = key;
    for (int& v : shifted) v += shift;
    out.set(shifted, map);
  }
  return out;
}

JointCumulantSpec add_free_variables(const JointCumulantSpec& u, const std::vector<std::vector<int>>& groups) {
  std::vector<int> group_of(u.variables() + 1, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].empty()) throw ArgumentError("empty variable group");
    for (int v : groups[g]) {
      if (v < 1 || static_cast<std::size_t>(v) > u.variables()) {
        throw ArgumentError("group member " + std::to_string(v) + " is not a variable");
      }
      if (group_of[static_cast<std::size_t>(v)] != 0) {
        throw ArgumentError("variable " + std::to_string(v) + " appears in two groups");
      }
      group_of[static_cast<std::size_t>(v)] = static_cast<int>(g) + 1;
    }
  }
  for (std::size_t v = 1; v <= u.variables(); ++v) {
    if (group_of[v] == 0) throw ArgumentError("variable " + std::to_string(v) + " is in no group");
  }
  // Each coefficient of u contributes to exactly one tuple of sums.
  std::map<IndexTuple, MultilinearMap> sums;
  for (const auto& [key, map] : u.entries()) {
    IndexTuple target;
    for (int v : key) target.push_back(group_of[static_cast<std::size_t>(v)]);
    if (auto it = sums.find(target); it != sums.end()) {
      it->second += map;
    } else {
      sums.emplace(std::move(target), map);
    }
  }
  JointCumulantSpec out(u.dim(), groups.size(), u.truncation());
  for (auto& [key, map] : sums) out.set(key, std::move(map));
  return out;
}

JointCumulantSpec left_scale(const BMatrix& b, const JointCumulantSpec& u, int var) {
  if (b.dim() != u.dim()) throw DimensionError("scaling matrix dimension does not match the spec");
  if (var < 1 || static_cast<std::size_t>(var) > u.variables()) {
    throw ArgumentError("variable index " + std::to_string(var) + " outside 1.." + std::to_string(u.variables()));
  }
  const std::size_t d = u.dim();
  JointCumulantSpec out(d, u.variables(), u.truncation());
  for (const auto& [key, map] : u.entries()) {
    MultilinearMap scaled(d, map.arity());
    for (std::size_t flat = 0; flat < scaled.input_count(); ++flat) {
      const auto basis = decode_tuple(d, map.arity(), flat);
      std::vector<BMatrix> args;
      args.reserve(basis.size());
      for (std::size_t j = 0; j < basis.size(); ++j) {
        BMatrix arg = BMatrix::basis(d, basis[j]);
        // Slot j+2 carries b_{j+2}; a scaled variable turns it into b_{j+2} * b.
        if (key[j + 1] == var) arg = arg * b;
        args.push_back(std::move(arg));
      }
      BMatrix value = apply_unchecked(map, args);
      if (key[0] == var) value = b * value;
      scaled.set_column(flat, value);
    }
    out.set(key, std::move(scaled));
  }
  return out;
}

JointCumulantSpec product_word_cumulants(const JointCumulantSpec& u, const std::vector<IndexTuple>& words,
                                         std::size_t order) {
  if (words.empty()) throw ArgumentError("product construction needs at least one word");
  std::size_t longest = 0;
  for (const auto& w : words) {
    if (w.empty()) throw ArgumentError("product words must be nonempty");
    for (int v : w) {
      if (v < 1 || static_cast<std::size_t>(v) > u.variables()) {
        throw ArgumentError("product word uses variable " + std::to_string(v) + " outside 1.." +
                            std::to_string(u.variables()));
      }
    }
    longest = std::max(longest, w.size());
  }
  if (u.truncation() < order * longest) {
    throw TruncationError("products up to order " + std::to_string(order) + " need input truncation " +
                          std::to_string(order * longest) + ", have " + std::to_string(u.truncation()));
  }
  const std::size_t d = u.dim();
  JointMomentSpec moments(d, words.size(), order);
  for (std::size_t n = 1; n <= order; ++n) {
    for (const auto& tuple : moments.tuples(n)) {
      IndexTuple letters;
      std::vector<std::size_t> word_start;  // letter position of each product factor
      for (int j : tuple) {
        word_start.push_back(letters.size());
        const auto& w = words[static_cast<std::size_t>(j - 1)];
        letters.insert(letters.end(), w.begin(), w.end());
      }
      const auto bound = detail::bind_surviving(u, letters);
      if (bound.empty()) continue;
      detail::PlanEvaluator eval(d);
      MultilinearMap m(d, n - 1);
      Word word;
      for (int v : letters) word.slots.push_back({BMatrix::identity(d), v});
      word.tail = BMatrix::identity(d);
      for (std::size_t flat = 0; flat < m.input_count(); ++flat) {
        const auto basis = decode_tuple(d, n - 1, flat);
        for (std::size_t j = 1; j < n; ++j) word.slots[word_start[j]].left = BMatrix::basis(d, basis[j - 1]);
        BMatrix total(d);
        for (const auto& b : bound) total += eval(b, word);
        m.set_column(flat, total);
      }
      moments.set(tuple, std::move(m));
    }
  }
  return cumulants_from_moments(moments);
}

namespace {

struct BoxedSetup {
  JointCumulantSpec united;
  std::size_t order;
};

BoxedSetup boxed_setup(const JointCumulantSpec& f, const JointCumulantSpec& g, std::optional<std::size_t> order) {
  require_single_variable(f, "boxed convolution");
  require_single_variable(g, "boxed convolution");
  require_same_dim(f, g);
  const std::size_t limit = std::min(f.truncation(), g.truncation());
  const std::size_t n = order.value_or(limit);
  if (n > limit) {
    throw TruncationError("boxed convolution to order " + std::to_string(n) + " needs both inputs truncated at " +
                          std::to_string(n) + " or more");
  }
  return {free_union(f, g), n};
}

std::vector<detail::ContractionPlan> alternating_plans(int n) {
  std::vector<detail::ContractionPlan> plans;
  for (const auto& p : nc::NcLattice::get(n, std::max(n, nc::kDefaultMaxN)).elements()) {
    plans.push_back(detail::make_plan(nc::alternating_union(p)));
  }
  return plans;
}

// Interleaved word x, y, L_3 x, L_4 y, ...; lefts holds L_3..L_{2n}.
Word interleaved_word(std::size_t d, std::size_t n) {
  Word w;
  for (std::size_t k = 0; k < n; ++k) {
    w.slots.push_back({BMatrix::identity(d), 1});
    w.slots.push_back({BMatrix::identity(d), 2});
  }
  w.tail = BMatrix::identity(d);
  return w;
}

BMatrix sum_plans(const SeriesTable& family, const std::vector<detail::ContractionPlan>& plans, const Word& w) {
  BMatrix total(family.dim());
  for (const auto& plan : plans) total += detail::eval_plan(family, plan, w);
  return total;
}

}  // namespace

JointCumulantSpec boxed_convolution(const JointCumulantSpec& f, const JointCumulantSpec& g, const BoxedArgs& g_args,
                                    std::optional<std::size_t> order) {
  const auto [united, limit] = boxed_setup(f, g, order);
  const std::size_t d = f.dim();
  if (g_args.kind == BoxedArgs::Kind::symmetric && g_args.b0.dim() != d) {
    throw DimensionError("symmetric argument dimension does not match the series");
  }
  const BMatrix beta = g_args.kind == BoxedArgs::Kind::symmetric ? g_args.b0 : BMatrix::identity(d);
  JointCumulantSpec out(d, 1, limit);
  for (std::size_t n = 1; n <= limit; ++n) {
    const auto plans = alternating_plans(static_cast<int>(n));
    Word w = interleaved_word(d, n);
    for (std::size_t k = 1; k < n; ++k) w.slots[2 * k + 1].left = beta;
    MultilinearMap coeff(d, n - 1);
    for (std::size_t flat = 0; flat < coeff.input_count(); ++flat) {
      const auto basis = decode_tuple(d, n - 1, flat);
      for (std::size_t k = 1; k < n; ++k) w.slots[2 * k].left = BMatrix::basis(d, basis[k - 1]);
      coeff.set_column(flat, sum_plans(united, plans, w));
    }
    out.set(IndexTuple(n, 1), std::move(coeff));
  }
  return out;
}

std::vector<MultilinearMap> boxed_convolution_full(const JointCumulantSpec& f, const JointCumulantSpec& g,
                                                   std::optional<std::size_t> order) {
  const auto [united, limit] = boxed_setup(f, g, order);
  const std::size_t d = f.dim();
  std::vector<MultilinearMap> out;
  for (std::size_t n = 1; n <= limit; ++n) {
    const auto plans = alternating_plans(static_cast<int>(n));
    Word w = interleaved_word(d, n);
    MultilinearMap coeff(d, 2 * n - 2);
    for (std::size_t flat = 0; flat < coeff.input_count(); ++flat) {
      const auto basis = decode_tuple(d, 2 * n - 2, flat);
      for (std::size_t j = 0; j < basis.size(); ++j) w.slots[j + 2].left = BMatrix::basis(d, basis[j]);
      coeff.set_column(flat, sum_plans(united, plans, w));
    }
    out.push_back(std::move(coeff));
  }
  return out;
}

JointCumulantSpec zeta_transform(const JointCumulantSpec& f) {
  require_single_variable(f, "zeta transform");
  return JointCumulantSpec(moments_from_cumulants(f));
}

JointCumulantSpec mobius_transform(const JointCumulantSpec& f) {
  require_single_variable(f, "Moebius transform");
  return cumulants_from_moments(JointMomentSpec(static_cast<const SeriesTable&>(f)));
}

}  // namespace amalgam
