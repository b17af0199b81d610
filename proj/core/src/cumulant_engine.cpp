#include "amalgam/cumulant_engine.hpp"

#include "amalgam/errors.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

namespace amalgam {

namespace {

std::string tuple_text(const IndexTuple& key) {
  std::string out = "(";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(key[i]);
  }
  return out + ")";
}

}  // namespace

SeriesTable::SeriesTable(std::size_t d, std::size_t s, std::size_t truncation) : d_(d), s_(s), n_(truncation) {
  if (d == 0) throw DimensionError("B dimension must be positive");
  if (s == 0) throw DimensionError("a distribution needs at least one variable");
}

void SeriesTable::validate_key(const IndexTuple& key) const {
  if (key.empty() || key.size() > n_) {
    throw ArgumentError("order " + std::to_string(key.size()) + " outside 1.." + std::to_string(n_));
  }
  for (int v : key) {
    if (v < 1 || static_cast<std::size_t>(v) > s_) {
      throw ArgumentError("variable index " + std::to_string(v) + " outside 1.." + std::to_string(s_) + " in " +
                          tuple_text(key));
    }
  }
}

const MultilinearMap* SeriesTable::find(const IndexTuple& key) const {
  const auto it = table_.find(key);
  return it == table_.end() ? nullptr : &it->second;
}

MultilinearMap SeriesTable::coefficient(const IndexTuple& key) const {
  validate_key(key);
  if (const auto* m = find(key)) return *m;
  return MultilinearMap(d_, key.size() - 1);
}

void SeriesTable::set(const IndexTuple& key, MultilinearMap value) {
  validate_key(key);
  if (value.dim() != d_ || value.arity() + 1 != key.size()) {
    throw DimensionError("coefficient at " + tuple_text(key) + " must have dimension " + std::to_string(d_) +
                         " and arity " + std::to_string(key.size() - 1));
  }
  if (value.is_zero()) {
    table_.erase(key);
  } else {
    table_.insert_or_assign(key, std::move(value));
  }
}

std::vector<IndexTuple> SeriesTable::tuples(std::size_t order) const {
  std::vector<IndexTuple> out;
  IndexTuple t(order, 1);
  if (order == 0) return out;
  while (true) {
    out.push_back(t);
    std::size_t i = order;
    while (i > 0) {
      --i;
      if (static_cast<std::size_t>(++t[i]) <= s_) break;
      t[i] = 1;
      if (i == 0) return out;
    }
  }
}

SeriesTable SeriesTable::truncated(std::size_t order) const {
  if (order > n_) {
    throw TruncationError("cannot extend truncation from " + std::to_string(n_) + " to " + std::to_string(order));
  }
  SeriesTable out(d_, s_, order);
  for (const auto& [key, value] : table_) {
    if (key.size() <= order) out.table_.emplace(key, value);
  }
  return out;
}

Word Word::basis_word(std::size_t d, const IndexTuple& vars, std::span<const std::size_t> basis) {
  if (basis.size() + 1 != vars.size()) throw DimensionError("basis word needs one argument per slot after the first");
  Word w;
  w.slots.reserve(vars.size());
  w.slots.push_back({BMatrix::identity(d), vars[0]});
  for (std::size_t j = 1; j < vars.size(); ++j) w.slots.push_back({BMatrix::basis(d, basis[j - 1]), vars[j]});
  w.tail = BMatrix::identity(d);
  return w;
}

Word Word::with_args(const IndexTuple& vars, std::span<const BMatrix> args) {
  if (args.size() + 1 != vars.size() || vars.empty()) {
    throw DimensionError("word needs one argument per slot after the first");
  }
  const std::size_t d = args.empty() ? 0 : args[0].dim();
  Word w;
  w.slots.push_back({BMatrix{}, vars[0]});
  for (std::size_t j = 1; j < vars.size(); ++j) w.slots.push_back({args[j - 1], vars[j]});
  if (d == 0) return w;  // caller fills dimension-dependent parts
  w.slots[0].left = BMatrix::identity(d);
  w.tail = BMatrix::identity(d);
  return w;
}

namespace {

void check_word(const SeriesTable& family, const nc::SetPartition& p, const Word& w) {
  if (static_cast<std::size_t>(p.size()) != w.size()) {
    throw DimensionError("partition of " + std::to_string(p.size()) + " elements applied to word of length " +
                         std::to_string(w.size()));
  }
  if (!nc::is_noncrossing(p)) throw DomainError("partitioned evaluation along crossing partition " + p.to_string());
  const std::size_t d = family.dim();
  if (w.tail.dim() != d) throw DimensionError("word tail dimension mismatch");
  for (const auto& slot : w.slots) {
    if (slot.left.dim() != d) throw DimensionError("word coefficient dimension mismatch");
    if (slot.var < 1 || static_cast<std::size_t>(slot.var) > family.variables()) {
      throw ArgumentError("word uses variable " + std::to_string(slot.var) + " of a family with " +
                          std::to_string(family.variables()) + " variables");
    }
  }
  for (const auto& block : p.blocks()) {
    if (block.size() > family.truncation()) {
      throw TruncationError("block of size " + std::to_string(block.size()) + " exceeds truncation order " +
                            std::to_string(family.truncation()));
    }
  }
}

// u = L_first * K(L_rest...) for one block.
BMatrix contract_block(const SeriesTable& family, std::span<const int> positions, const std::vector<BMatrix>& left,
                       const Word& w) {
  IndexTuple key;
  key.reserve(positions.size());
  for (int pos : positions) key.push_back(w.slots[static_cast<std::size_t>(pos)].var);
  const MultilinearMap* coeff = family.find(key);
  if (coeff == nullptr) return BMatrix(family.dim());
  std::vector<BMatrix> args;
  args.reserve(positions.size() - 1);
  for (std::size_t i = 1; i < positions.size(); ++i) args.push_back(left[static_cast<std::size_t>(positions[i])]);
  const BMatrix value = apply_unchecked(*coeff, args);
  return left[static_cast<std::size_t>(positions[0])] * value;
}

}  // namespace

BMatrix eval_partitioned(const SeriesTable& family, const nc::SetPartition& p, const Word& w) {
  check_word(family, p, w);
  return detail::eval_plan(family, detail::make_plan(p), w);
}

BMatrix eval_partitioned(const SeriesTable& family, const nc::SetPartition& p, const Word& w,
                         const ContractionChooser& choose) {
  check_word(family, p, w);
  const int n = p.size();
  std::vector<BMatrix> left;
  left.reserve(w.size());
  for (const auto& slot : w.slots) left.push_back(slot.left);
  BMatrix tail = w.tail;
  std::vector<int> alive(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) alive[static_cast<std::size_t>(i)] = i;
  std::vector<std::size_t> pending(p.block_count());
  for (std::size_t b = 0; b < pending.size(); ++b) pending[b] = b;

  while (!pending.empty()) {
    std::vector<std::size_t> candidates;
    for (std::size_t b : pending) {
      const auto& block = p.blocks()[b];
      const auto first = std::find(alive.begin(), alive.end(), block.front() - 1);
      const auto span = static_cast<std::size_t>(alive.end() - first);
      bool interval = span >= block.size();
      for (std::size_t i = 0; interval && i < block.size(); ++i) interval = *(first + static_cast<std::ptrdiff_t>(i)) == block[i] - 1;
      if (interval) candidates.push_back(b);
    }
    const std::size_t pick = choose(candidates);
    if (pick >= candidates.size()) throw ArgumentError("contraction chooser returned an invalid candidate");
    const std::size_t b = candidates[pick];
    const auto& block = p.blocks()[b];
    std::vector<int> positions;
    for (int e : block) positions.push_back(e - 1);
    const BMatrix u = contract_block(family, positions, left, w);
    const auto first = std::find(alive.begin(), alive.end(), positions.front());
    const auto after = first + static_cast<std::ptrdiff_t>(positions.size());
    if (after != alive.end()) {
      auto& target = left[static_cast<std::size_t>(*after)];
      target = u * target;
    } else {
      tail = u * tail;
    }
    alive.erase(first, after);
    pending.erase(std::find(pending.begin(), pending.end(), b));
  }
  return tail;
}

namespace detail {

ContractionPlan make_plan(const nc::SetPartition& p) {
  ContractionPlan plan;
  plan.n = p.size();
  std::vector<char> done(static_cast<std::size_t>(p.size()), 0);
  const auto& blocks = p.blocks();
  for (std::size_t b = blocks.size(); b-- > 0;) {
    ContractionStep step;
    for (int e : blocks[b]) {
      step.positions.push_back(e - 1);
      done[static_cast<std::size_t>(e - 1)] = 1;
    }
    // First position after the block that is still present.
    for (int pos = blocks[b].back(); pos < p.size(); ++pos) {
      if (!done[static_cast<std::size_t>(pos)]) {
        step.fold_into = pos;
        break;
      }
    }
    plan.steps.push_back(std::move(step));
  }
  return plan;
}

const std::vector<ContractionPlan>& lattice_plans(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<std::vector<ContractionPlan>>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    const auto& lattice = nc::NcLattice::get(n, std::max(n, nc::kDefaultMaxN));
    auto plans = std::make_unique<std::vector<ContractionPlan>>();
    plans->reserve(lattice.elements().size());
    for (const auto& p : lattice.elements()) plans->push_back(make_plan(p));
    slot = std::move(plans);
  }
  return *slot;
}

bool plan_vanishes(const SeriesTable& family, const ContractionPlan& plan, std::span<const int> vars) {
  IndexTuple key;
  for (const auto& step : plan.steps) {
    key.clear();
    for (int pos : step.positions) key.push_back(vars[static_cast<std::size_t>(pos)]);
    if (family.find(key) == nullptr) return true;
  }
  return false;
}

BMatrix PlanEvaluator::operator()(const BoundPlan& bound, const Word& w) {
  const std::size_t n = w.size();
  if (left_.size() < n) left_.resize(n, BMatrix(d_));
  for (std::size_t i = 0; i < n; ++i) left_[i] = w.slots[i].left;
  tail_ = w.tail;
  const auto& steps = bound.plan->steps;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    const auto& positions = steps[s].positions;
    const std::size_t arity = positions.size() - 1;
    if (args_.size() < arity) args_.resize(arity, BMatrix(d_));
    for (std::size_t i = 0; i < arity; ++i) args_[i] = left_[static_cast<std::size_t>(positions[i + 1])];
    apply_into(value_, *bound.coeffs[s], std::span<const BMatrix>(args_.data(), arity));
    if (value_.is_zero()) return BMatrix(d_);
    multiply_into(u_, left_[static_cast<std::size_t>(positions[0])], value_);
    BMatrix& target = steps[s].fold_into >= 0 ? left_[static_cast<std::size_t>(steps[s].fold_into)] : tail_;
    multiply_into(product_, u_, target);
    std::swap(target, product_);
  }
  return tail_;
}

std::vector<BoundPlan> bind_surviving(const SeriesTable& family, std::span<const int> vars) {
  const auto survivors = surviving_partitions(family, vars);
  const auto& plans = lattice_plans(static_cast<int>(vars.size()));
  std::vector<BoundPlan> out;
  out.reserve(survivors.size());
  IndexTuple key;
  for (std::size_t idx : survivors) {
    BoundPlan b{idx, &plans[idx], {}};
    for (const auto& step : plans[idx].steps) {
      key.clear();
      for (int pos : step.positions) key.push_back(vars[static_cast<std::size_t>(pos)]);
      b.coeffs.push_back(family.find(key));
    }
    out.push_back(std::move(b));
  }
  return out;
}

BMatrix eval_plan(const SeriesTable& family, const ContractionPlan& plan, const Word& w) {
  BoundPlan b{0, &plan, {}};
  IndexTuple key;
  for (const auto& step : plan.steps) {
    key.clear();
    for (int pos : step.positions) key.push_back(w.slots[static_cast<std::size_t>(pos)].var);
    const MultilinearMap* coeff = family.find(key);
    if (coeff == nullptr) return BMatrix(family.dim());
    b.coeffs.push_back(coeff);
  }
  PlanEvaluator eval(family.dim());
  return eval(b, w);
}

std::vector<std::size_t> surviving_partitions(const SeriesTable& family, std::span<const int> vars) {
  const int n = static_cast<int>(vars.size());
  if (static_cast<std::size_t>(n) > family.truncation()) {
    throw TruncationError("word of length " + std::to_string(n) + " exceeds truncation order " +
                          std::to_string(family.truncation()));
  }
  const auto& plans = lattice_plans(n);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < plans.size(); ++i) {
    if (!plan_vanishes(family, plans[i], vars)) out.push_back(i);
  }
  return out;
}

}  // namespace detail

namespace {

// Sum over NC(n) of weight(pi) * partitioned value, on every basis tuple.
template <class Weight>
MultilinearMap lattice_sum(const SeriesTable& family, const IndexTuple& vars, Weight weight) {
  const std::size_t d = family.dim();
  const std::size_t n = vars.size();
  MultilinearMap out(d, n - 1);
  const auto bound = detail::bind_surviving(family, vars);
  if (bound.empty()) return out;
  std::vector<std::pair<const detail::BoundPlan*, Rational>> terms;
  for (const auto& b : bound) {
    Rational w = weight(b.index);
    if (sgn(w) != 0) terms.emplace_back(&b, std::move(w));
  }
  detail::PlanEvaluator eval(d);
  for (std::size_t flat = 0; flat < out.input_count(); ++flat) {
    const auto basis = decode_tuple(d, n - 1, flat);
    const Word word = Word::basis_word(d, vars, basis);
    BMatrix total(d);
    for (const auto& [plan, w] : terms) {
      BMatrix v = eval(*plan, word);
      if (w != 1) v *= w;
      total += v;
    }
    out.set_column(flat, total);
  }
  return out;
}

std::size_t checked_order(const SeriesTable& t, std::size_t order) {
  if (order > t.truncation()) {
    throw TruncationError("requested order " + std::to_string(order) + " exceeds truncation order " +
                          std::to_string(t.truncation()));
  }
  return order;
}

}  // namespace

JointMomentSpec moments_from_cumulants(const JointCumulantSpec& c) { return moments_from_cumulants(c, c.truncation()); }

JointMomentSpec moments_from_cumulants(const JointCumulantSpec& c, std::size_t order) {
  checked_order(c, order);
  JointMomentSpec out(c.dim(), c.variables(), order);
  for (std::size_t n = 1; n <= order; ++n) {
    for (const auto& vars : c.tuples(n)) {
      out.set(vars, lattice_sum(c, vars, [](std::size_t) { return Rational(1); }));
    }
  }
  return out;
}

JointCumulantSpec cumulants_from_moments(const JointMomentSpec& m) { return cumulants_from_moments(m, m.truncation()); }

JointCumulantSpec cumulants_from_moments(const JointMomentSpec& m, std::size_t order) {
  checked_order(m, order);
  JointCumulantSpec out(m.dim(), m.variables(), order);
  for (std::size_t n = 1; n <= order; ++n) {
    const auto& lattice = nc::NcLattice::get(static_cast<int>(n), std::max(static_cast<int>(n), nc::kDefaultMaxN));
    const auto& mu = lattice.mobius_to_top();
    for (const auto& vars : m.tuples(n)) {
      out.set(vars, lattice_sum(m, vars, [&](std::size_t idx) { return mu[idx]; }));
    }
  }
  return out;
}

BMatrix moment_of_word(const JointCumulantSpec& c, const Word& w) {
  if (w.size() == 0) throw DimensionError("empty word");
  const auto p = nc::SetPartition::singletons(static_cast<int>(w.size()));
  check_word(c, p, w);
  IndexTuple vars;
  for (const auto& slot : w.slots) vars.push_back(slot.var);
  const auto& plans = detail::lattice_plans(static_cast<int>(w.size()));
  BMatrix total(c.dim());
  for (std::size_t idx : detail::surviving_partitions(c, vars)) total += detail::eval_plan(c, plans[idx], w);
  return total;
}

std::map<IndexTuple, BMatrix> extract_series(const SeriesTable& spec, const BMatrix& b0) {
  if (b0.dim() != spec.dim()) throw DimensionError("series argument dimension does not match the spec");
  std::map<IndexTuple, BMatrix> out;
  for (const auto& [key, map] : spec.entries()) {
    const std::vector<BMatrix> args(key.size() - 1, b0);
    out.emplace(key, apply_unchecked(map, args));
  }
  return out;
}

}  // namespace amalgam
