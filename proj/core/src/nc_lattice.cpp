#include "amalgam/nc_lattice.hpp"

#include "amalgam/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace amalgam::nc {

SetPartition::SetPartition(int n, std::vector<Block> blocks) : n_(n), blocks_(std::move(blocks)) {
  if (n_ < 1) throw StructuralError("partition ground set must be nonempty");
  std::vector<char> seen(static_cast<std::size_t>(n_) + 1, 0);
  int covered = 0;
  for (auto& block : blocks_) {
    if (block.empty()) throw StructuralError("partition has an empty block");
    std::sort(block.begin(), block.end());
    for (int e : block) {
      if (e < 1 || e > n_) {
        throw StructuralError("partition element " + std::to_string(e) + " outside 1.." + std::to_string(n_));
      }
      if (seen[static_cast<std::size_t>(e)]) {
        throw StructuralError("partition element " + std::to_string(e) + " appears twice");
      }
      seen[static_cast<std::size_t>(e)] = 1;
      ++covered;
    }
  }
  if (covered != n_) throw StructuralError("partition blocks do not cover 1.." + std::to_string(n_));
  std::sort(blocks_.begin(), blocks_.end(), [](const Block& a, const Block& b) { return a.front() < b.front(); });
}

SetPartition SetPartition::singletons(int n) {
  std::vector<Block> blocks;
  for (int i = 1; i <= n; ++i) blocks.push_back({i});
  return SetPartition(n, std::move(blocks));
}

SetPartition SetPartition::full(int n) {
  Block all(static_cast<std::size_t>(std::max(n, 0)));
  std::iota(all.begin(), all.end(), 1);
  return SetPartition(n, {std::move(all)});
}

SetPartition SetPartition::from_labels(std::span<const int> labels) {
  std::map<int, Block> by_label;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_label[labels[i]].push_back(static_cast<int>(i) + 1);
  }
  std::vector<Block> blocks;
  for (auto& [label, block] : by_label) blocks.push_back(std::move(block));
  return SetPartition(static_cast<int>(labels.size()), std::move(blocks));
}

std::vector<int> SetPartition::labels() const {
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    for (int e : blocks_[b]) out[static_cast<std::size_t>(e - 1)] = static_cast<int>(b);
  }
  return out;
}

std::string SetPartition::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t b = 0; b < blocks_.size(); ++b) {
    if (b) os << ',';
    os << '{';
    for (std::size_t i = 0; i < blocks_[b].size(); ++i) {
      if (i) os << ',';
      os << blocks_[b][i];
    }
    os << '}';
  }
  os << '}';
  return os.str();
}

bool is_noncrossing(const SetPartition& p) {
  const auto lab = p.labels();
  const int n = p.size();
  // Two blocks cross iff some a < b < c < d has a, c in one and b, d in the other.
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      if (lab[a] == lab[b]) continue;
      for (int c = b + 1; c < n; ++c) {
        if (lab[c] != lab[a]) continue;
        for (int d = c + 1; d < n; ++d) {
          if (lab[d] == lab[b]) return false;
        }
      }
    }
  }
  return true;
}

bool has_odd_block(const SetPartition& p) {
  return std::any_of(p.blocks().begin(), p.blocks().end(),
                     [](const SetPartition::Block& b) { return b.size() % 2 == 1; });
}

namespace {

void check_range(int n, int max_n) {
  if (n < 1 || n > max_n) {
    throw RangeError("n = " + std::to_string(n) + " outside 1.." + std::to_string(max_n));
  }
}

using BlockList = std::vector<SetPartition::Block>;

// All noncrossing partitions of {offset+1 .. offset+m}: choose the block V of
// the first element, then fill each gap of V (and the tail after it)
// independently.
std::vector<BlockList> generate_nc(int offset, int m) {
  if (m == 0) return {BlockList{}};
  std::vector<BlockList> out;
  const int rest = m - 1;
  for (unsigned mask = 0; mask < (1u << rest); ++mask) {
    SetPartition::Block head{offset + 1};
    for (int i = 0; i < rest; ++i) {
      if (mask & (1u << i)) head.push_back(offset + 2 + i);
    }
    // Segments strictly between consecutive elements of head, then after it.
    std::vector<std::pair<int, int>> segments;
    for (std::size_t i = 0; i + 1 < head.size(); ++i) {
      if (head[i + 1] - head[i] > 1) segments.emplace_back(head[i], head[i + 1] - head[i] - 1);
    }
    if (head.back() < offset + m) segments.emplace_back(head.back(), offset + m - head.back());

    std::vector<BlockList> partial{BlockList{head}};
    for (const auto& [start, len] : segments) {
      const auto sub = generate_nc(start, len);
      std::vector<BlockList> next;
      next.reserve(partial.size() * sub.size());
      for (const auto& a : partial) {
        for (const auto& b : sub) {
          BlockList merged = a;
          merged.insert(merged.end(), b.begin(), b.end());
          next.push_back(std::move(merged));
        }
      }
      partial = std::move(next);
    }
    for (auto& blocks : partial) out.push_back(std::move(blocks));
  }
  return out;
}

}  // namespace

std::vector<SetPartition> enumerate_nc(int n, int max_n) {
  check_range(n, max_n);
  auto raw = generate_nc(0, n);
  std::vector<SetPartition> out;
  out.reserve(raw.size());
  for (auto& blocks : raw) out.emplace_back(n, std::move(blocks));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<SetPartition> enumerate_nc_even(int n, int max_n) {
  check_range(n, max_n);
  if (n % 2 != 0) throw RangeError("even-block enumeration needs even n, got " + std::to_string(n));
  auto all = enumerate_nc(n, max_n);
  std::vector<SetPartition> out;
  for (auto& p : all) {
    if (!has_odd_block(p)) out.push_back(std::move(p));
  }
  return out;
}

bool leq_refine(const SetPartition& p, const SetPartition& q) {
  if (p.size() != q.size()) {
    throw DimensionError("refinement compares partitions of " + std::to_string(p.size()) + " and " +
                         std::to_string(q.size()) + " elements");
  }
  const auto qlab = q.labels();
  for (const auto& block : p.blocks()) {
    const int target = qlab[static_cast<std::size_t>(block.front() - 1)];
    for (int e : block) {
      if (qlab[static_cast<std::size_t>(e - 1)] != target) return false;
    }
  }
  return true;
}

SetPartition kreweras(const SetPartition& p) {
  if (!is_noncrossing(p)) throw DomainError("Kreweras complement of crossing partition " + p.to_string());
  const int n = p.size();
  // Barred element i sits between i and i+1. Barred i < k may share a block
  // iff no block of p meets both {i+1..k} and its complement.
  const auto lab = p.labels();
  auto compatible = [&](int i, int k) {
    std::vector<int> inside(p.block_count(), 0), outside(p.block_count(), 0);
    for (int e = 1; e <= n; ++e) {
      const auto b = static_cast<std::size_t>(lab[static_cast<std::size_t>(e - 1)]);
      if (e > i && e <= k) {
        inside[b] = 1;
      } else {
        outside[b] = 1;
      }
    }
    for (std::size_t b = 0; b < p.block_count(); ++b) {
      if (inside[b] && outside[b]) return false;
    }
    return true;
  };
  std::vector<int> label(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int i = 1; i <= n; ++i) {
    if (label[static_cast<std::size_t>(i - 1)] >= 0) continue;
    label[static_cast<std::size_t>(i - 1)] = next;
    for (int k = i + 1; k <= n; ++k) {
      if (label[static_cast<std::size_t>(k - 1)] < 0 && compatible(i, k)) label[static_cast<std::size_t>(k - 1)] = next;
    }
    ++next;
  }
  return SetPartition::from_labels(label);
}

SetPartition alternating_union(const SetPartition& p) {
  const SetPartition kr = kreweras(p);
  std::vector<SetPartition::Block> blocks;
  for (const auto& b : p.blocks()) {
    SetPartition::Block out;
    for (int e : b) out.push_back(2 * e - 1);
    blocks.push_back(std::move(out));
  }
  for (const auto& b : kr.blocks()) {
    SetPartition::Block out;
    for (int e : b) out.push_back(2 * e);
    blocks.push_back(std::move(out));
  }
  return SetPartition(2 * p.size(), std::move(blocks));
}

Rational mobius_nc(const SetPartition& p, const SetPartition& q) {
  if (p.size() != q.size()) throw DimensionError("Moebius function of partitions with different n");
  if (!is_noncrossing(p) || !is_noncrossing(q)) throw DomainError("Moebius function needs noncrossing partitions");
  if (!leq_refine(p, q)) throw OrderError(p.to_string() + " is not a refinement of " + q.to_string());
  // Callers may go beyond the default cap here; the partitions already exist.
  const auto& lattice = NcLattice::get(p.size(), std::max(p.size(), kDefaultMaxN));
  const auto ip = lattice.index_of(p);
  if (q == SetPartition::full(q.size())) return lattice.mobius_to_top(ip);
  return lattice.mobius(ip, lattice.index_of(q));
}

// ---------------------------------------------------------------------------

const NcLattice& NcLattice::get(int n, int max_n) {
  check_range(n, max_n);
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<NcLattice>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<NcLattice>(n);
  return *slot;
}

NcLattice::NcLattice(int n) : n_(n), elements_(enumerate_nc(n, std::max(n, kDefaultMaxN))) {
  labels_.reserve(elements_.size());
  block_min_.reserve(elements_.size());
  for (const auto& p : elements_) {
    std::vector<unsigned char> lab(static_cast<std::size_t>(n)), mins(static_cast<std::size_t>(n));
    for (std::size_t b = 0; b < p.block_count(); ++b) {
      for (int e : p.blocks()[b]) {
        lab[static_cast<std::size_t>(e - 1)] = static_cast<unsigned char>(b);
        mins[static_cast<std::size_t>(e - 1)] = static_cast<unsigned char>(p.blocks()[b].front() - 1);
      }
    }
    labels_.push_back(std::move(lab));
    block_min_.push_back(std::move(mins));
  }
}

std::size_t NcLattice::index_of(const SetPartition& p) const {
  const auto it = std::lower_bound(elements_.begin(), elements_.end(), p);
  if (it == elements_.end() || *it != p) throw DomainError(p.to_string() + " is not an element of NC(" + std::to_string(n_) + ")");
  return static_cast<std::size_t>(it - elements_.begin());
}

bool NcLattice::leq_index(std::size_t p, std::size_t q) const {
  const auto& pm = block_min_[p];
  const auto& ql = labels_[q];
  for (std::size_t i = 0; i < pm.size(); ++i) {
    if (ql[i] != ql[pm[i]]) return false;
  }
  return true;
}

const std::vector<Rational>& NcLattice::mobius_to_top() const {
  std::call_once(top_once_, [this] {
    const std::size_t count = elements_.size();
    std::vector<std::size_t> order(count);
    std::iota(order.begin(), order.end(), 0);
    // Coarsest first, so every strict upper bound is finished before use.
    std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
      return elements_[a].block_count() < elements_[b].block_count();
    });
    std::vector<Rational> mu(count);
    for (std::size_t pos = 0; pos < count; ++pos) {
      const std::size_t r = order[pos];
      if (elements_[r].block_count() == 1) {
        mu[r] = 1;
        continue;
      }
      Rational sum = 0;
      for (std::size_t prev = 0; prev < pos; ++prev) {
        const std::size_t t = order[prev];
        if (elements_[t].block_count() >= elements_[r].block_count()) break;
        if (leq_index(r, t)) sum += mu[t];
      }
      mu[r] = -sum;
    }
    top_ = std::move(mu);
  });
  return top_;
}

Rational NcLattice::mobius(std::size_t p, std::size_t q) const {
  if (!leq_index(p, q)) {
    throw OrderError(elements_[p].to_string() + " is not a refinement of " + elements_[q].to_string());
  }
  {
    std::lock_guard lock(memo_mutex_);
    if (auto it = memo_.find({p, q}); it != memo_.end()) return it->second;
  }
  std::vector<std::size_t> interval;
  for (std::size_t r = 0; r < elements_.size(); ++r) {
    if (leq_index(p, r) && leq_index(r, q)) interval.push_back(r);
  }
  // Finest first: mu(p, r) = -sum over p <= r' < r of mu(p, r').
  std::stable_sort(interval.begin(), interval.end(), [this](std::size_t a, std::size_t b) {
    return elements_[a].block_count() > elements_[b].block_count();
  });
  std::vector<Rational> mu(interval.size());
  for (std::size_t i = 0; i < interval.size(); ++i) {
    if (interval[i] == p) {
      mu[i] = 1;
      continue;
    }
    Rational sum = 0;
    for (std::size_t j = 0; j < i; ++j) {
      if (elements_[interval[j]].block_count() <= elements_[interval[i]].block_count()) continue;
      if (leq_index(interval[j], interval[i])) sum += mu[j];
    }
    mu[i] = -sum;
  }
  std::lock_guard lock(memo_mutex_);
  for (std::size_t i = 0; i < interval.size(); ++i) memo_.emplace(std::pair{p, interval[i]}, mu[i]);
  return memo_.at({p, q});
}

namespace detail {

SetPartition nc_join(const SetPartition& a, const SetPartition& b) {
  if (a.size() != b.size()) throw DimensionError("join of partitions with different n");
  const int n = a.size();
  std::vector<int> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int x, int y) { parent[static_cast<std::size_t>(find(x))] = find(y); };
  for (const auto* p : {&a, &b}) {
    for (const auto& block : p->blocks()) {
      for (int e : block) unite(block.front() - 1, e - 1);
    }
  }
  // Merge crossing blocks until the result is noncrossing.
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n && !changed; ++i) {
      for (int j = i + 1; j < n && !changed; ++j) {
        if (find(i) == find(j)) continue;
        for (int k = j + 1; k < n && !changed; ++k) {
          if (find(k) != find(i)) continue;
          for (int l = k + 1; l < n; ++l) {
            if (find(l) == find(j)) {
              unite(i, j);
              changed = true;
              break;
            }
          }
        }
      }
    }
  }
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = find(i);
  return SetPartition::from_labels(labels);
}

}  // namespace detail

}  // namespace amalgam::nc
