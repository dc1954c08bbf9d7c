#include "rctc/pomset.hpp"

#include <algorithm>
#include <numeric>

namespace rctc {

void Pomset::add(Action a) {
  labels.push_back(std::move(a));
  for (auto& row : less) row.push_back(false);
  less.emplace_back(labels.size(), false);
}

void Pomset::close() {
  std::size_t n = size();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (less[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (less[k][j]) less[i][j] = true;
}

namespace {

// Backtracking label- and order-preserving bijection search.
bool extend(const Pomset& x, const Pomset& y, std::vector<int>& map, std::vector<bool>& used, std::size_t i) {
  if (i == x.size()) return true;
  for (std::size_t j = 0; j < y.size(); ++j) {
    if (used[j] || !(x.labels[i] == y.labels[j])) continue;
    bool ok = true;
    for (std::size_t p = 0; p < i && ok; ++p) {
      auto q = static_cast<std::size_t>(map[p]);
      ok = x.less[p][i] == y.less[q][j] && x.less[i][p] == y.less[j][q];
    }
    if (!ok) continue;
    map[i] = static_cast<int>(j), used[j] = true;
    if (extend(x, y, map, used, i + 1)) return true;
    used[j] = false;
  }
  return false;
}

// "{a, b, c | 0<2, 1<2}": labels in the given order, then the order by
// position. Readable, and injective for a fixed label sequence.
std::string encode(const Pomset& p, const std::vector<std::size_t>& order) {
  std::string s = "{";
  for (std::size_t i = 0; i < order.size(); ++i) s += (i ? ", " : "") + p.labels[order[i]].str();
  bool first = true;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = 0; j < order.size(); ++j) {
      if (!p.less[order[i]][order[j]]) continue;
      s += first ? " | " : ", ";
      first = false;
      s += std::to_string(i) + "<" + std::to_string(j);
    }
  return s + "}";
}

}  // namespace

bool pomset_isomorphic(const Pomset& x, const Pomset& y) {
  if (x.size() != y.size()) return false;
  std::vector<int> map(x.size(), -1);
  std::vector<bool> used(y.size(), false);
  return extend(x, y, map, used, 0);
}

std::string Pomset::canonical() const {
  // Sort by label, then by (predecessor count, successor count); permute only
  // within blocks that still tie and keep the smallest encoding.
  std::size_t n = size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i) {
    std::size_t in = 0, out = 0;
    for (std::size_t j = 0; j < n; ++j) in += less[j][i], out += less[i][j];
    return std::tuple(labels[i].str(), in, out);
  };
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return key(a) < key(b); });
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && key(order[j]) == key(order[i])) ++j;
    if (j - i > 1) blocks.emplace_back(i, j);
    i = j;
  }
  std::string best = encode(*this, order);
  // Odometer over the permutations of every tied block.
  std::function<void(std::size_t)> rec = [&](std::size_t b) {
    if (b == blocks.size()) {
      best = std::min(best, encode(*this, order));
      return;
    }
    auto [lo, hi] = blocks[b];
    std::sort(order.begin() + lo, order.begin() + hi);
    do rec(b + 1);
    while (std::next_permutation(order.begin() + lo, order.begin() + hi));
  };
  if (!blocks.empty()) rec(0);
  return best;
}

std::string Pomset::str() const {
  std::string out = "{";
  for (std::size_t i = 0; i < size(); ++i) {
    if (i) out += ", ";
    out += labels[i].str() + "#" + std::to_string(i);
  }
  bool first = true;
  for (std::size_t i = 0; i < size(); ++i) {
    for (std::size_t j = 0; j < size(); ++j) {
      if (!less[i][j]) continue;
      out += first ? " | " : ", ";
      first = false;
      out += std::to_string(i) + "<" + std::to_string(j);
    }
  }
  return out + "}";
}

}  // namespace rctc
