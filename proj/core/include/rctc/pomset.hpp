#pragma once

#include <string>
#include <vector>

#include "rctc/action.hpp"

namespace rctc {

/// Finite labelled strict partial order. `less[i][j]` means event i < event j.
struct Pomset {
  std::vector<Action> labels;
  std::vector<std::vector<bool>> less;

  std::size_t size() const { return labels.size(); }
  void add(Action a);
  /// Closes `less` transitively.
  void close();
  /// Invariant under isomorphism: equal iff the pomsets are isomorphic.
  std::string canonical() const;
  /// Events with their indices, e.g. "{a#0, b#1 | 0<1}".
  std::string str() const;
};

bool pomset_isomorphic(const Pomset& x, const Pomset& y);

}  // namespace rctc
