#include "rctc/action.hpp"

#include <algorithm>

namespace rctc {

bool RelabelMap::is_identity() const {
  return std::all_of(pairs_.begin(), pairs_.end(), [](const auto& kv) {
    return !kv.second.is_co() && kv.second.name() == kv.first;
  });
}

Label RelabelMap::apply(const Label& l) const {
  auto it = pairs_.find(l.name());
  if (it == pairs_.end()) return l;
  return l.is_co() ? it->second.complement() : it->second;
}

Action RelabelMap::apply(const Action& a) const {
  if (a.is_tau()) return a;
  return Action(apply(a.label()));
}

RelabelMap RelabelMap::then(const RelabelMap& outer) const {
  RelabelMap out;
  for (const auto& [from, to] : pairs_) out.pairs_[from] = outer.apply(to);
  for (const auto& [from, to] : outer.pairs_) {
    if (!pairs_.contains(from)) out.pairs_[from] = to;
  }
  return out;
}

Action apply_relabel(const RelabelMap& f, const Action& a) { return f.apply(a); }

std::string multiset_str(std::vector<Action> actions) {
  std::sort(actions.begin(), actions.end(),
            [](const Action& x, const Action& y) { return x.str() < y.str(); });
  std::string out = "{";
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (i) out += ", ";
    out += actions[i].str();
  }
  return out + "}";
}

}  // namespace rctc
