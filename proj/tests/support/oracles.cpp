#include "oracles.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

namespace rctc::oracle {

namespace {

using FMap = std::vector<std::pair<EventId, EventId>>;

bool allowed(Mode m, Direction d) {
  return m == Mode::forward_reverse || (m == Mode::forward) == (d == Direction::forward);
}

std::vector<Action> label_of(const Edge& e) {
  auto a = e.label.actions();
  std::sort(a.begin(), a.end());
  return a;
}

EventId moved(const std::map<std::uint32_t, std::uint32_t>& km, EventId id) { return {km.at(id.key), id.index}; }

}  // namespace

bool step_related(const KeyedLts& l, const KeyedLts& r, Mode mode) {
  const std::size_t n = l.states.size(), m = r.states.size();
  std::vector<std::vector<bool>> rel(n, std::vector<bool>(m, true));
  auto matched = [&](const KeyedLts& a, std::size_t s, const KeyedLts& b, std::size_t t, bool flipped) {
    for (auto ei : a.out[s]) {
      const Edge& e = a.edges[ei];
      if (!allowed(mode, e.direction)) continue;
      bool ok = false;
      for (auto fi : b.out[t]) {
        const Edge& f = b.edges[fi];
        if (f.direction != e.direction || label_of(f) != label_of(e)) continue;
        if (flipped ? rel[f.dst][e.dst] : rel[e.dst][f.dst]) {
          ok = true;
          break;
        }
      }
      if (!ok) return false;
    }
    return true;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t s = 0; s < n; ++s) {
      for (std::size_t t = 0; t < m; ++t) {
        if (!rel[s][t]) continue;
        if (!matched(l, s, r, t, false) || !matched(r, t, l, s, true)) {
          rel[s][t] = false;
          changed = true;
        }
      }
    }
  }
  return rel[l.initial][r.initial];
}

std::vector<FMap> all_isomorphisms(const History& a, const History& b) {
  std::vector<FMap> out;
  if (a.size() != b.size()) return out;
  std::vector<std::size_t> perm(b.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (std::size_t i = 0; i < a.size() && ok; ++i) ok = a.events[i].action == b.events[perm[i]].action;
    for (std::size_t i = 0; i < a.size() && ok; ++i)
      for (std::size_t j = 0; j < a.size() && ok; ++j) ok = a.less[i][j] == b.less[perm[i]][perm[j]];
    if (!ok) continue;
    FMap f;
    for (std::size_t i = 0; i < a.size(); ++i) f.emplace_back(a.events[i].id, b.events[perm[i]].id);
    std::sort(f.begin(), f.end());
    out.push_back(std::move(f));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

bool hp_related(const KeyedLts& l, const KeyedLts& r, Mode mode) {
  using T = std::tuple<std::size_t, std::size_t, FMap>;
  std::set<T> rel;
  for (std::size_t s = 0; s < l.states.size(); ++s)
    for (std::size_t t = 0; t < r.states.size(); ++t)
      for (auto& f : all_isomorphisms(l.states[s].history, r.states[t].history)) rel.emplace(s, t, std::move(f));

  // Can edge e of side A (f oriented A -> B) be answered from state t of B?
  auto answer = [&](const KeyedLts& b, std::size_t t, const Edge& e, const FMap& f, bool a_is_left) {
    for (auto fi : b.out[t]) {
      const Edge& g = b.edges[fi];
      if (g.direction != e.direction || label_of(g) != label_of(e) || g.changed.size() != e.changed.size()) continue;
      std::vector<FMap> candidates;
      if (e.direction == Direction::forward) {
        FMap base;
        for (auto [x, y] : f) base.emplace_back(moved(e.key_map, x), moved(g.key_map, y));
        std::vector<std::size_t> perm(g.changed.size());
        std::iota(perm.begin(), perm.end(), 0);
        do {
          FMap h = base;
          for (std::size_t i = 0; i < perm.size(); ++i) h.emplace_back(e.changed[i], g.changed[perm[i]]);
          candidates.push_back(std::move(h));
        } while (std::next_permutation(perm.begin(), perm.end()));
      } else {
        std::set<EventId> gone(e.changed.begin(), e.changed.end()), image;
        for (auto [x, y] : f)
          if (gone.contains(x)) image.insert(y);
        if (image != std::set<EventId>(g.changed.begin(), g.changed.end())) continue;
        FMap rest;
        for (auto [x, y] : f)
          if (!gone.contains(x)) rest.emplace_back(moved(e.key_map, x), moved(g.key_map, y));
        candidates.push_back(std::move(rest));
      }
      for (auto& h : candidates) {
        if (!a_is_left)
          for (auto& p : h) std::swap(p.first, p.second);
        std::sort(h.begin(), h.end());
        T key = a_is_left ? T{e.dst, g.dst, h} : T{g.dst, e.dst, h};
        if (rel.contains(key)) return true;
      }
    }
    return false;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (auto it = rel.begin(); it != rel.end();) {
      const auto& [s, t, f] = *it;
      FMap inv;
      for (auto [x, y] : f) inv.emplace_back(y, x);
      std::sort(inv.begin(), inv.end());
      bool ok = true;
      for (auto ei : l.out[s]) {
        const Edge& e = l.edges[ei];
        if (allowed(mode, e.direction) && !answer(r, t, e, f, true)) ok = false;
      }
      for (auto ei : r.out[t]) {
        const Edge& e = r.edges[ei];
        if (ok && allowed(mode, e.direction) && !answer(l, s, e, inv, false)) ok = false;
      }
      if (ok) {
        ++it;
      } else {
        it = rel.erase(it);
        changed = true;
      }
    }
  }
  for (const auto& [s, t, f] : rel)
    if (s == l.initial && t == r.initial) return true;
  return false;
}

std::vector<std::pair<Process, Process>> sample_pairs(std::uint64_t seed, std::size_t count,
                                                      std::size_t max_actions) {
  GenConfig cfg;
  cfg.seed = seed;
  cfg.alphabet = 2;
  cfg.max_actions = max_actions;
  cfg.include_tau = true;
  TermGenerator g(cfg);
  Bounds b;
  b.max_depth = max_actions;
  b.max_width = 2;
  std::vector<LawCase> laws;
  for (const auto& law : law_registry()) {
    // One case per law item; the flavor suffix does not change instances.
    bool constant = law.id.starts_with("congruence.const");
    if (law.flavor == Flavor::step && !constant) laws.push_back(law);
  }
  std::vector<std::pair<Process, Process>> out;
  while (out.size() < count) {
    if (g.rng()() % 2 == 0) {
      const auto& law = laws[g.rng()() % laws.size()];
      if (auto inst = law.instantiate(g, b); inst && inst->defs.empty()) out.emplace_back(inst->lhs, inst->rhs);
    } else {
      out.emplace_back(g.next(), g.next());
    }
  }
  return out;
}

}  // namespace rctc::oracle
