#include "rctc/equiv.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace rctc {

const char* to_string(Flavor f) {
  switch (f) {
    case Flavor::step: return "step";
    case Flavor::pomset: return "pomset";
    case Flavor::hp: return "hp";
    case Flavor::hhp: return "hhp";
  }
  return "?";
}

const char* to_string(Strength s) { return s == Strength::strong ? "strong" : "weak"; }

const char* to_string(Mode m) {
  switch (m) {
    case Mode::forward_reverse: return "fr";
    case Mode::forward: return "f";
    case Mode::reverse: return "r";
  }
  return "?";
}

Flavor flavor_from_string(const std::string& s) {
  if (s == "step" || s == "s") return Flavor::step;
  if (s == "pomset" || s == "p") return Flavor::pomset;
  if (s == "hp") return Flavor::hp;
  if (s == "hhp") return Flavor::hhp;
  throw Error("unknown flavor '" + s + "'");
}

Strength strength_from_string(const std::string& s) {
  if (s == "strong") return Strength::strong;
  if (s == "weak") return Strength::weak;
  throw Error("unknown strength '" + s + "'");
}

Mode mode_from_string(const std::string& s) {
  if (s == "fr" || s == "forward-reverse") return Mode::forward_reverse;
  if (s == "f" || s == "forward") return Mode::forward;
  if (s == "r" || s == "reverse") return Mode::reverse;
  throw Error("unknown mode '" + s + "'");
}

std::string Triple::str() const {
  std::string out = "(" + std::to_string(left) + ", {";
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (i) out += ", ";
    out += map[i].first.str() + "->" + map[i].second.str();
  }
  return out + "}, " + std::to_string(right) + ")";
}

std::string Evidence::str() const {
  if (initial_mismatch) return "initial configurations are not isomorphic";
  std::string out;
  for (const auto& s : path) {
    out += std::string(to_string(s.direction)) + " " + s.label + " to (" + std::to_string(s.left_state) + ", " +
           std::to_string(s.right_state) + "); ";
  }
  out += std::string(side == 0 ? "left" : "right") + " state " + std::to_string(side == 0 ? left_state : right_state) +
         " has " + to_string(direction) + " " + label + ", unmatched by the " + (side == 0 ? "right" : "left");
  if (triple) out += " under " + triple->str();
  return out;
}

History visible_history(const History& h) {
  History out;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!h.events[i].action.is_tau()) keep.push_back(i);
  }
  std::size_t n = keep.size();
  out.less.assign(n, std::vector<bool>(n, false));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) out.less[a][b] = h.less[keep[a]][keep[b]];
  for (std::size_t b = 0; b < n; ++b) {
    EventRecord r{h.events[keep[b]].id, h.events[keep[b]].action, {}};
    for (std::size_t a = 0; a < n; ++a) {
      if (!out.less[a][b]) continue;
      bool immediate = true;
      for (std::size_t c = 0; c < n && immediate; ++c) immediate = !(out.less[a][c] && out.less[c][b]);
      if (immediate) r.causes.push_back(h.events[keep[a]].id);
    }
    out.events.push_back(std::move(r));
  }
  return out;
}

namespace {

bool silent(const Edge& e) {
  return std::all_of(e.label.events.begin(), e.label.events.end(),
                     [](const KeyedAction& k) { return k.action.is_tau(); });
}

std::map<std::uint32_t, std::uint32_t> compose(const std::map<std::uint32_t, std::uint32_t>& first,
                                               const std::map<std::uint32_t, std::uint32_t>& second) {
  std::map<std::uint32_t, std::uint32_t> out;
  for (auto [a, b] : first) {
    if (auto it = second.find(b); it != second.end()) out.emplace(a, it->second);
  }
  return out;
}

struct Reach {
  std::size_t state;
  std::map<std::uint32_t, std::uint32_t> km;  // origin key -> state key
};

// States reachable through silent edges of one direction, with key maps.
std::vector<Reach> tau_closure(const KeyedLts& lts, std::size_t from, Direction dir) {
  std::vector<Reach> out;
  std::map<std::uint32_t, std::uint32_t> id;
  for (auto k : lts.states[from].history.events) id.emplace(k.id.key, k.id.key);
  out.push_back({from, id});
  std::set<std::pair<std::size_t, std::map<std::uint32_t, std::uint32_t>>> seen{{from, id}};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (auto ei : lts.out[out[i].state]) {
      const Edge& e = lts.edges[ei];
      if (e.direction != dir || !silent(e)) continue;
      Reach r{e.dst, compose(out[i].km, e.key_map)};
      if (seen.emplace(r.state, r.km).second) out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<Action> sorted_actions(std::vector<Action> a) {
  std::sort(a.begin(), a.end());
  return a;
}

}  // namespace

MoveGraph build_moves(const KeyedLts& lts, Strength strength) {
  MoveGraph g;
  g.strength = strength;
  g.moves.resize(lts.states.size());
  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    std::set<Move> moves;
    if (strength == Strength::strong) {
      for (auto ei : lts.out[s]) {
        const Edge& e = lts.edges[ei];
        moves.insert({e.direction, e.dst, sorted_actions(e.label.actions()), e.changed, e.key_map});
      }
    } else {
      for (Direction dir : {Direction::forward, Direction::reverse}) {
        for (const auto& pre : tau_closure(lts, s, dir)) {
          for (auto ei : lts.out[pre.state]) {
            const Edge& e = lts.edges[ei];
            if (e.direction != dir || silent(e)) continue;
            std::vector<Action> label;
            for (const auto& k : e.label.events) {
              if (!k.action.is_tau()) label.push_back(k.action);
            }
            auto mid = compose(pre.km, e.key_map);
            for (const auto& post : tau_closure(lts, e.dst, dir)) {
              Move m{dir, post.state, sorted_actions(label), {}, compose(mid, post.km)};
              if (dir == Direction::forward) {
                const History& h = lts.states[e.dst].history;
                for (auto id : e.changed) {
                  auto i = h.find(id);
                  if (h.events[*i].action.is_tau()) continue;
                  m.changed.push_back({post.km.at(id.key), id.index});
                }
              } else {
                const History& h = lts.states[pre.state].history;
                std::map<std::uint32_t, std::uint32_t> back;
                for (auto [o, c] : pre.km) back.emplace(c, o);
                for (auto id : e.changed) {
                  auto i = h.find(id);
                  if (h.events[*i].action.is_tau()) continue;
                  m.changed.push_back({back.at(id.key), id.index});
                }
              }
              std::sort(m.changed.begin(), m.changed.end());
              moves.insert(std::move(m));
            }
          }
        }
      }
    }
    g.moves[s].assign(moves.begin(), moves.end());
  }
  return g;
}

namespace {

bool dir_allowed(Mode m, Direction d) {
  return m == Mode::forward_reverse || (m == Mode::forward) == (d == Direction::forward);
}

// A labelled graph over the disjoint union of both LTSs; step and pomset
// checking are both bisimilarity on such a graph.
struct LMove {
  Direction dir;
  std::string label;
  std::size_t dst;
};
using LGraph = std::vector<std::vector<LMove>>;

std::string step_label(const Move& m) {
  std::string s = multiset_str(m.label);
  return s;
}

void add_step_moves(const MoveGraph& mg, Mode mode, std::size_t offset, LGraph& g) {
  for (std::size_t s = 0; s < mg.moves.size(); ++s) {
    for (const auto& m : mg.moves[s]) {
      if (dir_allowed(mode, m.direction)) g[offset + s].push_back({m.direction, step_label(m), offset + m.dst});
    }
  }
}

// Runs over moves of one direction: the pomset of their events.
void add_run_moves(const KeyedLts& lts, const MoveGraph& mg, Mode mode, std::size_t max_events, std::size_t offset,
                   LGraph& g) {
  bool weak = mg.strength == Strength::weak;
  std::vector<History> hist;
  for (const auto& st : lts.states) hist.push_back(weak ? visible_history(st.history) : st.history);
  for (std::size_t from = 0; from < lts.states.size(); ++from) {
    for (Direction dir : {Direction::forward, Direction::reverse}) {
      if (!dir_allowed(mode, dir)) continue;
      std::set<std::pair<std::size_t, std::vector<EventId>>> visited;
      std::set<std::pair<std::size_t, std::string>> emitted;
      std::function<void(std::size_t, const std::vector<EventId>&, const std::map<std::uint32_t, std::uint32_t>&)> dfs =
          [&](std::size_t s, const std::vector<EventId>& run, const std::map<std::uint32_t, std::uint32_t>& to_cur) {
            for (const auto& m : mg.moves[s]) {
              if (m.direction != dir || m.changed.empty()) continue;
              if (run.size() + m.changed.size() > max_events) continue;
              std::vector<EventId> next;
              std::map<std::uint32_t, std::uint32_t> next_cur;
              if (dir == Direction::forward) {
                for (auto id : run) next.push_back({m.key_map.at(id.key), id.index});
                next.insert(next.end(), m.changed.begin(), m.changed.end());
              } else {
                next = run;
                std::map<std::uint32_t, std::uint32_t> back;
                for (auto [o, c] : to_cur) back.emplace(c, o);
                for (auto id : m.changed) next.push_back({back.at(id.key), id.index});
                next_cur = compose(to_cur, m.key_map);
              }
              std::sort(next.begin(), next.end());
              if (!visited.emplace(m.dst, next).second) continue;
              Pomset p = dir == Direction::forward ? hist[m.dst].pomset(next) : hist[from].pomset(next);
              std::string c = p.canonical();
              if (emitted.emplace(m.dst, c).second) g[offset + from].push_back({dir, c, offset + m.dst});
              dfs(m.dst, next, next_cur);
            }
          };
      std::map<std::uint32_t, std::uint32_t> id;
      for (const auto& r : lts.states[from].history.events) id.emplace(r.id.key, r.id.key);
      dfs(from, {}, id);
    }
  }
}

std::vector<std::size_t> refine(const LGraph& g) {
  std::vector<std::size_t> block(g.size(), 0);
  std::size_t count = 1;
  for (;;) {
    std::map<std::pair<std::size_t, std::set<std::tuple<int, std::string, std::size_t>>>, std::size_t> ids;
    std::vector<std::size_t> next(g.size());
    for (std::size_t s = 0; s < g.size(); ++s) {
      std::set<std::tuple<int, std::string, std::size_t>> sig;
      for (const auto& m : g[s]) sig.emplace(static_cast<int>(m.dir), m.label, block[m.dst]);
      auto [it, _] = ids.emplace(std::pair(block[s], std::move(sig)), ids.size());
      next[s] = it->second;
    }
    block = std::move(next);
    if (ids.size() == count) return block;
    count = ids.size();
  }
}

bool has_label(const std::vector<LMove>& ms, Direction d, const std::string& l) {
  return std::any_of(ms.begin(), ms.end(), [&](const LMove& m) { return m.dir == d && m.label == l; });
}

std::optional<Evidence> graph_evidence(const LGraph& g, const std::vector<std::size_t>& block, std::size_t a,
                                       std::size_t b, std::size_t offset) {
  struct Node {
    std::size_t a, b;
    int parent;
    Direction dir;
    std::string label;
  };
  std::vector<Node> nodes{{a, b, -1, Direction::forward, ""}};
  std::set<std::pair<std::size_t, std::size_t>> seen{{a, b}};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto [x, y, parent, d0, l0] = nodes[i];
    std::optional<std::pair<int, const LMove*>> miss;
    for (const auto& m : g[x]) {
      if (!has_label(g[y], m.dir, m.label)) {
        miss = {0, &m};
        break;
      }
    }
    if (!miss) {
      for (const auto& m : g[y]) {
        if (!has_label(g[x], m.dir, m.label)) {
          miss = {1, &m};
          break;
        }
      }
    }
    if (miss) {
      Evidence ev;
      ev.left_state = x;
      ev.right_state = y - offset;
      ev.side = miss->first;
      ev.direction = miss->second->dir;
      ev.label = miss->second->label;
      for (int j = static_cast<int>(i); nodes[j].parent >= 0; j = nodes[j].parent) {
        ev.path.push_back({nodes[j].dir, nodes[j].label, nodes[j].a, nodes[j].b - offset});
      }
      std::reverse(ev.path.begin(), ev.path.end());
      return ev;
    }
    for (const auto& m : g[x]) {
      for (const auto& n : g[y]) {
        if (m.dir != n.dir || m.label != n.label || block[m.dst] == block[n.dst]) continue;
        if (seen.emplace(m.dst, n.dst).second)
          nodes.push_back({m.dst, n.dst, static_cast<int>(i), m.dir, m.label});
      }
    }
  }
  return std::nullopt;
}

LGraph build_graph(const KeyedLts& l, const KeyedLts& r, const MoveGraph& ml, const MoveGraph& mr,
                   const CheckOptions& opt) {
  LGraph g(l.states.size() + r.states.size());
  std::size_t off = l.states.size();
  if (opt.flavor == Flavor::step) {
    add_step_moves(ml, opt.mode, 0, g);
    add_step_moves(mr, opt.mode, off, g);
  } else {
    add_run_moves(l, ml, opt.mode, opt.bounds.max_depth, 0, g);
    add_run_moves(r, mr, opt.mode, opt.bounds.max_depth, off, g);
  }
  for (auto& ms : g) {
    std::sort(ms.begin(), ms.end(), [](const LMove& x, const LMove& y) {
      return std::tie(x.dir, x.label, x.dst) < std::tie(y.dir, y.label, y.dst);
    });
  }
  return g;
}

Verdict check_graph(const KeyedLts& l, const KeyedLts& r, const CheckOptions& opt) {
  MoveGraph ml = build_moves(l, opt.strength), mr = build_moves(r, opt.strength);
  LGraph g = build_graph(l, r, ml, mr, opt);
  std::size_t off = l.states.size();
  auto block = refine(g);
  Verdict v;
  std::size_t a = l.initial, b = off + r.initial;
  v.related = block[a] == block[b];
  if (!v.related) {
    v.evidence = graph_evidence(g, block, a, b, off);
    return v;
  }
  std::set<std::pair<std::size_t, std::size_t>> seen{{a, b}};
  std::deque<std::pair<std::size_t, std::size_t>> queue{{a, b}};
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    v.pairs.emplace_back(x, y - off);
    for (const auto& m : g[x]) {
      for (const auto& n : g[y]) {
        if (m.dir == n.dir && m.label == n.label && block[m.dst] == block[n.dst] && seen.emplace(m.dst, n.dst).second)
          queue.emplace_back(m.dst, n.dst);
      }
    }
  }
  std::sort(v.pairs.begin(), v.pairs.end());
  return v;
}

// ---- history-preserving ----

using FMap = std::vector<std::pair<EventId, EventId>>;

bool order_iso(const History& ha, const History& hb, const FMap& f) {
  for (const auto& [x, y] : f) {
    auto i = ha.find(x), j = hb.find(y);
    if (!i || !j || !(ha.events[*i].action == hb.events[*j].action)) return false;
  }
  for (const auto& [x1, y1] : f)
    for (const auto& [x2, y2] : f)
      if (ha.before(x1, x2) != hb.before(y1, y2)) return false;
  return true;
}

// All label- and order-preserving bijections between two histories.
std::vector<FMap> isomorphisms(const History& ha, const History& hb) {
  std::vector<FMap> out;
  if (ha.size() != hb.size()) return out;
  FMap cur;
  std::vector<bool> used(hb.size(), false);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == ha.size()) {
      out.push_back(cur);
      return;
    }
    for (std::size_t j = 0; j < hb.size(); ++j) {
      if (used[j] || !(ha.events[i].action == hb.events[j].action)) continue;
      bool ok = true;
      for (std::size_t p = 0; p < i && ok; ++p) {
        auto q = *hb.find(cur[p].second);
        ok = ha.less[p][i] == hb.less[q][j] && ha.less[i][p] == hb.less[j][q];
      }
      if (!ok) continue;
      used[j] = true;
      cur.emplace_back(ha.events[i].id, hb.events[j].id);
      rec(i + 1);
      cur.pop_back();
      used[j] = false;
    }
  };
  rec(0);
  return out;
}

FMap flip(const FMap& f) {
  FMap out;
  for (auto [x, y] : f) out.emplace_back(y, x);
  std::sort(out.begin(), out.end());
  return out;
}

EventId through(const std::map<std::uint32_t, std::uint32_t>& km, EventId id) { return {km.at(id.key), id.index}; }

struct HpSide {
  const KeyedLts* lts;
  const MoveGraph* moves;
  std::vector<History> hist;
};

// Successor maps for `m` (a move of side A from a) matched by `n` (a move of
// side B from b), with f oriented A -> B.
std::vector<FMap> match_maps(const HpSide& A, const HpSide& B, const FMap& f, const Move& m, const Move& n) {
  std::vector<FMap> out;
  if (m.direction != n.direction || m.label != n.label || m.changed.size() != n.changed.size()) return out;
  if (m.direction == Direction::reverse) {
    std::set<EventId> removed(m.changed.begin(), m.changed.end());
    std::set<EventId> image;
    for (auto [x, y] : f) {
      if (removed.contains(x)) image.insert(y);
    }
    if (image != std::set<EventId>(n.changed.begin(), n.changed.end())) return out;
    FMap rest;
    for (auto [x, y] : f) {
      if (!removed.contains(x)) rest.emplace_back(through(m.key_map, x), through(n.key_map, y));
    }
    std::sort(rest.begin(), rest.end());
    out.push_back(std::move(rest));
    return out;
  }
  const History& ha = A.hist[m.dst];
  const History& hb = B.hist[n.dst];
  FMap base;
  for (auto [x, y] : f) base.emplace_back(through(m.key_map, x), through(n.key_map, y));
  std::vector<std::size_t> perm(n.changed.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  do {
    FMap g = base;
    for (std::size_t i = 0; i < perm.size(); ++i) g.emplace_back(m.changed[i], n.changed[perm[i]]);
    std::sort(g.begin(), g.end());
    if (order_iso(ha, hb, g)) out.push_back(std::move(g));
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct Obligation {
  bool all = false;  // downward: every successor must hold (hhp)
  int side = 0;
  std::size_t move = 0;
  std::vector<std::size_t> succ;
};

struct HpEngine {
  HpSide L, R;
  CheckOptions opt;
  std::map<Triple, std::size_t> ids;
  std::vector<Triple> triples;
  std::vector<std::vector<Obligation>> obls;
  std::vector<std::size_t> initial;

  std::size_t intern(Triple t) {
    auto [it, fresh] = ids.emplace(t, triples.size());
    if (fresh) triples.push_back(std::move(t));
    return it->second;
  }

  std::vector<Triple> successors(const Triple& t, int side, const Move& m) const {
    const HpSide& A = side == 0 ? L : R;
    const HpSide& B = side == 0 ? R : L;
    std::size_t b = side == 0 ? t.right : t.left;
    FMap f = side == 0 ? t.map : flip(t.map);
    std::vector<Triple> out;
    for (const auto& n : B.moves->moves[b]) {
      for (auto& g : match_maps(A, B, f, m, n)) {
        if (side == 0)
          out.push_back({m.dst, n.dst, std::move(g)});
        else
          out.push_back({n.dst, m.dst, flip(g)});
      }
    }
    return out;
  }

  void expand(std::size_t id) {
    Triple t = triples[id];
    std::vector<Obligation> os;
    for (int side = 0; side < 2; ++side) {
      const auto& ms = (side == 0 ? L : R).moves->moves[side == 0 ? t.left : t.right];
      for (std::size_t i = 0; i < ms.size(); ++i) {
        if (!dir_allowed(opt.mode, ms[i].direction)) continue;
        Obligation o{false, side, i, {}};
        for (auto& s : successors(t, side, ms[i])) o.succ.push_back(intern(std::move(s)));
        os.push_back(std::move(o));
      }
    }
    if (opt.flavor == Flavor::hhp) {
      // Downward closure: every sub-configuration reached by undoing events
      // stays related, whatever the mode. Strong moves fix the counterpart
      // state, so every successor must hold. Weak counterparts may also undo
      // or redo silent events; one of them suffices, otherwise a resolved
      // internal choice on one side would have to match the unresolved one.
      bool weak = opt.strength == Strength::weak;
      for (int side = 0; side < 2; ++side) {
        const auto& ms = (side == 0 ? L : R).moves->moves[side == 0 ? t.left : t.right];
        for (std::size_t i = 0; i < ms.size(); ++i) {
          if (ms[i].direction != Direction::reverse) continue;
          Obligation o{!weak, side, i, {}};
          for (auto& s : successors(t, side, ms[i])) o.succ.push_back(intern(std::move(s)));
          os.push_back(std::move(o));
        }
      }
    }
    obls[id] = std::move(os);
  }

  void run() {
    for (const auto& f : isomorphisms(L.hist[L.lts->initial], R.hist[R.lts->initial]))
      initial.push_back(intern({L.lts->initial, R.lts->initial, f}));
    for (std::size_t i = 0; i < triples.size(); ++i) {
      obls.resize(triples.size());
      expand(i);
    }
    obls.resize(triples.size());
  }

  // Greatest fixed point; death[i] records the round order in which triples fell.
  std::vector<bool> alive;
  std::vector<std::size_t> death;

  static bool holds(const Obligation& o, const std::vector<bool>& alive) {
    if (o.all) return !o.succ.empty() && std::all_of(o.succ.begin(), o.succ.end(), [&](auto s) { return alive[s]; });
    return std::any_of(o.succ.begin(), o.succ.end(), [&](auto s) { return alive[s]; });
  }

  void solve() {
    alive.assign(triples.size(), true);
    death.assign(triples.size(), 0);
    std::vector<std::vector<std::size_t>> users(triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i)
      for (const auto& o : obls[i])
        for (auto s : o.succ) users[s].push_back(i);
    std::deque<std::size_t> work;
    for (std::size_t i = 0; i < triples.size(); ++i) work.push_back(i);
    std::size_t clock = 0;
    std::vector<bool> queued(triples.size(), true);
    while (!work.empty()) {
      auto i = work.front();
      work.pop_front();
      queued[i] = false;
      if (!alive[i]) continue;
      bool ok = std::all_of(obls[i].begin(), obls[i].end(), [&](const Obligation& o) { return holds(o, alive); });
      if (ok) continue;
      alive[i] = false;
      death[i] = ++clock;
      for (auto u : users[i]) {
        if (alive[u] && !queued[u]) queued[u] = true, work.push_back(u);
      }
    }
  }

  std::string move_label(int side, const Triple& t, std::size_t i) const {
    const auto& m = (side == 0 ? L : R).moves->moves[side == 0 ? t.left : t.right][i];
    return multiset_str(m.label);
  }

  Evidence evidence() const {
    Evidence ev;
    if (initial.empty()) {
      ev.initial_mismatch = true;
      return ev;
    }
    struct Node {
      std::size_t t;
      int parent;
      Direction dir;
      std::string label;
    };
    std::vector<Node> nodes;
    std::set<std::size_t> seen;
    for (auto i : initial) {
      nodes.push_back({i, -1, Direction::forward, ""});
      seen.insert(i);
    }
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const Triple& t = triples[nodes[k].t];
      for (const auto& o : obls[nodes[k].t]) {
        if (holds(o, alive)) continue;
        const auto& m = (o.side == 0 ? L : R).moves->moves[o.side == 0 ? t.left : t.right][o.move];
        if (o.succ.empty()) {
          ev.left_state = t.left;
          ev.right_state = t.right;
          ev.side = o.side;
          ev.direction = m.direction;
          ev.label = move_label(o.side, t, o.move);
          ev.triple = t;
          for (int j = static_cast<int>(k); nodes[j].parent >= 0; j = nodes[j].parent) {
            const Triple& tj = triples[nodes[j].t];
            ev.path.push_back({nodes[j].dir, nodes[j].label, tj.left, tj.right});
          }
          std::reverse(ev.path.begin(), ev.path.end());
          return ev;
        }
        for (auto s : o.succ) {
          if (seen.insert(s).second) nodes.push_back({s, static_cast<int>(k), m.direction, multiset_str(m.label)});
        }
      }
    }
    ev.initial_mismatch = true;  // not reached: some dead triple always has an unmatched move
    return ev;
  }
};

HpSide make_side(const KeyedLts& lts, const MoveGraph& mg) {
  HpSide s{&lts, &mg, {}};
  for (const auto& st : lts.states)
    s.hist.push_back(mg.strength == Strength::weak ? visible_history(st.history) : st.history);
  return s;
}

Verdict check_hp(const KeyedLts& l, const KeyedLts& r, const CheckOptions& opt) {
  MoveGraph ml = build_moves(l, opt.strength), mr = build_moves(r, opt.strength);
  HpEngine e{make_side(l, ml), make_side(r, mr), opt, {}, {}, {}, {}, {}, {}};
  e.run();
  e.solve();
  Verdict v;
  v.related = std::any_of(e.initial.begin(), e.initial.end(), [&](auto i) { return e.alive[i]; });
  if (!v.related) {
    v.evidence = e.evidence();
    return v;
  }
  std::set<std::size_t> seen;
  std::deque<std::size_t> queue;
  for (auto i : e.initial) {
    if (e.alive[i] && seen.insert(i).second) queue.push_back(i);
  }
  while (!queue.empty()) {
    auto i = queue.front();
    queue.pop_front();
    v.triples.push_back(e.triples[i]);
    for (const auto& o : e.obls[i])
      for (auto s : o.succ)
        if (e.alive[s] && seen.insert(s).second) queue.push_back(s);
  }
  std::sort(v.triples.begin(), v.triples.end());
  return v;
}

}  // namespace

Verdict check_lts(std::shared_ptr<const KeyedLts> left, std::shared_ptr<const KeyedLts> right, const CheckOptions& opt) {
  Verdict v = (opt.flavor == Flavor::step || opt.flavor == Flavor::pomset) ? check_graph(*left, *right, opt)
                                                                           : check_hp(*left, *right, opt);
  v.bounded = left->truncated || right->truncated;
  v.left = std::move(left);
  v.right = std::move(right);
  return v;
}

Verdict check(const Process& p, const Process& q, const Definitions& defs, const CheckOptions& opt) {
  auto l = std::make_shared<const KeyedLts>(explore(p, defs, opt.bounds));
  auto r = std::make_shared<const KeyedLts>(explore(q, defs, opt.bounds));
  return check_lts(std::move(l), std::move(r), opt);
}

// ---- independent re-checks ----

namespace {

bool validate_pairs(const Verdict& v, const CheckOptions& opt) {
  const KeyedLts& l = *v.left;
  const KeyedLts& r = *v.right;
  MoveGraph ml = build_moves(l, opt.strength), mr = build_moves(r, opt.strength);
  LGraph g = build_graph(l, r, ml, mr, opt);
  std::size_t off = l.states.size();
  std::set<std::pair<std::size_t, std::size_t>> w(v.pairs.begin(), v.pairs.end());
  if (!w.contains({l.initial, r.initial})) return false;
  for (auto [a, b] : w) {
    if (a >= l.states.size() || b >= r.states.size()) return false;
    for (const auto& m : g[a]) {
      bool ok = std::any_of(g[off + b].begin(), g[off + b].end(), [&](const LMove& n) {
        return n.dir == m.dir && n.label == m.label && w.contains({m.dst, n.dst - off});
      });
      if (!ok) return false;
    }
    for (const auto& n : g[off + b]) {
      bool ok = std::any_of(g[a].begin(), g[a].end(), [&](const LMove& m) {
        return n.dir == m.dir && n.label == m.label && w.contains({m.dst, n.dst - off});
      });
      if (!ok) return false;
    }
  }
  return true;
}

// Does W hold a triple answering move m (side A, f oriented A -> B) by move n?
bool answered(const std::set<Triple>& w, const FMap& f, const Move& m, const Move& n, int side) {
  if (m.direction != n.direction || m.label != n.label || m.changed.size() != n.changed.size()) return false;
  std::set<EventId> mc(m.changed.begin(), m.changed.end()), nc(n.changed.begin(), n.changed.end());
  FMap kept;
  for (auto [x, y] : f) {
    if (m.direction == Direction::reverse && mc.contains(x)) {
      if (!nc.contains(y)) return false;
      continue;
    }
    if (m.direction == Direction::reverse && nc.contains(y)) return false;
    kept.emplace_back(through(m.key_map, x), through(n.key_map, y));
  }
  if (m.direction == Direction::reverse && kept.size() + mc.size() != f.size()) return false;
  auto lo = side == 0 ? Triple{m.dst, n.dst, {}} : Triple{n.dst, m.dst, {}};
  for (auto it = w.lower_bound(lo); it != w.end() && it->left == lo.left && it->right == lo.right; ++it) {
    FMap g = side == 0 ? it->map : flip(it->map);
    std::set<std::pair<EventId, EventId>> gs(g.begin(), g.end());
    bool ok = std::all_of(kept.begin(), kept.end(), [&](const auto& p) { return gs.contains(p); });
    if (!ok) continue;
    if (m.direction == Direction::reverse) {
      if (g.size() == kept.size()) return true;
      continue;
    }
    // Forward: the remaining pairs must map the new events onto each other.
    if (g.size() != kept.size() + mc.size()) continue;
    bool fresh_ok = true;
    for (auto [x, y] : g) {
      bool old = std::any_of(kept.begin(), kept.end(), [&](const auto& p) { return p.first == x; });
      if (!old && !(mc.contains(x) && nc.contains(y))) fresh_ok = false;
    }
    if (fresh_ok) return true;
  }
  return false;
}

bool validate_triples(const Verdict& v, const CheckOptions& opt) {
  const KeyedLts& l = *v.left;
  const KeyedLts& r = *v.right;
  MoveGraph ml = build_moves(l, opt.strength), mr = build_moves(r, opt.strength);
  bool weak = opt.strength == Strength::weak;
  auto hist = [&](const KeyedLts& x, std::size_t s) {
    return weak ? visible_history(x.states[s].history) : x.states[s].history;
  };
  std::set<Triple> w(v.triples.begin(), v.triples.end());
  bool has_initial = std::any_of(w.begin(), w.end(), [&](const Triple& t) {
    return t.left == l.initial && t.right == r.initial;
  });
  if (!has_initial) return false;
  for (const auto& t : w) {
    if (t.left >= l.states.size() || t.right >= r.states.size()) return false;
    History ha = hist(l, t.left), hb = hist(r, t.right);
    // f must be a total label- and order-preserving bijection.
    if (t.map.size() != ha.size() || t.map.size() != hb.size()) return false;
    std::set<EventId> dom, cod;
    for (auto [x, y] : t.map) dom.insert(x), cod.insert(y);
    if (dom.size() != ha.size() || cod.size() != hb.size()) return false;
    if (!order_iso(ha, hb, t.map)) return false;
    for (int side = 0; side < 2; ++side) {
      const auto& ms = (side == 0 ? ml : mr).moves[side == 0 ? t.left : t.right];
      const auto& ns = (side == 0 ? mr : ml).moves[side == 0 ? t.right : t.left];
      FMap f = side == 0 ? t.map : flip(t.map);
      for (const auto& m : ms) {
        if (!dir_allowed(opt.mode, m.direction)) continue;
        bool ok = std::any_of(ns.begin(), ns.end(), [&](const Move& n) { return answered(w, f, m, n, side); });
        if (!ok) return false;
      }
    }
    if (opt.flavor == Flavor::hhp) {
      // Downward closure: undoing R1 on one side and f(R1) on the other lands
      // in W (every such counterpart when strong, some when weak).
      for (int side = 0; side < 2; ++side) {
        const auto& ms = (side == 0 ? ml : mr).moves[side == 0 ? t.left : t.right];
        const auto& ns = (side == 0 ? mr : ml).moves[side == 0 ? t.right : t.left];
        FMap f = side == 0 ? t.map : flip(t.map);
        for (const auto& m : ms) {
          if (m.direction != Direction::reverse) continue;
          std::set<EventId> image;
          for (auto [x, y] : f)
            if (std::binary_search(m.changed.begin(), m.changed.end(), x)) image.insert(y);
          std::size_t candidates = 0, answers = 0;
          for (const auto& n : ns) {
            if (n.direction != Direction::reverse || n.label != m.label) continue;
            if (std::set<EventId>(n.changed.begin(), n.changed.end()) != image || image.size() != m.changed.size())
              continue;
            ++candidates;
            answers += answered(w, f, m, n, side);
          }
          if (weak ? answers == 0 : (candidates == 0 || answers != candidates)) return false;
        }
      }
    }
  }
  return true;
}

}  // namespace

bool validate_witness(const Verdict& v, const CheckOptions& opt) {
  if (!v.related || !v.left || !v.right) return false;
  if (opt.flavor == Flavor::step || opt.flavor == Flavor::pomset) return validate_pairs(v, opt);
  return validate_triples(v, opt);
}

bool validate_evidence(const Verdict& v, const CheckOptions& opt) {
  if (v.related || !v.evidence || !v.left || !v.right) return false;
  const Evidence& ev = *v.evidence;
  const KeyedLts& l = *v.left;
  const KeyedLts& r = *v.right;
  MoveGraph ml = build_moves(l, opt.strength), mr = build_moves(r, opt.strength);
  if (ev.initial_mismatch) {
    if (opt.flavor == Flavor::step || opt.flavor == Flavor::pomset) return false;
    bool weak = opt.strength == Strength::weak;
    auto hl = weak ? visible_history(l.states[l.initial].history) : l.states[l.initial].history;
    auto hr = weak ? visible_history(r.states[r.initial].history) : r.states[r.initial].history;
    return isomorphisms(hl, hr).empty();
  }
  if (opt.flavor == Flavor::step || opt.flavor == Flavor::pomset) {
    LGraph g = build_graph(l, r, ml, mr, opt);
    std::size_t off = l.states.size();
    std::size_t a = l.initial, b = r.initial;
    for (const auto& s : ev.path) {
      bool lm = std::any_of(g[a].begin(), g[a].end(), [&](const LMove& m) {
        return m.dir == s.direction && m.label == s.label && m.dst == s.left_state;
      });
      bool rm = std::any_of(g[off + b].begin(), g[off + b].end(), [&](const LMove& m) {
        return m.dir == s.direction && m.label == s.label && m.dst == off + s.right_state;
      });
      if (!lm || !rm) return false;
      a = s.left_state, b = s.right_state;
    }
    if (a != ev.left_state || b != ev.right_state) return false;
    const auto& mine = ev.side == 0 ? g[a] : g[off + b];
    const auto& theirs = ev.side == 0 ? g[off + b] : g[a];
    return has_label(mine, ev.direction, ev.label) && !has_label(theirs, ev.direction, ev.label);
  }
  // hp / hhp: the path must exist state-wise and the final move must have no
  // counterpart under the recorded map.
  std::size_t a = l.initial, b = r.initial;
  for (const auto& s : ev.path) {
    auto step_ok = [&](const MoveGraph& mg, std::size_t from, std::size_t to) {
      return std::any_of(mg.moves[from].begin(), mg.moves[from].end(), [&](const Move& m) {
        return m.direction == s.direction && multiset_str(m.label) == s.label && m.dst == to;
      });
    };
    if (!step_ok(ml, a, s.left_state) || !step_ok(mr, b, s.right_state)) return false;
    a = s.left_state, b = s.right_state;
  }
  if (!ev.triple || ev.triple->left != a || ev.triple->right != b) return false;
  HpSide L = make_side(l, ml), R = make_side(r, mr);
  const HpSide& A = ev.side == 0 ? L : R;
  const HpSide& B = ev.side == 0 ? R : L;
  std::size_t sa = ev.side == 0 ? a : b, sb = ev.side == 0 ? b : a;
  FMap f = ev.side == 0 ? ev.triple->map : flip(ev.triple->map);
  for (const auto& m : A.moves->moves[sa]) {
    if (m.direction != ev.direction || multiset_str(m.label) != ev.label) continue;
    bool unmatched = std::all_of(B.moves->moves[sb].begin(), B.moves->moves[sb].end(),
                                 [&](const Move& n) { return match_maps(A, B, f, m, n).empty(); });
    if (unmatched) return true;
  }
  return false;
}

}  // namespace rctc
