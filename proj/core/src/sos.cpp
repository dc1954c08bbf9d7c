#include "rctc/sos.hpp"

#include <algorithm>
#include <deque>
#include <map>

#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

namespace rctc {

const char* to_string(Direction d) { return d == Direction::forward ? "forward" : "reverse"; }

std::vector<Action> StepLabel::actions() const {
  std::vector<Action> out;
  out.reserve(events.size());
  for (const auto& e : events) out.push_back(e.action);
  return out;
}

std::string StepLabel::str(Direction d) const {
  if (d == Direction::forward) return multiset_str(actions());
  std::vector<KeyedAction> sorted = events;
  std::sort(sorted.begin(), sorted.end(), [](const KeyedAction& x, const KeyedAction& y) {
    return std::pair(x.key, x.action.str()) < std::pair(y.key, y.action.str());
  });
  std::string out = "{";
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i) out += ", ";
    out += sorted[i].str();
  }
  return out + "}";
}

namespace {

// Forward moves are derived with placeholder keys; the top level turns them
// into fresh keys in left-to-right order.
constexpr std::uint32_t kPlaceholder = 1u << 30;
constexpr int kMaxUnfold = 256;

struct Event {
  Action action;
  std::uint32_t key = 0;
  bool multi = false;  // part of an atomic multi-action prefix
  bool sync = false;   // tau produced by a synchronisation
  bool syncable() const { return !multi && !sync && !action.is_tau(); }
};

struct Move {
  std::vector<Event> events;
  Process target;
  std::uint32_t placeholders = 0;  // forward only: placeholders used are [kPlaceholder, +placeholders)
};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool restricted(const LabelSet& L, const Action& a) {
  if (a.is_tau()) return false;
  return L.contains(a.label()) || L.contains(a.label().complement());
}

std::vector<Event> atom_events(const std::vector<Action>& acts, std::uint32_t key) {
  std::vector<Event> out;
  for (const auto& a : acts) out.push_back({a, key, acts.size() > 1, false});
  return out;
}

Process shift_placeholders(const Process& p, std::uint32_t by, const std::map<std::uint32_t, std::uint32_t>& merge) {
  if (by == 0 && merge.empty()) return p;
  return rename_keys(p, [&](std::uint32_t k) {
    if (k < kPlaceholder) return k;
    if (auto it = merge.find(k); it != merge.end()) return it->second;
    return k + by;
  });
}

class Deriver {
 public:
  Deriver(const Definitions& defs, const SosOptions& opt) : defs_(defs), opt_(opt) {}

  std::vector<Move> fwd(const Process& p, int unfold = 0) {
    std::vector<Move> out;
    auto wrap = [&](std::vector<Move> ms, auto&& build) {
      for (auto& m : ms) {
        m.target = build(m.target);
        out.push_back(std::move(m));
      }
    };
    std::visit(
        overloaded{
            [](const Nil&) {},
            [&](const Const& c) {
              if (unfold > kMaxUnfold) throw Error("unguarded recursion through constant '" + c.name + "'");
              out = fwd(defs_.lookup(c.name), unfold + 1);
            },
            [&](const Prefix& x) {
              if (!x.key) {
                if (x.actions.size() <= opt_.max_width && is_standard(x.body, defs_)) {
                  out.push_back({atom_events(x.actions, kPlaceholder),
                                 mk::prefix(x.actions, x.body, Key{kPlaceholder}), 1});
                }
                return;
              }
              wrap(fwd(x.body), [&](const Process& b) { return mk::prefix(x.actions, b, x.key); });
            },
            [&](const Suffix& x) {
              if (x.key) return;
              wrap(fwd(x.body), [&](const Process& b) { return mk::suffix(b, x.actions); });
              if (x.actions.size() <= opt_.max_width && is_fully_executed(x.body, defs_)) {
                out.push_back({atom_events(x.actions, kPlaceholder),
                               mk::suffix(x.body, x.actions, Key{kPlaceholder}), 1});
              }
            },
            [&](const Seq& x) {
              if (is_standard(x.right, defs_))
                wrap(fwd(x.left), [&](const Process& l) { return mk::seq(l, x.right); });
              if (is_fully_executed(x.left, defs_))
                wrap(fwd(x.right), [&](const Process& r) { return mk::seq(x.left, r); });
            },
            [&](const Sum& x) {
              if (is_standard(x.right, defs_))
                wrap(fwd(x.left), [&](const Process& l) { return mk::sum(l, x.right); });
              if (is_standard(x.left, defs_))
                wrap(fwd(x.right), [&](const Process& r) { return mk::sum(x.left, r); });
            },
            [&](const Par& x) { out = fwd_par(x); },
            [&](const Restrict& x) {
              for (auto& m : fwd(x.body)) {
                bool ok = std::none_of(m.events.begin(), m.events.end(),
                                       [&](const Event& e) { return restricted(x.labels, e.action); });
                if (!ok) continue;
                m.target = mk::restrict(m.target, x.labels);
                out.push_back(std::move(m));
              }
            },
            [&](const Relabel& x) {
              for (auto& m : fwd(x.body)) {
                for (auto& e : m.events) e.action = x.map.apply(e.action);
                m.target = mk::relabel(m.target, x.map);
                out.push_back(std::move(m));
              }
            },
        },
        static_cast<const Node::variant&>(p.node()));
    return out;
  }

  std::vector<Move> rev(const Process& p, int unfold = 0) {
    std::vector<Move> out;
    auto wrap = [&](std::vector<Move> ms, auto&& build) {
      for (auto& m : ms) {
        m.target = build(m.target);
        out.push_back(std::move(m));
      }
    };
    std::visit(
        overloaded{
            [](const Nil&) {},
            [&](const Const& c) {
              if (unfold > kMaxUnfold) throw Error("unguarded recursion through constant '" + c.name + "'");
              const Process& body = defs_.lookup(c.name);
              if (!is_standard(body, defs_)) out = rev(body, unfold + 1);
            },
            [&](const Prefix& x) {
              if (!x.key) return;
              if (x.actions.size() <= opt_.max_width && is_standard(x.body, defs_))
                out.push_back({atom_events(x.actions, x.key->value), mk::prefix(x.actions, x.body), 0});
              wrap(rev(x.body), [&](const Process& b) { return mk::prefix(x.actions, b, x.key); });
            },
            [&](const Suffix& x) {
              if (!x.key) {
                wrap(rev(x.body), [&](const Process& b) { return mk::suffix(b, x.actions); });
                return;
              }
              if (x.actions.size() <= opt_.max_width && is_fully_executed(x.body, defs_))
                out.push_back({atom_events(x.actions, x.key->value), mk::suffix(x.body, x.actions), 0});
            },
            [&](const Seq& x) {
              if (is_fully_executed(x.left, defs_))
                wrap(rev(x.right), [&](const Process& r) { return mk::seq(x.left, r); });
              if (is_standard(x.right, defs_))
                wrap(rev(x.left), [&](const Process& l) { return mk::seq(l, x.right); });
            },
            [&](const Sum& x) {
              bool ls = is_standard(x.left, defs_);
              bool rs = is_standard(x.right, defs_);
              if (rs) wrap(rev(x.left), [&](const Process& l) { return mk::sum(l, x.right); });
              if (ls) wrap(rev(x.right), [&](const Process& r) { return mk::sum(x.left, r); });
              if (!ls && !rs) {
                // Both alternatives executed: undoing one discards the other.
                if (is_fully_executed(x.right, defs_)) {
                  Process reset = erase_keys(x.right);
                  wrap(rev(x.left), [&](const Process& l) { return mk::sum(l, reset); });
                }
                if (is_fully_executed(x.left, defs_)) {
                  Process reset = erase_keys(x.left);
                  wrap(rev(x.right), [&](const Process& r) { return mk::sum(reset, r); });
                }
              }
            },
            [&](const Par& x) { out = rev_par(x); },
            [&](const Restrict& x) {
              for (auto& m : rev(x.body)) {
                bool ok = std::none_of(m.events.begin(), m.events.end(),
                                       [&](const Event& e) { return restricted(x.labels, e.action); });
                if (!ok) continue;
                m.target = mk::restrict(m.target, x.labels);
                out.push_back(std::move(m));
              }
            },
            [&](const Relabel& x) {
              for (auto& m : rev(x.body)) {
                for (auto& e : m.events) e.action = x.map.apply(e.action);
                m.target = mk::relabel(m.target, x.map);
                out.push_back(std::move(m));
              }
            },
        },
        static_cast<const Node::variant&>(p.node()));
    return out;
  }

 private:
  const Definitions& defs_;
  SosOptions opt_;

  std::vector<Move> fwd_par(const Par& x) {
    std::vector<Move> out;
    auto lm = fwd(x.left);
    auto rm = fwd(x.right);
    for (const auto& m : lm) out.push_back({m.events, mk::par(m.target, x.right), m.placeholders});
    for (auto m : rm) {
      m.target = mk::par(x.left, m.target);
      out.push_back(std::move(m));
    }
    for (const auto& a : lm) {
      for (const auto& b : rm) {
        std::vector<int> lmatch(a.events.size(), -1);
        std::vector<bool> rmatched(b.events.size(), false);
        enumerate_matchings(a, b, 0, lmatch, rmatched, out);
      }
    }
    return out;
  }

  void enumerate_matchings(const Move& a, const Move& b, std::size_t i, std::vector<int>& lmatch,
                           std::vector<bool>& rmatched, std::vector<Move>& out) {
    if (i == a.events.size()) {
      emit_forward_combination(a, b, lmatch, rmatched, out);
      return;
    }
    enumerate_matchings(a, b, i + 1, lmatch, rmatched, out);
    if (!a.events[i].syncable()) return;
    for (std::size_t j = 0; j < b.events.size(); ++j) {
      if (rmatched[j] || !b.events[j].syncable() || !a.events[i].action.complements(b.events[j].action)) continue;
      lmatch[i] = static_cast<int>(j);
      rmatched[j] = true;
      enumerate_matchings(a, b, i + 1, lmatch, rmatched, out);
      lmatch[i] = -1;
      rmatched[j] = false;
    }
  }

  void emit_forward_combination(const Move& a, const Move& b, const std::vector<int>& lmatch,
                                const std::vector<bool>& rmatched, std::vector<Move>& out) {
    std::size_t matches = std::count(rmatched.begin(), rmatched.end(), true);
    if (a.events.size() + b.events.size() - matches > opt_.max_width) return;
    std::uint32_t shift = a.placeholders;
    std::map<std::uint32_t, std::uint32_t> merge;
    Move m;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
      Event e = a.events[i];
      if (lmatch[i] >= 0) {
        merge[b.events[lmatch[i]].key] = e.key;
        e.action = Action::tau();
        e.sync = true;
      }
      m.events.push_back(e);
    }
    for (std::size_t j = 0; j < b.events.size(); ++j) {
      if (rmatched[j]) continue;
      Event e = b.events[j];
      e.key += shift;
      m.events.push_back(e);
    }
    m.target = mk::par(a.target, shift_placeholders(b.target, shift, merge));
    m.placeholders = a.placeholders + b.placeholders;
    out.push_back(std::move(m));
  }

  std::vector<Move> rev_par(const Par& x) {
    std::vector<Move> out;
    auto lm = rev(x.left);
    auto rm = rev(x.right);
    auto lkeys = keys_of(x.left);
    auto rkeys = keys_of(x.right);
    auto alone = [](const Move& m, const std::set<std::uint32_t>& other) {
      return std::none_of(m.events.begin(), m.events.end(), [&](const Event& e) { return other.contains(e.key); });
    };
    bool strict = opt_.strict_reverse_composition;
    for (const auto& m : lm) {
      if (alone(m, rkeys) && (!strict || rm.empty())) out.push_back({m.events, mk::par(m.target, x.right), 0});
    }
    for (const auto& m : rm) {
      if (alone(m, lkeys) && (!strict || lm.empty())) out.push_back({m.events, mk::par(x.left, m.target), 0});
    }
    for (const auto& a : lm) {
      for (const auto& b : rm) {
        std::vector<int> lmatch(a.events.size(), -1);
        std::vector<bool> rmatched(b.events.size(), false);
        bool ok = true;
        for (std::size_t i = 0; i < a.events.size() && ok; ++i) {
          if (!rkeys.contains(a.events[i].key)) continue;
          ok = false;
          for (std::size_t j = 0; j < b.events.size(); ++j) {
            if (b.events[j].key != a.events[i].key) continue;
            if (rmatched[j] || !a.events[i].syncable() || !b.events[j].syncable() ||
                !a.events[i].action.complements(b.events[j].action))
              break;
            lmatch[i] = static_cast<int>(j);
            rmatched[j] = true;
            ok = true;
            break;
          }
        }
        for (std::size_t j = 0; j < b.events.size() && ok; ++j) {
          if (lkeys.contains(b.events[j].key) && !rmatched[j]) ok = false;
        }
        if (!ok) continue;
        std::size_t matches = std::count(rmatched.begin(), rmatched.end(), true);
        if (a.events.size() + b.events.size() - matches > opt_.max_width) continue;
        Move m;
        for (std::size_t i = 0; i < a.events.size(); ++i) {
          Event e = a.events[i];
          if (lmatch[i] >= 0) {
            e.action = Action::tau();
            e.sync = true;
          }
          m.events.push_back(e);
        }
        for (std::size_t j = 0; j < b.events.size(); ++j) {
          if (!rmatched[j]) m.events.push_back(b.events[j]);
        }
        m.target = mk::par(a.target, b.target);
        out.push_back(std::move(m));
      }
    }
    return out;
  }
};

StepLabel make_label(const std::vector<Event>& events, const std::map<std::uint32_t, std::uint32_t>* rename) {
  StepLabel l;
  for (const auto& e : events) {
    std::uint32_t k = rename ? rename->at(e.key) : e.key;
    l.events.push_back({e.action, Key{k}});
    if (e.sync) l.sync_keys.insert(Key{k});
  }
  return l;
}

// Two concurrent events with complementary labels must synchronise, so a
// step may not hold both unmatched. Checked on the whole step rather than at
// each composition, since an enclosing composition may still pair one of them
// off: c.b | (b | ~b) undoes {b, tau} by pairing the inner ~b with c.b's b.
bool unmatched_complements(const std::vector<Event>& es) {
  for (std::size_t i = 0; i < es.size(); ++i)
    for (std::size_t j = i + 1; j < es.size(); ++j)
      if (es[i].key != es[j].key && !es[i].sync && !es[j].sync && es[i].action.complements(es[j].action))
        return true;
  return false;
}

void finish(std::vector<Transition>& ts) {
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
}

}  // namespace

std::vector<Transition> forward_steps(const Process& p, const Definitions& defs, const SosOptions& opt) {
  if (opt.max_width == 0) throw Error("step width must be at least 1");
  Deriver d(defs, opt);
  std::uint32_t base = std::max(max_key(p), defs.max_key());
  if (base >= kPlaceholder - 1024) throw Error("key space exhausted");
  std::vector<Transition> out;
  for (auto& m : d.fwd(p)) {
    if (!opt.open && unmatched_complements(m.events)) continue;
    std::map<std::uint32_t, std::uint32_t> fresh;
    for (const auto& e : m.events) {
      if (!fresh.contains(e.key)) {
        auto k = static_cast<std::uint32_t>(base + 1 + fresh.size());
        fresh.emplace(e.key, k);
      }
    }
    Process target = rename_keys(m.target, [&](std::uint32_t k) { return k < kPlaceholder ? k : fresh.at(k); });
    out.push_back({p, make_label(m.events, &fresh), Direction::forward, std::move(target)});
  }
  finish(out);
  return out;
}

std::vector<Transition> reverse_steps(const Process& p, const Definitions& defs, const SosOptions& opt) {
  if (opt.max_width == 0) throw Error("step width must be at least 1");
  Deriver d(defs, opt);
  std::vector<Transition> out;
  for (auto& m : d.rev(p)) {
    if (!opt.open && unmatched_complements(m.events)) continue;
    out.push_back({p, make_label(m.events, nullptr), Direction::reverse, std::move(m.target)});
  }
  finish(out);
  return out;
}

namespace {

bool silent(const StepLabel& l) {
  return std::all_of(l.events.begin(), l.events.end(), [](const KeyedAction& e) { return e.action.is_tau(); });
}

WeakResult weak_steps(const Process& p, const Definitions& defs, const SosOptions& opt, std::size_t budget,
                      Direction dir) {
  WeakResult res;
  std::size_t visited = 0;
  auto strong = [&](const Process& q) {
    return dir == Direction::forward ? forward_steps(q, defs, opt) : reverse_steps(q, defs, opt);
  };
  auto closure = [&](const Process& from) {
    std::vector<Process> seen{from};
    std::set<Process> set{from};
    std::deque<Process> queue{from};
    while (!queue.empty()) {
      Process q = queue.front();
      queue.pop_front();
      for (const auto& t : strong(q)) {
        if (!silent(t.label) || set.contains(t.target)) continue;
        if (++visited > budget) {
          res.truncated = true;
          return seen;
        }
        set.insert(t.target);
        seen.push_back(t.target);
        queue.push_back(t.target);
      }
    }
    return seen;
  };
  for (const auto& s : closure(p)) {
    for (const auto& t : strong(s)) {
      if (silent(t.label)) continue;
      StepLabel visible;
      for (const auto& e : t.label.events) {
        if (!e.action.is_tau()) visible.events.push_back(e);
      }
      for (const auto& u : closure(t.target)) res.transitions.push_back({p, visible, dir, u});
    }
  }
  finish(res.transitions);
  return res;
}

}  // namespace

WeakResult weak_forward_steps(const Process& p, const Definitions& defs, const SosOptions& opt, std::size_t budget) {
  return weak_steps(p, defs, opt, budget, Direction::forward);
}

WeakResult weak_reverse_steps(const Process& p, const Definitions& defs, const SosOptions& opt, std::size_t budget) {
  return weak_steps(p, defs, opt, budget, Direction::reverse);
}

}  // namespace rctc
