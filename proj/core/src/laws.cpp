#include "rctc/laws.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

namespace rctc {

namespace {

std::size_t uniform(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

// Random composition of `total` into k parts, each possibly zero.
std::vector<std::size_t> split(std::mt19937_64& rng, std::size_t total, std::size_t k) {
  std::vector<std::size_t> parts(k, 0);
  for (std::size_t i = 0; i < total; ++i) ++parts[uniform(rng, 0, k - 1)];
  return parts;
}

std::set<std::string> sort_names(const Process& p) {
  std::set<std::string> out;
  for (const auto& l : sort(p).labels) out.insert(l.name());
  return out;
}

Process run_forward(const Process& p, std::size_t steps, std::mt19937_64& rng, const Definitions& defs,
                    std::size_t width) {
  Process q = p;
  for (std::size_t i = 0; i < steps; ++i) {
    auto ts = forward_steps(q, defs, width);
    if (ts.empty()) break;
    q = ts[uniform(rng, 0, ts.size() - 1)].target;
  }
  return q;
}

constexpr std::size_t kExecWidth = 8;

}  // namespace

// ---------------------------------------------------------------- generator

std::string TermGenerator::name() {
  std::size_t n = std::clamp<std::size_t>(cfg_.alphabet, 1, 26);
  return std::string(1, static_cast<char>('a' + uniform(rng_, 0, n - 1)));
}

Label TermGenerator::label() { return Label(name(), coin(rng_, 0.35)); }

Action TermGenerator::action(bool visible_only) {
  if (cfg_.include_tau && !visible_only && coin(rng_, 0.2)) return Action::tau();
  return Action(label());
}

LabelSet TermGenerator::label_set(std::size_t max_size) {
  LabelSet out;
  std::size_t n = uniform(rng_, 1, std::max<std::size_t>(max_size, 1));
  for (std::size_t i = 0; i < n; ++i) out.insert(Label(name()));
  return out;
}

RelabelMap TermGenerator::relabel_map(std::size_t max_size) {
  RelabelMap f;
  std::size_t n = uniform(rng_, 1, std::max<std::size_t>(max_size, 1));
  for (std::size_t i = 0; i < n; ++i) {
    std::string from = name();
    f.set(from, label());
  }
  return f;
}

Process TermGenerator::gen(std::size_t depth, std::size_t budget, std::size_t par_left) {
  if (depth == 0 || budget == 0) {
    return budget > 0 && coin(rng_) ? mk::prefix(action(), mk::nil()) : mk::nil();
  }
  enum Kind { kNil, kPrefix, kMulti, kSum, kPar, kRestrict, kRelabel, kSeq, kSuffix };
  std::vector<double> w(9, 0.0);
  w[kNil] = 1;
  w[kPrefix] = 5;
  w[kSum] = 2;
  if (cfg_.include_multi && budget >= 2) w[kMulti] = 1;
  if (par_left > 1 && budget >= 2) w[kPar] = 2;
  if (cfg_.include_static) w[kRestrict] = w[kRelabel] = 1;
  if (cfg_.include_seq) {
    w[kSuffix] = 1;
    if (budget >= 2) w[kSeq] = 1;
  }
  std::discrete_distribution<int> pick(w.begin(), w.end());
  switch (pick(rng_)) {
    case kNil:
      return mk::nil();
    case kPrefix:
      return mk::prefix(action(), gen(depth - 1, budget - 1, par_left));
    case kMulti: {
      std::size_t n = uniform(rng_, 2, std::min<std::size_t>(budget, 3));
      std::vector<Action> acts;
      for (std::size_t i = 0; i < n; ++i) acts.push_back(action());
      return mk::prefix(acts, gen(depth - 1, budget - n, par_left));
    }
    case kSum: {
      auto b = split(rng_, budget, 2);
      return mk::sum(gen(depth - 1, b[0], par_left), gen(depth - 1, b[1], par_left));
    }
    case kPar: {
      auto b = split(rng_, budget, 2);
      return mk::par(gen(depth - 1, b[0], 1), gen(depth - 1, b[1], par_left - 1));
    }
    case kRestrict:
      return mk::restrict(gen(depth - 1, budget, par_left), label_set(2));
    case kRelabel:
      return mk::relabel(gen(depth - 1, budget, par_left), relabel_map(2));
    case kSeq: {
      auto b = split(rng_, budget, 2);
      return mk::seq(gen(depth - 1, b[0], par_left), gen(depth - 1, b[1], par_left));
    }
    default:
      return mk::suffix(gen(depth - 1, budget - 1, par_left), {action()});
  }
}

Process TermGenerator::next(std::size_t actions) {
  Process p = gen(cfg_.max_depth, actions, std::max<std::size_t>(cfg_.max_par, 1));
  if (cfg_.include_keys) p = run_forward(p, uniform(rng_, 0, action_count(p)), rng_, {}, kExecWidth);
  return p;
}

Process TermGenerator::next() { return next(cfg_.max_actions); }

std::vector<Process> gen_terms(const GenConfig& cfg, std::size_t count) {
  TermGenerator g(cfg);
  std::vector<Process> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(g.next());
  return out;
}

std::optional<Process> execute(const Process& p, std::mt19937_64& rng, const Definitions& defs) {
  for (int attempt = 0; attempt < 16; ++attempt) {
    Process q = p;
    for (int i = 0; i < 256; ++i) {
      auto ts = forward_steps(q, defs, kExecWidth);
      if (ts.empty()) break;
      q = ts[uniform(rng, 0, ts.size() - 1)].target;
    }
    if (is_fully_executed(q, defs)) return q;
  }
  return std::nullopt;
}

Process partially_execute(const Process& p, std::size_t steps, std::mt19937_64& rng, const Definitions& defs) {
  return run_forward(p, steps, rng, defs, kExecWidth);
}

// ---------------------------------------------------------------- expansion

namespace {

Process component_term(const Component& c) { return c.map.pairs().empty() ? c.term : mk::relabel(c.term, c.map); }

struct CEvent {
  std::size_t comp;
  Action action;
  std::uint32_t key;
  bool syncable;
};

std::vector<CEvent> step_events(std::size_t comp, const Transition& t) {
  std::vector<CEvent> out;
  for (const auto& e : t.label.events) {
    auto same = std::count_if(t.label.events.begin(), t.label.events.end(),
                              [&](const KeyedAction& o) { return o.key == e.key; });
    bool syncable = !e.action.is_tau() && same == 1 && !t.label.sync_keys.contains(e.key);
    out.push_back({comp, e.action, e.key.value, syncable});
  }
  return out;
}

bool blocked(const LabelSet& L, const Action& a) {
  return !a.is_tau() && (L.contains(a.label()) || L.contains(a.label().complement()));
}

// Validity shared by both directions once a matching is fixed.
bool admissible(const std::vector<CEvent>& ev, const std::vector<int>& match, const LabelSet& L,
                std::size_t max_width) {
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (match[i] >= 0) {
      if (static_cast<std::size_t>(match[i]) > i) ++pairs;
      continue;
    }
    if (blocked(L, ev[i].action)) return false;
    for (std::size_t j = i + 1; j < ev.size(); ++j) {
      bool same_atom = ev[i].comp == ev[j].comp && ev[i].key == ev[j].key;
      if (match[j] < 0 && !same_atom && ev[i].action.complements(ev[j].action)) return false;
    }
  }
  return ev.size() - pairs <= max_width;
}

std::vector<Action> joint_actions(const std::vector<CEvent>& ev, const std::vector<int>& match) {
  std::vector<Action> acts;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    if (match[i] < 0) acts.push_back(ev[i].action);
    else if (static_cast<std::size_t>(match[i]) > i) acts.push_back(Action::tau());
  }
  return acts;
}

void forward_matchings(const std::vector<CEvent>& ev, std::size_t i, std::vector<int>& match,
                       const std::function<void()>& emit) {
  if (i == ev.size()) {
    emit();
    return;
  }
  if (match[i] >= 0) {
    forward_matchings(ev, i + 1, match, emit);
    return;
  }
  forward_matchings(ev, i + 1, match, emit);
  if (!ev[i].syncable) return;
  for (std::size_t j = i + 1; j < ev.size(); ++j) {
    if (match[j] >= 0 || !ev[j].syncable || ev[j].comp == ev[i].comp || !ev[i].action.complements(ev[j].action))
      continue;
    match[i] = static_cast<int>(j);
    match[j] = static_cast<int>(i);
    forward_matchings(ev, i + 1, match, emit);
    match[i] = match[j] = -1;
  }
}

Process sum_of(const std::vector<Process>& summands) {
  if (summands.empty()) return mk::nil();
  Process out = summands.front();
  for (std::size_t i = 1; i < summands.size(); ++i) out = mk::sum(out, summands[i]);
  return out;
}

Process par_of(const std::vector<Process>& ps, const LabelSet& L) {
  Process out = ps.back();
  for (std::size_t i = ps.size() - 1; i-- > 0;) out = mk::par(ps[i], out);
  return L.empty() ? out : mk::restrict(out, L);
}

}  // namespace

Process compose(const std::vector<Component>& cs, const LabelSet& restriction) {
  if (cs.empty()) throw Error("compose: no components");
  std::vector<Process> ps;
  for (const auto& c : cs) ps.push_back(component_term(c));
  return par_of(ps, restriction);
}

std::optional<std::vector<Component>> decompose(const Process& p, const std::vector<Component>& shape,
                                                const LabelSet& restriction) {
  Process cur = p;
  if (!restriction.empty()) {
    auto r = cur.as<Restrict>();
    if (!r || r->labels != restriction) return std::nullopt;
    cur = r->body;
  }
  std::vector<Component> out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    Process here = cur;
    if (i + 1 < shape.size()) {
      auto x = cur.as<Par>();
      if (!x) return std::nullopt;
      here = x->left;
      cur = x->right;
    }
    if (shape[i].map.pairs().empty()) {
      out.push_back({here, {}});
    } else {
      auto r = here.as<Relabel>();
      if (!r || r->map != shape[i].map) return std::nullopt;
      out.push_back({r->body, r->map});
    }
  }
  return out;
}

Process expansion_rhs(const std::vector<Component>& cs, const LabelSet& restriction, std::size_t max_width,
                      Direction dir, const Definitions& defs) {
  const std::size_t n = cs.size();
  std::vector<Process> terms;
  std::vector<std::vector<Transition>> steps;
  std::vector<std::set<std::uint32_t>> keys;
  for (const auto& c : cs) {
    terms.push_back(component_term(c));
    SosOptions opt{max_width, false, true};
    steps.push_back(dir == Direction::forward ? forward_steps(terms.back(), defs, opt)
                                              : reverse_steps(terms.back(), defs, opt));
    keys.push_back(keys_of(terms.back()));
  }
  std::vector<Process> summands;
  std::vector<int> choice(n, -1);

  auto emit_forward = [&](const std::vector<CEvent>& ev) {
    std::vector<int> match(ev.size(), -1);
    forward_matchings(ev, 0, match, [&] {
      if (!admissible(ev, match, restriction, max_width)) return;
      std::vector<Process> cont;
      for (std::size_t i = 0; i < n; ++i) {
        cont.push_back(choice[i] < 0 ? terms[i] : forward_residual(steps[i][choice[i]].target, defs));
      }
      summands.push_back(mk::prefix(joint_actions(ev, match), par_of(cont, restriction)));
    });
  };

  auto emit_reverse = [&](const std::vector<CEvent>& ev) {
    // Keys shared with another component force the synchronisation partner.
    std::vector<int> match(ev.size(), -1);
    for (std::size_t i = 0; i < ev.size(); ++i) {
      for (std::size_t c = 0; c < n; ++c) {
        if (c == ev[i].comp || !keys[c].contains(ev[i].key)) continue;
        bool found = false;
        for (std::size_t j = 0; j < ev.size(); ++j) {
          if (ev[j].comp != c || ev[j].key != ev[i].key) continue;
          if (!ev[i].syncable || !ev[j].syncable || !ev[i].action.complements(ev[j].action)) return;
          match[i] = static_cast<int>(j);
          found = true;
          break;
        }
        if (!found) return;
      }
    }
    if (!admissible(ev, match, restriction, max_width)) return;
    std::vector<Process> body;
    for (std::size_t i = 0; i < n; ++i) {
      body.push_back(reverse_residual(choice[i] < 0 ? terms[i] : steps[i][choice[i]].target, defs));
    }
    summands.push_back(mk::suffix(par_of(body, restriction), joint_actions(ev, match), Key{1}));
  };

  std::function<void(std::size_t)> choose = [&](std::size_t i) {
    if (i == n) {
      std::vector<CEvent> ev;
      for (std::size_t c = 0; c < n; ++c) {
        if (choice[c] < 0) continue;
        auto e = step_events(c, steps[c][choice[c]]);
        ev.insert(ev.end(), e.begin(), e.end());
      }
      if (ev.empty()) return;
      if (dir == Direction::forward) emit_forward(ev);
      else emit_reverse(ev);
      return;
    }
    choice[i] = -1;
    choose(i + 1);
    for (std::size_t s = 0; s < steps[i].size(); ++s) {
      choice[i] = static_cast<int>(s);
      choose(i + 1);
    }
    choice[i] = -1;
  };
  choose(0);

  if (dir == Direction::reverse) {
    // Each summand gets its own key range so keys never pair up across
    // alternatives; the suffix key is the top of the range.
    std::uint32_t top = 0;
    for (const auto& t : terms) top = std::max(top, max_key(t));
    std::uint32_t stride = top + 2;
    for (std::size_t j = 0; j < summands.size(); ++j) {
      std::uint32_t base = static_cast<std::uint32_t>(j) * stride;
      const auto& s = *summands[j].as<Suffix>();
      Process body = rename_keys(s.body, [&](std::uint32_t k) { return base + k; });
      summands[j] = mk::suffix(body, s.actions, Key{base + stride - 1});
    }
  }
  return sum_of(summands);
}

// ---------------------------------------------------------------- registry

const char* to_string(Expect e) {
  switch (e) {
    case Expect::equivalent: return "equivalent";
    case Expect::inequivalent: return "inequivalent";
    case Expect::disputed: return "disputed";
  }
  return "?";
}

namespace {

using Inst = std::optional<Instance>;
using Maker = std::function<Inst(TermGenerator&, const Bounds&)>;

Instance pair(Process l, Process r) { return Instance{std::move(l), std::move(r), {}}; }

std::size_t budget(const TermGenerator& g) { return std::max<std::size_t>(g.config().max_actions, 1); }

std::size_t less_one(std::size_t b, std::size_t by = 1) { return b > by ? b - by : 0; }

// A fully executed term drawn from the generator; nullopt if none of a few
// draws could run to completion.
std::optional<Process> executed(TermGenerator& g, std::size_t actions) {
  for (int i = 0; i < 8; ++i) {
    if (auto x = execute(g.next(actions), g.rng())) return x;
  }
  return std::nullopt;
}

std::vector<Action> multi(TermGenerator& g) { return {g.action(), g.action()}; }

Key key_above(const Process& p, std::uint32_t by = 1) { return Key{max_key(p) + by}; }

Maker monoid(int n) {
  return [n](TermGenerator& g, const Bounds&) -> Inst {
    std::size_t b = budget(g);
    switch (n) {
      case 1: {
        auto p = g.next(b), q = g.next(b);
        return pair(mk::sum(p, q), mk::sum(q, p));
      }
      case 2: {
        auto p = g.next(b), q = g.next(b), r = g.next(b);
        return pair(mk::sum(p, mk::sum(q, r)), mk::sum(mk::sum(p, q), r));
      }
      case 3: {
        auto p = g.next(b);
        return pair(mk::sum(p, p), p);
      }
      default: {
        auto p = g.next(b);
        return pair(mk::sum(p, mk::nil()), p);
      }
    }
  };
}

Maker static_law(int n) {
  return [n](TermGenerator& g, const Bounds&) -> Inst {
    std::size_t b = budget(g);
    switch (n) {
      case 1: {
        auto s = split(g.rng(), b, 2);
        auto p = g.next(s[0]), q = g.next(s[1]);
        return pair(mk::par(p, q), mk::par(q, p));
      }
      case 2: {
        auto s = split(g.rng(), b, 3);
        auto p = g.next(s[0]), q = g.next(s[1]), r = g.next(s[2]);
        return pair(mk::par(p, mk::par(q, r)), mk::par(mk::par(p, q), r));
      }
      case 3: {
        auto p = g.next(b);
        return pair(mk::par(p, mk::nil()), p);
      }
      case 4: {
        auto p = g.next(b);
        auto used = sort_names(p);
        LabelSet L;
        for (const auto& l : g.label_set(3)) {
          if (!used.contains(l.name())) L.insert(l);
        }
        return pair(mk::restrict(p, L), p);
      }
      case 5: {
        auto p = g.next(b);
        auto K = g.label_set(2), L = g.label_set(2);
        LabelSet KL = K;
        KL.insert(L.begin(), L.end());
        return pair(mk::restrict(mk::restrict(p, K), L), mk::restrict(p, KL));
      }
      case 6: {
        auto p = g.next(b);
        auto f = g.relabel_map(2);
        auto L = g.label_set(2);
        LabelSet inverse;
        for (const auto& name : sort_names(p)) {
          auto image = f.apply(Label(name));
          if (L.contains(Label(image.name()))) inverse.insert(Label(name));
        }
        return pair(mk::restrict(mk::relabel(p, f), L), mk::relabel(mk::restrict(p, inverse), f));
      }
      case 7: {
        for (int attempt = 0; attempt < 64; ++attempt) {
          auto s = split(g.rng(), b, 2);
          auto p = g.next(s[0]), q = g.next(s[1]);
          auto L = g.label_set(2);
          auto sq = sort(q).labels;
          bool ok = true;
          for (const auto& l : sort(p).labels) {
            if (sq.contains(l.complement()) && (L.contains(Label(l.name())))) ok = false;
          }
          if (ok) return pair(mk::restrict(mk::par(p, q), L), mk::par(mk::restrict(p, L), mk::restrict(q, L)));
        }
        return std::nullopt;
      }
      case 8: {
        auto p = g.next(b);
        return pair(mk::relabel(p, RelabelMap{}), p);
      }
      case 9: {
        auto p = g.next(b);
        auto f = g.relabel_map(2);
        auto used = sort_names(p);
        RelabelMap f2;
        for (const auto& [from, to] : f.pairs()) {
          if (used.contains(from)) f2.set(from, to);
        }
        for (std::size_t i = 0; i < g.config().alphabet; ++i) {
          std::string name(1, static_cast<char>('a' + i));
          if (!used.contains(name) && coin(g.rng())) f2.set(name, g.label());
        }
        return pair(mk::relabel(p, f), mk::relabel(p, f2));
      }
      case 10: {
        auto p = g.next(b);
        auto f = g.relabel_map(2), f2 = g.relabel_map(2);
        return pair(mk::relabel(mk::relabel(p, f), f2), mk::relabel(p, f.then(f2)));
      }
      default: {
        auto s = split(g.rng(), b, 2);
        auto p = g.next(s[0]), q = g.next(s[1]);
        std::vector<std::string> names;
        for (std::size_t i = 0; i < std::clamp<std::size_t>(g.config().alphabet, 1, 26); ++i) {
          names.emplace_back(1, static_cast<char>('a' + i));
        }
        auto image = names;
        std::shuffle(image.begin(), image.end(), g.rng());
        RelabelMap f;
        for (std::size_t i = 0; i < names.size(); ++i) f.set(names[i], Label(image[i], coin(g.rng())));
        return pair(mk::relabel(mk::par(p, q), f), mk::par(mk::relabel(p, f), mk::relabel(q, f)));
      }
    }
  };
}

Inst milner(TermGenerator& g, const Bounds&) {
  Action a = g.action(true), b = g.action(true);
  for (int i = 0; i < 64 && a.label().name() == b.label().name(); ++i) b = g.action(true);
  if (a.label().name() == b.label().name()) return std::nullopt;
  return pair(mk::par(mk::prefix(a, mk::nil()), mk::prefix(b, mk::nil())),
              mk::sum(mk::prefix(a, mk::prefix(b, mk::nil())), mk::prefix(b, mk::prefix(a, mk::nil()))));
}

std::pair<std::vector<Component>, LabelSet> components(TermGenerator& g) {
  std::size_t n = uniform(g.rng(), 1, 3);
  auto s = split(g.rng(), budget(g), n);
  std::vector<Component> cs;
  for (std::size_t i = 0; i < n; ++i) {
    Component c{g.next(s[i]), {}};
    if (coin(g.rng())) c.map = g.relabel_map(2);
    cs.push_back(std::move(c));
  }
  LabelSet L;
  if (coin(g.rng())) L = g.label_set(2);
  return {cs, L};
}

Inst expansion_forward(TermGenerator& g, const Bounds& bounds) {
  auto [cs, L] = components(g);
  return pair(compose(cs, L), expansion_rhs(cs, L, bounds.max_width, Direction::forward));
}

Inst expansion_reverse(TermGenerator& g, const Bounds& bounds) {
  auto [cs, L] = components(g);
  Process x = run_forward(compose(cs, L), uniform(g.rng(), 1, budget(g)), g.rng(), {}, bounds.max_width);
  auto now = decompose(x, cs, L);
  if (!now) throw Error("expansion: forward step broke the composition skeleton");
  return pair(x, expansion_rhs(*now, L, bounds.max_width, Direction::reverse));
}

Maker tau_law(int n) {
  return [n](TermGenerator& g, const Bounds&) -> Inst {
    std::size_t b = budget(g);
    const Action tau = Action::tau();
    switch (n) {
      case 1: {
        auto p = g.next(less_one(b));
        return pair(p, mk::prefix(tau, p));
      }
      case 2: {
        auto x = executed(g, less_one(b));
        if (!x) return std::nullopt;
        return pair(*x, mk::suffix(*x, {tau}, key_above(*x)));
      }
      case 3: {
        auto p = g.next(less_one(b, 2));
        auto a = g.action();
        return pair(mk::prefix(a, mk::prefix(tau, p)), mk::prefix(a, p));
      }
      case 4: {
        auto x = executed(g, less_one(b, 2));
        if (!x) return std::nullopt;
        auto a = g.action();
        return pair(mk::suffix(mk::suffix(*x, {tau}, key_above(*x)), {a}, key_above(*x, 2)),
                    mk::suffix(*x, {a}, key_above(*x, 2)));
      }
      case 5: {
        auto p = g.next(less_one(b, 3));
        auto as = multi(g);
        return pair(mk::prefix(as, mk::prefix(tau, p)), mk::prefix(as, p));
      }
      case 6: {
        auto x = executed(g, less_one(b, 3));
        if (!x) return std::nullopt;
        auto as = multi(g);
        return pair(mk::suffix(mk::suffix(*x, {tau}, key_above(*x)), as, key_above(*x, 2)),
                    mk::suffix(*x, as, key_above(*x, 2)));
      }
      case 7: {
        auto p = g.next(less_one(b));
        return pair(mk::sum(p, mk::prefix(tau, p)), mk::prefix(tau, p));
      }
      case 8: {
        auto p = g.next(less_one(b));
        auto x = execute(p, g.rng());
        if (!x) return std::nullopt;
        auto k = key_above(*x);
        Process rhs = mk::suffix(*x, {tau}, k);
        // Either summand may be the one that ran (the left one only if it did
        // anything, or the state would not be reachable).
        if (!is_standard(*x) && coin(g.rng())) return pair(mk::sum(*x, mk::suffix(p, {tau})), rhs);
        return pair(mk::sum(p, rhs), rhs);
      }
      case 9:
      case 11: {
        auto s = less_one(b, n == 9 ? 2 : 3);
        auto p = g.next(s), q = g.next(s);
        auto as = n == 9 ? std::vector<Action>{g.action()} : multi(g);
        return pair(mk::prefix(as, mk::sum(mk::prefix(tau, mk::sum(p, q)), p)), mk::prefix(as, mk::sum(p, q)));
      }
      case 10:
      case 12: {
        auto s = less_one(b, n == 10 ? 2 : 3);
        auto p = g.next(s), q = g.next(s);
        auto as = n == 10 ? std::vector<Action>{g.action()} : multi(g);
        Process pq = mk::sum(p, q);
        auto x = execute(p, g.rng());
        if (!x) return std::nullopt;
        if (is_standard(*x) || coin(g.rng())) {
          // ran through the inner P + Q
          auto y = execute(pq, g.rng());
          if (!y) return std::nullopt;
          Key k = key_above(*y), m = key_above(*y, 2);
          return pair(mk::suffix(mk::sum(mk::suffix(*y, {tau}, k), p), as, m), mk::suffix(*y, as, m));
        }
        // ran through the outer P
        Key m = key_above(*x);
        return pair(mk::suffix(mk::sum(mk::suffix(pq, {tau}), *x), as, m), mk::suffix(mk::sum(*x, q), as, m));
      }
      default: {
        auto p = g.next(less_one(b));
        return pair(p, mk::par(mk::prefix(tau, mk::nil()), p));
      }
    }
  };
}

// ---------------------------------------------------------------- congruence

enum class Ctx { constant, prefix, multi_prefix, suffix, multi_suffix, sum, par, restrict, relabel };

// Related fully executed states of a verified pair, for the past contexts.
std::vector<std::pair<Process, Process>> done_pairs(const Verdict& v) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (const auto& pr : v.pairs) seen.insert(pr);
  for (const auto& t : v.triples) seen.insert({t.left, t.right});
  std::vector<std::pair<Process, Process>> out;
  for (auto [a, b] : seen) {
    const auto& l = v.left->states[a];
    const auto& r = v.right->states[b];
    if (l.history.size() == 0 || r.history.size() == 0) continue;
    if (is_fully_executed(l.term) && is_fully_executed(r.term)) out.push_back({l.term, r.term});
  }
  return out;
}

Mode context_mode(Ctx c) {
  switch (c) {
    case Ctx::prefix:
    case Ctx::multi_prefix: return Mode::forward;
    case Ctx::suffix:
    case Ctx::multi_suffix: return Mode::reverse;
    default: return Mode::forward_reverse;
  }
}

// Wraps a verified pair; nullopt when the context has no admissible filling.
Inst in_context(Ctx c, const Process& p1, const Process& p2, const Verdict& v, TermGenerator& g) {
  switch (c) {
    case Ctx::constant: {
      Instance inst = pair(mk::constant("A"), p1);
      inst.defs.define("A", p1);
      return inst;
    }
    case Ctx::prefix: {
      auto a = g.action();
      return pair(mk::prefix(a, p1), mk::prefix(a, p2));
    }
    case Ctx::multi_prefix: {
      auto as = multi(g);
      return pair(mk::prefix(as, p1), mk::prefix(as, p2));
    }
    case Ctx::suffix:
    case Ctx::multi_suffix: {
      auto done = done_pairs(v);
      if (done.empty()) return std::nullopt;
      auto [x1, x2] = done[uniform(g.rng(), 0, done.size() - 1)];
      auto as = c == Ctx::suffix ? std::vector<Action>{g.action()} : multi(g);
      Key k{std::max(max_key(x1), max_key(x2)) + 1};
      return pair(mk::suffix(x1, as, k), mk::suffix(x2, as, k));
    }
    case Ctx::sum: {
      auto q = g.next(1);
      return pair(mk::sum(p1, q), mk::sum(p2, q));
    }
    case Ctx::par: {
      auto q = g.next(1);
      return pair(mk::par(p1, q), mk::par(p2, q));
    }
    case Ctx::restrict: {
      auto L = g.label_set(2);
      return pair(mk::restrict(p1, L), mk::restrict(p2, L));
    }
    default: {
      auto f = g.relabel_map(2);
      return pair(mk::relabel(p1, f), mk::relabel(p2, f));
    }
  }
}

// Weak equivalences are not preserved by summation: P ~ tau | P weakly, yet
// (tau | P) + Q can silently drop Q. Such counterexamples are reported, not
// counted as failures.
Expect context_expect(Ctx c, Strength s) {
  return c == Ctx::sum && s == Strength::weak ? Expect::disputed : Expect::equivalent;
}

struct CtxInfo {
  Ctx ctx;
  const char* id;
  const char* item;
};

const std::vector<CtxInfo>& contexts() {
  static const std::vector<CtxInfo> all = {
      {Ctx::constant, "const", "constant unfolding"},
      {Ctx::prefix, "a", "forward prefix"},
      {Ctx::multi_prefix, "b", "forward multi-prefix"},
      {Ctx::suffix, "c", "past suffix"},
      {Ctx::multi_suffix, "d", "past multi-suffix"},
      {Ctx::sum, "e", "summation"},
      {Ctx::par, "f", "composition"},
      {Ctx::restrict, "g", "restriction"},
      {Ctx::relabel, "h", "relabelling"},
  };
  return all;
}

// Base pairs for congruence: instances of forward-reverse laws.
Inst congruence_base(TermGenerator& g, const Bounds& bounds, Strength strength) {
  std::size_t choice = uniform(g.rng(), 0, strength == Strength::weak ? 15 : 14);
  if (choice < 4) return monoid(static_cast<int>(choice) + 1)(g, bounds);
  if (choice < 15) return static_law(static_cast<int>(choice) - 3)(g, bounds);
  return tau_law(13)(g, bounds);
}

Inst congruence_case(Ctx c, Flavor flavor, Strength strength, TermGenerator& g, const Bounds& bounds) {
  for (int attempt = 0; attempt < 8; ++attempt) {
    auto base = congruence_base(g, bounds, strength);
    if (!base) continue;
    CheckOptions opt{flavor, strength, Mode::forward_reverse, bounds};
    auto v = check(base->lhs, base->rhs, base->defs, opt);
    if (!v.related || v.bounded) continue;
    if (auto inst = in_context(c, base->lhs, base->rhs, v, g)) return inst;
  }
  return std::nullopt;
}

}  // namespace

std::vector<LawCase> law_registry() {
  std::vector<LawCase> out;
  const Flavor flavors[] = {Flavor::step, Flavor::pomset, Flavor::hp, Flavor::hhp};
  auto add = [&](const std::string& id, const std::string& item, Strength s, Mode m, Expect e, const Maker& make,
                 bool step_only_expect = false) {
    for (Flavor f : flavors) {
      Expect ex = step_only_expect && f != Flavor::step ? Expect::disputed : e;
      out.push_back({id + "/" + to_string(f), item, f, s, m, ex, make});
    }
  };
  for (int i = 1; i <= 4; ++i) {
    add("monoid." + std::to_string(i), "monoid " + std::to_string(i), Strength::strong, Mode::forward_reverse,
        Expect::equivalent, monoid(i));
  }
  for (int i = 1; i <= 11; ++i) {
    add("static." + std::to_string(i), "static " + std::to_string(i), Strength::strong, Mode::forward_reverse,
        Expect::equivalent, static_law(i));
  }
  add("milner", "milner expansion fails", Strength::strong, Mode::forward_reverse, Expect::inequivalent, milner);
  add("expansion.forward", "new expansion (forward)", Strength::strong, Mode::forward, Expect::equivalent,
      expansion_forward, true);
  add("expansion.reverse", "new expansion (reverse)", Strength::strong, Mode::reverse, Expect::equivalent,
      expansion_reverse, true);
  for (int i = 1; i <= 13; ++i) {
    Mode m = i == 13 ? Mode::forward_reverse : (i % 2 ? Mode::forward : Mode::reverse);
    add("tau." + std::to_string(i), "tau " + std::to_string(i), Strength::weak, m, Expect::equivalent, tau_law(i));
  }
  for (Strength s : {Strength::strong, Strength::weak}) {
    for (const auto& info : contexts()) {
      for (Flavor f : flavors) {
        Ctx c = info.ctx;
        std::string id = std::string("congruence.") + info.id + "." + to_string(s) + "/" + to_string(f);
        out.push_back({id, std::string("congruence ") + info.item, f, s, context_mode(c), context_expect(c, s),
                       [c, f, s](TermGenerator& g, const Bounds& b) { return congruence_case(c, f, s, g, b); }});
      }
    }
  }
  return out;
}

std::vector<LawCase> select_laws(const std::vector<LawCase>& all, const std::string& prefix) {
  std::vector<LawCase> out;
  for (const auto& l : all) {
    if (l.id.starts_with(prefix)) out.push_back(l);
  }
  return out;
}

// ---------------------------------------------------------------- running

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string instance_text(const Instance& inst) {
  std::string out = render(inst.lhs) + "  vs  " + render(inst.rhs);
  for (const auto& [name, body] : inst.defs.all()) out += "  where " + name + " := " + render(body);
  return out;
}

LawResult blank(const LawCase& law) {
  LawResult r;
  r.id = law.id;
  r.item = law.item;
  r.flavor = law.flavor;
  r.strength = law.strength;
  r.mode = law.mode;
  r.expect = law.expect;
  return r;
}

void record(LawResult& r, const Instance& inst, const CheckOptions& opt, Expect expect) {
  ++r.samples;
  Verdict v;
  try {
    v = check(inst.lhs, inst.rhs, inst.defs, opt);
  } catch (const std::exception& e) {
    ++r.fails;
    r.failing.push_back(instance_text(inst) + "  (" + e.what() + ")");
    return;
  }
  if (v.bounded) {
    ++r.bounded;
    return;
  }
  bool good = expect == Expect::inequivalent ? !v.related : v.related;
  if (good) {
    ++r.passes;
  } else {
    ++r.fails;
    r.failing.push_back(instance_text(inst));
  }
}

}  // namespace

Report run_law_suite(const GenConfig& cfg, const std::vector<LawCase>& laws, const Bounds& bounds,
                     std::size_t samples) {
  Report rep;
  for (const auto& law : laws) {
    GenConfig c = cfg;
    c.seed = cfg.seed ^ fnv1a(law.id);
    if (law.strength == Strength::weak) c.include_tau = true;
    TermGenerator g(c);
    LawResult r = blank(law);
    CheckOptions opt{law.flavor, law.strength, law.mode, bounds};
    for (std::size_t i = 0; i < samples; ++i) {
      auto inst = law.instantiate(g, bounds);
      if (!inst) {
        ++r.skipped;
        continue;
      }
      record(r, *inst, opt, law.expect);
    }
    rep.results.push_back(std::move(r));
  }
  return rep;
}

Report check_congruence(const std::vector<std::pair<Process, Process>>& pairs, const GenConfig& cfg,
                        const Bounds& bounds, Flavor flavor, Strength strength) {
  Report rep;
  CheckOptions base{flavor, strength, Mode::forward_reverse, bounds};
  std::vector<std::optional<Verdict>> verified;
  for (const auto& [p, q] : pairs) {
    auto v = check(p, q, {}, base);
    verified.push_back(v.related && !v.bounded ? std::optional<Verdict>(std::move(v)) : std::nullopt);
  }
  for (const auto& info : contexts()) {
    LawCase law;
    law.id = std::string("congruence.") + info.id + "." + to_string(strength) + "/" + to_string(flavor);
    law.item = std::string("congruence ") + info.item;
    law.flavor = flavor;
    law.strength = strength;
    law.mode = context_mode(info.ctx);
    law.expect = context_expect(info.ctx, strength);
    LawResult r = blank(law);
    GenConfig c = cfg;
    c.seed = cfg.seed ^ fnv1a(law.id);
    TermGenerator g(c);
    CheckOptions opt{flavor, strength, law.mode, bounds};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (!verified[i]) {
        ++r.skipped;  // rejected: not related to begin with
        continue;
      }
      auto inst = in_context(info.ctx, pairs[i].first, pairs[i].second, *verified[i], g);
      if (!inst) {
        ++r.skipped;
        continue;
      }
      record(r, *inst, opt, law.expect);
    }
    rep.results.push_back(std::move(r));
  }
  return rep;
}

bool Report::ok() const {
  return std::all_of(results.begin(), results.end(),
                     [](const LawResult& r) { return r.expect == Expect::disputed || r.fails == 0; });
}

std::string Report::text() const {
  std::ostringstream os;
  std::size_t failing_laws = 0;
  for (const auto& r : results) {
    os << r.id << "  " << to_string(r.strength) << " " << to_string(r.mode) << "  expect " << to_string(r.expect)
       << "  samples " << r.samples << "  pass " << r.passes << "  " << (r.expect == Expect::disputed ? "counter " : "fail ")
       << r.fails << "  bounded " << r.bounded << "  skipped " << r.skipped << "\n";
    if (r.fails && r.expect != Expect::disputed) ++failing_laws;
    std::size_t shown = 0;
    for (const auto& f : r.failing) {
      if (++shown > 3) {
        os << "    ... " << (r.failing.size() - 3) << " more\n";
        break;
      }
      os << "    " << f << "\n";
    }
  }
  os << results.size() << " laws, " << failing_laws << " failing\n";
  return os.str();
}

std::string Report::machine() const {
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    out.push_back({{"law_id", r.id},
                   {"item", r.item},
                   {"flavor", to_string(r.flavor)},
                   {"strength", to_string(r.strength)},
                   {"mode", to_string(r.mode)},
                   {"expect", to_string(r.expect)},
                   {"samples", r.samples},
                   {"passes", r.passes},
                   {"fails", r.fails},
                   {"bounded", r.bounded},
                   {"skipped", r.skipped},
                   {"failing", r.failing}});
  }
  return out.dump(2) + "\n";
}

}  // namespace rctc
