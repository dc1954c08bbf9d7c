#include "rctc/lts.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include <nlohmann/json.hpp>

#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

namespace rctc {

std::optional<std::size_t> History::find(EventId id) const {
  auto it = std::lower_bound(events.begin(), events.end(), id,
                             [](const EventRecord& r, const EventId& x) { return r.id < x; });
  if (it == events.end() || it->id != id) return std::nullopt;
  return static_cast<std::size_t>(it - events.begin());
}

bool History::before(EventId a, EventId b) const {
  auto i = find(a), j = find(b);
  return i && j && less[*i][*j];
}

Pomset History::pomset(const std::vector<EventId>& ids) const {
  Pomset p;
  std::vector<std::size_t> pos;
  for (auto id : ids) {
    auto i = find(id);
    if (!i) throw Error("event " + id.str() + " not in history");
    pos.push_back(*i);
    p.add(events[*i].action);
  }
  for (std::size_t a = 0; a < pos.size(); ++a)
    for (std::size_t b = 0; b < pos.size(); ++b) p.less[a][b] = less[pos[a]][pos[b]];
  return p;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

struct Occurrence {
  std::uint32_t key;
  std::vector<Action> actions;
  std::set<std::uint32_t> causes;
};

struct HistoryWalker {
  std::vector<Occurrence> occs;
  std::vector<const RelabelMap*> maps;  // outermost first

  Action label(Action a) const {
    for (auto it = maps.rbegin(); it != maps.rend(); ++it) a = (*it)->apply(a);
    return a;
  }

  void occur(const std::vector<Action>& acts, std::uint32_t key, std::set<std::uint32_t> causes) {
    Occurrence o{key, {}, std::move(causes)};
    for (const auto& a : acts) o.actions.push_back(label(a));
    occs.push_back(std::move(o));
  }

  void walk(const Process& p, const std::set<std::uint32_t>& causes) {
    std::visit(overloaded{
                   [](const Nil&) {},
                   [](const Const&) {},
                   [&](const Prefix& x) {
                     if (!x.key) return walk(x.body, causes);
                     occur(x.actions, x.key->value, causes);
                     auto inner = causes;
                     inner.insert(x.key->value);
                     walk(x.body, inner);
                   },
                   [&](const Suffix& x) {
                     walk(x.body, causes);
                     if (!x.key) return;
                     auto before = causes;
                     for (auto k : keys_of(x.body)) before.insert(k);
                     occur(x.actions, x.key->value, before);
                   },
                   [&](const Seq& x) {
                     walk(x.left, causes);
                     auto after = causes;
                     for (auto k : keys_of(x.left)) after.insert(k);
                     walk(x.right, after);
                   },
                   [&](const Sum& x) { walk(x.left, causes), walk(x.right, causes); },
                   [&](const Par& x) { walk(x.left, causes), walk(x.right, causes); },
                   [&](const Restrict& x) { walk(x.body, causes); },
                   [&](const Relabel& x) {
                     maps.push_back(&x.map);
                     walk(x.body, causes);
                     maps.pop_back();
                   },
               },
               static_cast<const Node::variant&>(p.node()));
  }
};

}  // namespace

History history_of(const Process& p) {
  HistoryWalker w;
  w.walk(p, {});
  std::map<std::uint32_t, std::vector<const Occurrence*>> by_key;
  for (const auto& o : w.occs) by_key[o.key].push_back(&o);

  struct Raw {
    EventId id;
    Action action;
    std::set<std::uint32_t> causes;
  };
  std::vector<Raw> raw;
  for (const auto& [key, os] : by_key) {
    bool sync = os.size() == 2 && os[0]->actions.size() == 1 && os[1]->actions.size() == 1 &&
                os[0]->actions[0].complements(os[1]->actions[0]);
    if (sync) {
      std::set<std::uint32_t> causes = os[0]->causes;
      causes.insert(os[1]->causes.begin(), os[1]->causes.end());
      causes.erase(key);
      raw.push_back({{key, 0}, Action::tau(), std::move(causes)});
      continue;
    }
    std::uint32_t idx = 0;
    for (const auto* o : os) {
      for (const auto& a : o->actions) {
        auto causes = o->causes;
        causes.erase(key);
        raw.push_back({{key, idx++}, a, std::move(causes)});
      }
    }
  }
  std::sort(raw.begin(), raw.end(), [](const Raw& a, const Raw& b) { return a.id < b.id; });

  History h;
  std::size_t n = raw.size();
  h.less.assign(n, std::vector<bool>(n, false));
  for (std::size_t e = 0; e < n; ++e) {
    for (std::size_t c = 0; c < n; ++c) {
      if (raw[e].causes.contains(raw[c].id.key)) h.less[c][e] = true;
    }
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (h.less[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (h.less[k][j]) h.less[i][j] = true;
  for (std::size_t e = 0; e < n; ++e) {
    EventRecord r{raw[e].id, raw[e].action, {}};
    for (std::size_t c = 0; c < n; ++c) {
      if (!h.less[c][e]) continue;
      bool immediate = true;
      for (std::size_t d = 0; d < n && immediate; ++d) immediate = !(h.less[c][d] && h.less[d][e]);
      if (immediate) r.causes.push_back(raw[c].id);
    }
    h.events.push_back(std::move(r));
  }
  return h;
}

std::optional<std::size_t> KeyedLts::find(const Process& canonical_term) const {
  auto it = index_.find(canonical_term);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void KeyedLts::rebuild_index() {
  index_.clear();
  for (std::size_t i = 0; i < states.size(); ++i) index_.emplace(states[i].term, i);
  out.assign(states.size(), {});
  for (std::size_t e = 0; e < edges.size(); ++e) out[edges[e].src].push_back(e);
}

namespace {

std::vector<EventId> events_with_keys(const History& h, const std::set<std::uint32_t>& keys) {
  std::vector<EventId> out;
  for (const auto& r : h.events) {
    if (keys.contains(r.id.key)) out.push_back(r.id);
  }
  return out;
}

}  // namespace

KeyedLts explore(const Process& p, const Definitions& defs, const Bounds& bounds) {
  if (bounds.max_depth == 0 || bounds.max_width == 0 || bounds.max_states == 0)
    throw Error("bounds must all be at least 1");
  SosOptions opt{bounds.max_width, bounds.strict_reverse_composition};
  KeyedLts lts;
  Process init = canonical_keys(p);
  lts.states.push_back({init, history_of(init)});
  lts.index_.emplace(init, 0);
  // A keyed start term may already hold more events than max_depth; its
  // own history then sets the cap.
  const std::size_t depth_cap = std::max(bounds.max_depth, lts.states[0].history.size());

  for (std::size_t s = 0; s < lts.states.size(); ++s) {
    Process term = lts.states[s].term;
    auto src_keys = keys_of(term);
    auto handle = [&](const Transition& t) {
      std::map<std::uint32_t, std::uint32_t> canon;
      Process target = canonical_keys(t.target, &canon);
      Edge e;
      e.src = s;
      e.direction = t.direction;
      std::set<std::uint32_t> label_keys;
      for (const auto& ev : t.label.events) label_keys.insert(ev.key.value);
      for (auto k : src_keys) {
        if (auto it = canon.find(k); it != canon.end()) e.key_map.emplace(k, it->second);
      }
      auto found = lts.index_.find(target);
      std::size_t dst;
      if (found != lts.index_.end()) {
        dst = found->second;
      } else {
        History h = history_of(target);
        if (t.direction == Direction::forward && h.size() > depth_cap) {
          lts.truncated = true;
          return;
        }
        if (lts.states.size() >= bounds.max_states) {
          lts.truncated = true;
          return;
        }
        dst = lts.states.size();
        lts.states.push_back({target, std::move(h)});
        lts.index_.emplace(target, dst);
      }
      e.dst = dst;
      e.label = t.label;
      if (t.direction == Direction::forward) {
        std::set<std::uint32_t> fresh;
        for (auto& ev : e.label.events) ev.key.value = canon.at(ev.key.value), fresh.insert(ev.key.value);
        std::set<Key> sync;
        for (auto k : e.label.sync_keys) sync.insert(Key{canon.at(k.value)});
        e.label.sync_keys = std::move(sync);
        e.changed = events_with_keys(lts.states[dst].history, fresh);
      } else {
        e.changed = events_with_keys(lts.states[s].history, label_keys);
      }
      lts.edges.push_back(std::move(e));
    };
    for (const auto& t : forward_steps(term, defs, opt)) handle(t);
    for (const auto& t : reverse_steps(term, defs, opt)) handle(t);
  }
  lts.out.assign(lts.states.size(), {});
  for (std::size_t e = 0; e < lts.edges.size(); ++e) lts.out[lts.edges[e].src].push_back(e);
  return lts;
}

std::vector<PomsetRun> pomset_runs(const KeyedLts& lts, std::size_t from, std::size_t max_events, Direction dir) {
  std::vector<PomsetRun> out;
  if (max_events == 0) {
    out.push_back({Pomset{}, from, {}});
    return out;
  }
  std::set<std::pair<std::size_t, std::string>> seen_runs;
  std::set<std::pair<std::size_t, std::vector<EventId>>> visited;
  const History& origin = lts.states[from].history;

  // Forward: `run` holds ids in the current state. Reverse: ids in the origin,
  // and `to_cur` maps origin keys to current keys.
  std::function<void(std::size_t, std::vector<EventId>, std::map<std::uint32_t, std::uint32_t>)> dfs =
      [&](std::size_t s, std::vector<EventId> run, std::map<std::uint32_t, std::uint32_t> to_cur) {
        for (auto ei : lts.out[s]) {
          const Edge& e = lts.edges[ei];
          if (e.direction != dir) continue;
          if (run.size() + e.changed.size() > max_events) continue;
          std::vector<EventId> next;
          std::map<std::uint32_t, std::uint32_t> next_cur;
          if (dir == Direction::forward) {
            for (auto id : run) next.push_back({e.key_map.at(id.key), id.index});
            next.insert(next.end(), e.changed.begin(), e.changed.end());
          } else {
            next = run;
            std::map<std::uint32_t, std::uint32_t> back;
            for (auto [o, c] : to_cur) back.emplace(c, o);
            for (auto id : e.changed) next.push_back({back.at(id.key), id.index});
            for (auto [o, c] : to_cur) {
              if (auto it = e.key_map.find(c); it != e.key_map.end()) next_cur.emplace(o, it->second);
            }
          }
          std::sort(next.begin(), next.end());
          if (!visited.emplace(e.dst, next).second) continue;
          Pomset pom = dir == Direction::forward ? lts.states[e.dst].history.pomset(next) : origin.pomset(next);
          if (seen_runs.emplace(e.dst, pom.canonical()).second) out.push_back({pom, e.dst, next});
          dfs(e.dst, next, next_cur);
        }
      };
  std::map<std::uint32_t, std::uint32_t> identity;
  for (const auto& r : origin.events) identity.emplace(r.id.key, r.id.key);
  dfs(from, {}, identity);
  return out;
}

namespace {

using nlohmann::json;

json events_json(const StepLabel& l) {
  json a = json::array();
  for (const auto& e : l.events) a.push_back({{"action", e.action.str()}, {"key", e.key.value}});
  return a;
}

Action action_from(const std::string& s) {
  if (s == "tau") return Action::tau();
  if (!s.empty() && s[0] == '~') return Action::coname(s.substr(1));
  return Action::name(s);
}

std::string history_str(const History& h) {
  std::string out;
  for (const auto& r : h.events) {
    if (!out.empty()) out += ' ';
    out += r.action.str() + "@" + r.id.str();
    if (!r.causes.empty()) {
      out += "<-";
      for (std::size_t i = 0; i < r.causes.size(); ++i) out += (i ? "," : "") + r.causes[i].str();
    }
  }
  return out.empty() ? "-" : out;
}

}  // namespace

std::string export_lts(const KeyedLts& lts, ExportFormat fmt) {
  if (fmt == ExportFormat::text) {
    std::string out = "lts states=" + std::to_string(lts.states.size()) + " edges=" + std::to_string(lts.edges.size()) +
                      " initial=" + std::to_string(lts.initial) + (lts.truncated ? " truncated" : "") + "\n";
    for (std::size_t i = 0; i < lts.states.size(); ++i) {
      out += "state " + std::to_string(i) + " " + render(lts.states[i].term) + "  history " +
             history_str(lts.states[i].history) + "\n";
    }
    for (const auto& e : lts.edges) {
      out += "edge " + std::to_string(e.src) + " -> " + std::to_string(e.dst) + " " + to_string(e.direction) + " " +
             e.label.str(e.direction);
      if (e.direction == Direction::forward) {
        std::set<std::uint32_t> ks;
        for (const auto& ev : e.label.events) ks.insert(ev.key.value);
        out += " keys";
        for (auto k : ks) out += " " + std::to_string(k);
      }
      out += "\n";
    }
    return out;
  }
  json j;
  j["initial"] = lts.initial;
  j["truncated"] = lts.truncated;
  j["states"] = json::array();
  for (std::size_t i = 0; i < lts.states.size(); ++i) {
    json hist = json::array();
    for (const auto& r : lts.states[i].history.events) {
      json causes = json::array();
      for (auto c : r.causes) causes.push_back({c.key, c.index});
      hist.push_back({{"key", r.id.key}, {"index", r.id.index}, {"action", r.action.str()}, {"causes", causes}});
    }
    j["states"].push_back({{"id", i}, {"term", render(lts.states[i].term)}, {"history", hist}});
  }
  j["edges"] = json::array();
  for (const auto& e : lts.edges) {
    json keys = json::array();
    for (auto [a, b] : e.key_map) keys.push_back({a, b});
    json changed = json::array();
    for (auto c : e.changed) changed.push_back({c.key, c.index});
    json sync = json::array();
    for (auto k : e.label.sync_keys) sync.push_back(k.value);
    j["edges"].push_back({{"src", e.src},
                          {"dst", e.dst},
                          {"direction", to_string(e.direction)},
                          {"events", events_json(e.label)},
                          {"sync_keys", sync},
                          {"changed", changed},
                          {"keys", keys}});
  }
  return j.dump(1) + "\n";
}

KeyedLts import_lts(const std::string& machine_text) {
  json j;
  try {
    j = json::parse(machine_text);
  } catch (const json::exception& e) {
    throw Error(std::string("bad LTS document: ") + e.what());
  }
  KeyedLts lts;
  try {
    lts.initial = j.at("initial").get<std::size_t>();
    lts.truncated = j.at("truncated").get<bool>();
    for (const auto& s : j.at("states")) {
      LtsState st{parse(s.at("term").get<std::string>()), {}};
      st.history = history_of(st.term);
      History stored;
      for (const auto& r : s.at("history")) {
        EventRecord rec{{r.at("key").get<std::uint32_t>(), r.at("index").get<std::uint32_t>()},
                        action_from(r.at("action").get<std::string>()),
                        {}};
        for (const auto& c : r.at("causes")) rec.causes.push_back({c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>()});
        stored.events.push_back(std::move(rec));
      }
      if (stored.events != st.history.events) throw Error("history of state " + s.at("id").dump() + " does not match its term");
      lts.states.push_back(std::move(st));
    }
    for (const auto& je : j.at("edges")) {
      Edge e;
      e.src = je.at("src").get<std::size_t>();
      e.dst = je.at("dst").get<std::size_t>();
      e.direction = je.at("direction").get<std::string>() == "forward" ? Direction::forward : Direction::reverse;
      for (const auto& ev : je.at("events"))
        e.label.events.push_back({action_from(ev.at("action").get<std::string>()), Key{ev.at("key").get<std::uint32_t>()}});
      for (const auto& k : je.at("sync_keys")) e.label.sync_keys.insert(Key{k.get<std::uint32_t>()});
      for (const auto& c : je.at("changed")) e.changed.push_back({c[0].get<std::uint32_t>(), c[1].get<std::uint32_t>()});
      for (const auto& k : je.at("keys")) e.key_map.emplace(k[0].get<std::uint32_t>(), k[1].get<std::uint32_t>());
      if (e.src >= lts.states.size() || e.dst >= lts.states.size()) throw Error("edge endpoint out of range");
      lts.edges.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw Error(std::string("bad LTS document: ") + e.what());
  }
  lts.rebuild_index();
  return lts;
}

}  // namespace rctc
