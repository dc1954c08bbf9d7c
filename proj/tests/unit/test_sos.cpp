#include <doctest.h>

#include <algorithm>
#include <map>

#include "rctc/laws.hpp"
#include "rctc/sos.hpp"
#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

using namespace rctc;

namespace {

bool has(const std::vector<Transition>& ts, const std::string& label, Direction d, const std::string& target) {
  return std::any_of(ts.begin(), ts.end(), [&](const Transition& t) {
    return t.label.str(d) == label && render(t.target) == target;
  });
}

bool has_label(const std::vector<Transition>& ts, const std::string& label, Direction d) {
  return std::any_of(ts.begin(), ts.end(), [&](const Transition& t) { return t.label.str(d) == label; });
}

}  // namespace

TEST_CASE("forward prefix takes the next fresh key") {
  auto ts = forward_single(parse("a.nil"));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].target == parse("a[1].nil"));
  CHECK(ts[0].label.events.at(0).key == Key{1});
  CHECK(forward_single(parse("nil")).empty());
  auto us = forward_single(parse("b[4].nil | a.nil"));
  REQUIRE(us.size() == 1);
  CHECK(us[0].target == parse("b[4].nil | a[5].nil"));
}

TEST_CASE("synchronisation shares one key") {
  auto ts = forward_single(parse("a.nil | ~a.nil"));
  CHECK(ts.size() == 3);
  CHECK(has(ts, "{tau}", Direction::forward, "a[1].nil | ~a[1].nil"));
  CHECK(has(ts, "{a}", Direction::forward, "a[1].nil | ~a.nil"));
  CHECK(has(ts, "{~a}", Direction::forward, "a.nil | ~a[1].nil"));
  auto sync = std::find_if(ts.begin(), ts.end(), [](const Transition& t) { return !t.label.sync_keys.empty(); });
  REQUIRE(sync != ts.end());
  CHECK(sync->label.sync_keys == std::set<Key>{Key{1}});
}

TEST_CASE("summation keeps the other summand") {
  auto ts = forward_single(parse("a.nil + b.nil"));
  CHECK(has(ts, "{a}", Direction::forward, "a[1].nil + b.nil"));
  CHECK(has(ts, "{b}", Direction::forward, "a.nil + b[1].nil"));
  CHECK(forward_single(parse("a[1].nil + b.nil")).empty());
  auto rs = reverse_single(parse("a[1].nil + b.nil"));
  REQUIRE(rs.size() == 1);
  CHECK(rs[0].target == parse("a.nil + b.nil"));
}

TEST_CASE("reverse single") {
  auto ts = reverse_single(parse("a[1].nil"));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].label.str(Direction::reverse) == "{a[1]}");
  CHECK(ts[0].target == parse("a.nil"));
  CHECK(reverse_single(parse("a.nil")).empty());
  auto sync = reverse_single(parse("a[1].nil | ~a[1].nil"));
  REQUIRE(sync.size() == 1);
  CHECK(sync[0].target == parse("a.nil | ~a.nil"));
  CHECK(sync[0].label.actions() == std::vector<Action>{Action::tau()});
}

TEST_CASE("steps of parallel components") {
  auto ts = forward_steps(parse("a.nil | b.nil"), {}, 2);
  CHECK(has(ts, "{a, b}", Direction::forward, "a[1].nil | b[2].nil"));
  CHECK(ts.size() == 3);
  auto seq = forward_steps(parse("a.b.nil"), {}, 2);
  CHECK(seq.size() == 1);
  auto co = forward_steps(parse("a.nil | ~a.nil"), {}, 2);
  CHECK_FALSE(has_label(co, "{a, ~a}", Direction::forward));
  CHECK(has_label(co, "{tau}", Direction::forward));
  auto three = forward_steps(parse("(a.nil | ~a.nil) | c.nil"), {}, 2);
  CHECK(has_label(three, "{c, tau}", Direction::forward));
}

TEST_CASE("multi-prefix fires atomically") {
  CHECK(forward_steps(parse("(a || b).nil"), {}, 1).empty());
  auto ts = forward_steps(parse("(a || b).nil"), {}, 2);
  REQUIRE(ts.size() == 1);
  CHECK(render(ts[0].target) == "(a[1] || b[1]).nil");
  CHECK(ts[0].label.events.size() == 2);
}

TEST_CASE("reverse steps") {
  auto ts = reverse_steps(parse("a[1].nil | b[2].nil"), {}, 2);
  CHECK(has(ts, "{a[1], b[2]}", Direction::reverse, "a.nil | b.nil"));
  CHECK(reverse_steps(parse("nil"), {}, 2).empty());
  auto nested = reverse_single(parse("(a[1].nil).(b[2].nil)"));
  REQUIRE(nested.size() == 1);
  CHECK(render(nested[0].target) == "(a[1].nil).(b.nil)");
}

TEST_CASE("a past suffix undoes last") {
  auto p = parse("a[1].nil.b[2]");
  auto ts = reverse_single(p);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].label.str(Direction::reverse) == "{b[2]}");
  auto fs = forward_single(parse("a[1].nil.b"));
  REQUIRE(fs.size() == 1);
  CHECK(fs[0].target == p);
  CHECK(forward_single(parse("a.nil.b")).size() == 1);
  CHECK(forward_single(parse("a.nil.b"))[0].label.str(Direction::forward) == "{a}");
}

TEST_CASE("synchronised pairs reverse together") {
  auto ts = reverse_steps(parse("a[1].nil | ~a[1].nil | b[2].nil"), {}, 2);
  for (const auto& t : ts) {
    auto ks = keys_of(t.target);
    CHECK(ks.contains(1) != t.label.sync_keys.contains(Key{1}));
  }
}

TEST_CASE("restriction and relabelling") {
  CHECK(forward_single(parse("a.nil \\ {a}")).empty());
  CHECK(forward_single(parse("~a.nil \\ {a}")).empty());
  auto ts = forward_single(parse("(a.nil | ~a.nil) \\ {a}"));
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].label.actions() == std::vector<Action>{Action::tau()});
  auto r = forward_single(parse("a.nil[a->b]"));
  REQUIRE(r.size() == 1);
  CHECK(r[0].label.actions() == std::vector<Action>{Action::name("b")});
  auto rr = reverse_single(r[0].target);
  REQUIRE(rr.size() == 1);
  CHECK(rr[0].label.actions() == std::vector<Action>{Action::name("b")});
}

TEST_CASE("constants unfold") {
  auto defs = parse_defs("A := a.A");
  auto ts = forward_single(parse("A"), defs);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].label.actions() == std::vector<Action>{Action::name("a")});
  CHECK_THROWS_AS(forward_single(parse("B"), defs), UnresolvedConstant);
}

TEST_CASE("weak steps") {
  SosOptions o{1};
  auto w = weak_forward_steps(parse("tau.a.nil"), {}, o);
  REQUIRE(w.transitions.size() == 1);
  CHECK(w.transitions[0].label.actions() == std::vector<Action>{Action::name("a")});
  CHECK(w.transitions[0].target == parse("tau[1].a[2].nil"));
  auto plain = weak_forward_steps(parse("a.nil"), {}, o);
  REQUIRE(plain.transitions.size() == 1);
  CHECK(plain.transitions[0].target == parse("a[1].nil"));
  auto two = weak_forward_steps(parse("tau.tau.a.nil"), {}, o);
  REQUIRE(two.transitions.size() == 1);
  CHECK(two.transitions[0].target == parse("tau[1].tau[2].a[3].nil"));
  auto back = weak_reverse_steps(parse("a[1].nil"), {}, o);
  REQUIRE(back.transitions.size() == 1);
  CHECK(back.transitions[0].target == parse("a.nil"));
  CHECK(weak_reverse_steps(parse("nil"), {}, o).transitions.empty());
  auto absorb = weak_reverse_steps(parse("tau[1].a[2].nil"), {}, o);
  CHECK(std::any_of(absorb.transitions.begin(), absorb.transitions.end(),
                    [](const Transition& t) { return t.target == parse("tau.a.nil"); }));
  CHECK(std::all_of(absorb.transitions.begin(), absorb.transitions.end(), [](const Transition& t) {
    return t.label.actions() == std::vector<Action>{Action::name("a")};
  }));
}

TEST_CASE("freshness and restriction soundness on generated terms") {
  GenConfig cfg;
  cfg.seed = 21;
  cfg.include_tau = true;
  cfg.include_keys = true;
  TermGenerator g(cfg);
  for (int i = 0; i < 300; ++i) {
    auto p = g.next();
    for (const auto& t : forward_steps(p, {}, 2)) {
      for (const auto& e : t.label.events) {
        CHECK_FALSE(keys_of(p).contains(e.key.value));
        CHECK(keys_of(t.target).contains(e.key.value));
      }
    }
    auto L = g.label_set(2);
    for (const auto& t : forward_steps(mk::restrict(p, L), {}, 2)) {
      for (const auto& a : t.label.actions()) {
        if (a.is_tau()) continue;
        CHECK_FALSE(L.contains(Label(a.label().name())));
      }
    }
  }
}

TEST_CASE("every step is a sequence of its atomic parts") {
  // A step of width n is reproduced by firing its parts (single events,
  // synchronisations, multi-prefixes) one after another.
  GenConfig cfg;
  cfg.seed = 22;
  cfg.max_actions = 6;
  TermGenerator g(cfg);
  auto sorted = [](std::vector<Action> a) {
    std::sort(a.begin(), a.end());
    return a;
  };
  for (int i = 0; i < 200; ++i) {
    auto p = g.next();
    for (const auto& t : forward_steps(p, {}, 3)) {
      std::map<Key, std::vector<Action>> parts;
      for (const auto& e : t.label.events) parts[e.key].push_back(e.action);
      std::vector<std::pair<Process, std::vector<std::vector<Action>>>> cur;
      std::vector<std::vector<Action>> all;
      for (auto& [k, acts] : parts) all.push_back(sorted(acts));
      cur.push_back({p, all});
      for (std::size_t n = 0; n < parts.size(); ++n) {
        decltype(cur) next;
        for (const auto& [q, left] : cur) {
          for (const auto& u : forward_steps(q, {}, 3)) {
            auto k0 = u.label.events.front().key;
            bool one = std::all_of(u.label.events.begin(), u.label.events.end(),
                                   [&](const KeyedAction& k) { return k.key == k0; });
            if (!one) continue;
            auto it = std::find(left.begin(), left.end(), sorted(u.label.actions()));
            if (it == left.end()) continue;
            auto rest = left;
            rest.erase(rest.begin() + (it - left.begin()));
            next.push_back({u.target, rest});
          }
        }
        cur = std::move(next);
      }
      auto want = canonical_keys(t.target);
      bool found = std::any_of(cur.begin(), cur.end(), [&](const auto& x) { return canonical_keys(x.first) == want; });
      INFO(render(p), "  ", t.label.str(Direction::forward));
      CHECK(found);
    }
  }
}
