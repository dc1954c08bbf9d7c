// Acceptance run: one PASS/FAIL line per criterion, with its time limit.
// Usage: acceptance [criterion ...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rctc/laws.hpp"
#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

using namespace rctc;

namespace {

constexpr std::uint64_t kSeed = 20240607;
const Flavor kFlavors[] = {Flavor::step, Flavor::pomset, Flavor::hp, Flavor::hhp};

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  const char* name;
  double limit_s;
  std::function<Outcome()> run;
};

Bounds bounds(std::size_t depth, std::size_t width) {
  Bounds b;
  b.max_depth = depth;
  b.max_width = width;
  return b;
}

GenConfig gen(std::size_t actions) {
  GenConfig c;
  c.seed = kSeed;
  c.max_depth = actions;
  c.max_actions = actions;
  return c;
}

struct Tally {
  std::size_t laws = 0, samples = 0, fails = 0, bounded = 0, skipped = 0;
  std::vector<std::string> failing;

  void add(const Report& r) {
    for (const auto& x : r.results) {
      ++laws;
      samples += x.samples;
      fails += x.fails;
      bounded += x.bounded;
      skipped += x.skipped;
      for (const auto& f : x.failing) failing.push_back(x.id + ": " + f);
    }
  }
  Outcome outcome() const {
    std::ostringstream os;
    os << laws << " laws, " << samples << " checked, " << fails << " failed, " << bounded << " bounded, " << skipped
       << " skipped";
    for (std::size_t i = 0; i < failing.size() && i < 3; ++i) os << "\n      " << failing[i];
    return {fails == 0 && samples > 0, os.str()};
  }
};

std::vector<LawCase> laws(const std::string& prefix, std::function<bool(const LawCase&)> keep = {}) {
  std::vector<LawCase> out;
  for (auto& l : select_laws(law_registry(), prefix))
    if (!keep || keep(l)) out.push_back(std::move(l));
  return out;
}

Outcome milner() {
  std::ostringstream os;
  bool ok = true;
  for (Flavor f : kFlavors) {
    CheckOptions o;
    o.flavor = f;
    auto v = check(parse("a.nil | b.nil"), parse("a.b.nil + b.a.nil"), {}, o);
    bool good = !v.related && !v.bounded && v.evidence && v.evidence->label == "{a, b}" && validate_evidence(v, o);
    ok = ok && good;
    os << to_string(f) << (v.related ? " related" : " not related");
    if (v.evidence) os << " (" << v.evidence->label << ")";
    os << "; ";
  }
  return {ok, os.str()};
}

Outcome suite(const std::string& prefix, std::size_t actions, std::size_t depth, std::size_t samples,
              std::function<bool(const LawCase&)> keep = {}) {
  Tally t;
  t.add(run_law_suite(gen(actions), laws(prefix, keep), bounds(depth, 2), samples));
  return t.outcome();
}

Outcome statics() {
  Tally t;
  auto interleaved = [](const LawCase& l) { return l.flavor == Flavor::step || l.flavor == Flavor::pomset; };
  t.add(run_law_suite(gen(4), laws("static.", interleaved), bounds(4, 2), 200));
  t.add(run_law_suite(gen(3), laws("static.", [&](const LawCase& l) { return !interleaved(l); }), bounds(3, 2), 200));
  return t.outcome();
}

Outcome expansion() {
  Tally t;
  auto step = [](const LawCase& l) { return l.flavor == Flavor::step; };
  t.add(run_law_suite(gen(4), laws("expansion.forward/", step), bounds(4, 3), 50));
  t.add(run_law_suite(gen(4), laws("expansion.reverse/", step), bounds(4, 3), 50));
  return t.outcome();
}

Outcome congruence() {
  // Eight schemata: forward prefix, multi-prefix, past suffix, past
  // multi-suffix, summation, composition, restriction, relabelling. Every
  // counterexample counts, including the ones the registry marks disputed.
  Tally t;
  for (const char* c : {"a", "b", "c", "d", "e", "f", "g", "h"})
    t.add(run_law_suite(gen(4), laws(std::string("congruence.") + c + "."), bounds(6, 2), 100));
  return t.outcome();
}

// Reachable terms of the sample, for the per-transition properties.
std::vector<Process> reachable(std::size_t count) {
  GenConfig c = gen(5);
  c.include_tau = true;
  std::vector<Process> out;
  for (const auto& p : gen_terms(c, count)) {
    auto l = explore(p, {}, bounds(5, 2));
    for (const auto& s : l.states) out.push_back(s.term);
  }
  return out;
}

Outcome loop() {
  std::size_t edges = 0, bad = 0;
  std::string first;
  auto miss = [&](const Process& p, const Transition& t) {
    if (bad++ == 0) first = render(p) + " " + t.label.str(t.direction) + " " + render(t.target);
  };
  for (const auto& p : reachable(500)) {
    for (const auto& t : forward_steps(p, {}, 2)) {
      ++edges;
      bool back = false;
      for (const auto& u : reverse_steps(t.target, {}, 2))
        back |= u.target == p && u.label.events == t.label.events;
      if (!back) miss(p, t);
    }
    for (const auto& t : reverse_steps(p, {}, 2)) {
      ++edges;
      auto acts = t.label.actions();
      std::sort(acts.begin(), acts.end());
      bool forth = false;
      for (const auto& u : forward_steps(t.target, {}, 2)) {
        auto b = u.label.actions();
        std::sort(b.begin(), b.end());
        forth |= b == acts && canonical_keys(u.target) == canonical_keys(p);
      }
      if (!forth) miss(p, t);
    }
  }
  return {bad == 0 && edges > 0, std::to_string(edges) + " transitions, " + std::to_string(bad) + " without a loop" +
                                     (first.empty() ? "" : "\n      " + first)};
}

Outcome sorts() {
  std::size_t edges = 0, bad = 0;
  std::string first;
  for (const auto& p : reachable(500)) {
    auto sp = sort(p).labels;
    for (Direction d : {Direction::forward, Direction::reverse}) {
      auto ts = d == Direction::forward ? forward_steps(p, {}, 2) : reverse_steps(p, {}, 2);
      for (const auto& t : ts) {
        ++edges;
        bool ok = true;
        for (const auto& a : t.label.actions()) ok &= a.is_tau() || sp.contains(a.label());
        auto st = sort(t.target).labels;
        ok &= std::includes(sp.begin(), sp.end(), st.begin(), st.end());
        if (!ok && bad++ == 0) first = render(p) + " " + t.label.str(d) + " " + render(t.target);
      }
    }
  }
  return {bad == 0 && edges > 0, std::to_string(edges) + " transitions, " + std::to_string(bad) + " violations" +
                                     (first.empty() ? "" : "\n      " + first)};
}

Outcome oracles() {
  std::size_t pairs = 0, related = 0, disagree = 0, skipped = 0;
  std::string first;
  CheckOptions step, hp;
  step.bounds = hp.bounds = bounds(5, 2);
  hp.flavor = Flavor::hp;
  for (const auto& [p, q] : oracle::sample_pairs(kSeed, 400, 5)) {
    if (action_count(p) > 5 || action_count(q) > 5) {
      ++skipped;
      continue;
    }
    bool agree = true, cut = false, hp_fr = false;
    for (Mode m : {Mode::forward_reverse, Mode::forward}) {
      step.mode = hp.mode = m;
      auto vs = check(p, q, {}, step);
      auto vh = check(p, q, {}, hp);
      cut |= vs.bounded || vh.bounded;
      if (m == Mode::forward_reverse) hp_fr = vh.related;
      agree = agree && vs.related == oracle::step_related(*vs.left, *vs.right, m) &&
              vh.related == oracle::hp_related(*vh.left, *vh.right, m);
    }
    if (cut) {
      ++skipped;
      continue;
    }
    ++pairs;
    related += hp_fr;
    if (!agree && disagree++ == 0) first = render(p) + "  vs  " + render(q);
  }
  return {disagree == 0 && pairs > 0, std::to_string(pairs) + " pairs (" + std::to_string(related) +
                                          " hp-related), both forward-reverse and forward only, " + std::to_string(disagree) + " disagreements, " +
                                          std::to_string(skipped) + " over 5 events or bounded" +
                                          (first.empty() ? "" : "\n      " + first)};
}

Outcome ladder() {
  // Checked both forward-reverse and forward only; with reverse moves the
  // four flavors tend to coincide, forward only they separate.
  const Mode modes[] = {Mode::forward_reverse, Mode::forward};
  std::size_t pairs = 0, bounded = 0, bad = 0;
  std::size_t related[2][2][4] = {};
  std::string first;
  for (const auto& [p, q] : oracle::sample_pairs(kSeed + 1, 300, 4)) {
    bool r[2][2][4];
    bool cut = false;
    for (int m = 0; m < 2; ++m) {
      for (int s = 0; s < 2; ++s) {
        for (int f = 0; f < 4; ++f) {
          CheckOptions o;
          o.flavor = kFlavors[f];
          o.strength = s ? Strength::weak : Strength::strong;
          o.mode = modes[m];
          o.bounds = bounds(4, 2);
          auto v = check(p, q, {}, o);
          cut |= v.bounded;
          r[m][s][f] = v.related;
        }
      }
    }
    if (cut) {
      ++bounded;
      continue;
    }
    ++pairs;
    bool ok = true;
    for (int m = 0; m < 2; ++m) {
      for (int s = 0; s < 2; ++s) {
        for (int f = 0; f < 4; ++f) related[m][s][f] += r[m][s][f];
        // hhp => hp => pomset => step
        for (int f = 3; f > 0; --f) ok &= !r[m][s][f] || r[m][s][f - 1];
      }
      for (int f = 0; f < 4; ++f) ok &= !r[m][0][f] || r[m][1][f];
    }
    if (!ok && bad++ == 0) first = render(p) + "  vs  " + render(q);
  }
  std::ostringstream os;
  os << pairs << " pairs, " << bad << " violations, " << bounded << " bounded; related (step pomset hp hhp)";
  for (int m = 0; m < 2; ++m) {
    for (int s = 0; s < 2; ++s) {
      os << (m ? " f " : " fr ") << (s ? "weak" : "strong");
      for (auto n : related[m][s]) os << " " << n;
      os << ";";
    }
  }
  if (!first.empty()) os << "\n      " << first;
  return {bad == 0 && pairs > 0, os.str()};
}

Outcome round_trip() {
  GenConfig c = gen(6);
  c.include_tau = true;
  std::size_t bad = 0, n = 0;
  for (bool keys : {false, true}) {
    c.include_keys = keys;
    for (const auto& p : gen_terms(c, 500)) {
      ++n;
      if (!(parse(render(p)) == p)) ++bad;
    }
  }
  return {bad == 0, std::to_string(n) + " terms, " + std::to_string(bad) + " mismatches"};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<Criterion> all = {
      {1, "Milner counterexample, four strong flavors", 1, milner},
      {2, "monoid laws, 200 samples x 4 flavors", 120, [] { return suite("monoid.", 4, 4, 200); }},
      {3, "static laws, 200 samples x 4 flavors", 300, statics},
      {4, "new expansion law, 50 vectors forward and reverse", 120, expansion},
      {5, "tau laws, 200 samples x 4 weak flavors", 180, [] { return suite("tau.", 4, 4, 200); }},
      {6, "congruence, 100 pairs x 8 contexts, strong and weak", 180, congruence},
      {7, "loop property on 500 terms", 60, loop},
      {8, "sort propositions on 500 terms", 60, sorts},
      {9, "step and hp checkers against naive oracles", 120, oracles},
      {10, "inclusion ladder on 300 pairs", 180, ladder},
      {11, "parser round trip on 1000 terms", 10, round_trip},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  int failed = 0;
  for (const auto& c : all) {
    if (!only.empty() && !only.contains(c.number)) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass && secs <= c.limit_s;
    failed += !pass;
    std::printf("%s %2d %s (%.2f s, limit %.0f s): %s\n", pass ? "PASS" : "FAIL", c.number, c.name, secs, c.limit_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
