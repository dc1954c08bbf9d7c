#include <doctest.h>

#include "oracles.hpp"
#include "rctc/equiv.hpp"
#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

using namespace rctc;

namespace {

CheckOptions opts(Flavor f, Strength s = Strength::strong, Mode m = Mode::forward_reverse) {
  CheckOptions o;
  o.flavor = f;
  o.strength = s;
  o.mode = m;
  o.bounds.max_depth = 5;
  o.bounds.max_width = 2;
  return o;
}

const Flavor kFlavors[] = {Flavor::step, Flavor::pomset, Flavor::hp, Flavor::hhp};

}  // namespace

TEST_CASE("Milner's expansion fails for every strong flavor") {
  for (Flavor f : kFlavors) {
    auto o = opts(f);
    auto v = check(parse("a.nil | b.nil"), parse("a.b.nil + b.a.nil"), {}, o);
    CHECK_FALSE(v.related);
    REQUIRE(v.evidence);
    CHECK(v.evidence->label == "{a, b}");
    CHECK(validate_evidence(v, o));
  }
}

TEST_CASE("simple laws") {
  for (Flavor f : kFlavors) {
    auto o = opts(f);
    CHECK(check(parse("a.nil + nil"), parse("a.nil"), {}, o).related);
    CHECK(check(parse("a.nil | nil"), parse("a.nil"), {}, o).related);
    CHECK(check(parse("a.nil | b.nil"), parse("b.nil | a.nil"), {}, o).related);
    CHECK_FALSE(check(parse("a.nil"), parse("b.nil"), {}, o).related);
    auto w = opts(f, Strength::weak);
    CHECK(check(parse("a.nil"), parse("tau.a.nil"), {}, w).related);
    CHECK_FALSE(check(parse("a.nil"), parse("tau.a.nil"), {}, o).related);
  }
}

TEST_CASE("interleaving flavors separate from causal ones") {
  // Forward only, a|b and a.b+b.a+(a||b) have the same steps, but a.b orders
  // a before b.
  auto p = parse("a.nil | b.nil"), q = parse("a.b.nil + b.a.nil + (a || b).nil");
  const auto f = Mode::forward;
  CHECK(check(p, q, {}, opts(Flavor::step, Strength::strong, f)).related);
  CHECK_FALSE(check(p, q, {}, opts(Flavor::pomset, Strength::strong, f)).related);
  CHECK_FALSE(check(p, q, {}, opts(Flavor::hp, Strength::strong, f)).related);
}

TEST_CASE("reverse moves matter") {
  // After {a, b} the right side can only undo both events at once.
  auto p = parse("a.nil | b.nil"), q = parse("a.b.nil + b.a.nil + (a || b).nil");
  auto v = check(p, q, {}, opts(Flavor::step));
  CHECK_FALSE(v.related);
  REQUIRE(v.evidence);
  CHECK(v.evidence->direction == Direction::reverse);
  CHECK(check(parse("a.nil + a.nil"), parse("a.nil"), {}, opts(Flavor::step, Strength::strong, Mode::reverse)).related);
}

TEST_CASE("witnesses validate and corruption is caught") {
  for (Flavor f : kFlavors) {
    auto o = opts(f);
    auto v = check(parse("a.b.nil + nil"), parse("a.b.nil"), {}, o);
    REQUIRE(v.related);
    CHECK(validate_witness(v, o));
    Verdict broken = v;
    if (f == Flavor::step || f == Flavor::pomset) {
      REQUIRE(broken.pairs.size() > 1);
      broken.pairs.pop_back();
    } else {
      REQUIRE(broken.triples.size() > 1);
      broken.triples.pop_back();
    }
    CHECK_FALSE(validate_witness(broken, o));
  }
}

TEST_CASE("reflexivity, symmetry, key renaming, witness and evidence validation") {
  GenConfig cfg;
  cfg.seed = 31;
  cfg.include_tau = true;
  cfg.include_keys = true;
  cfg.max_actions = 4;
  TermGenerator g(cfg);
  for (int i = 0; i < 60; ++i) {
    auto p = g.next(), q = g.next();
    for (Flavor f : kFlavors) {
      for (Strength s : {Strength::strong, Strength::weak}) {
        auto o = opts(f, s);
        INFO(render(p), " vs ", render(q), " ", to_string(f), " ", to_string(s));
        auto self = check(p, p, {}, o);
        CHECK(self.related);
        CHECK(validate_witness(self, o));
        auto pq = check(p, q, {}, o), qp = check(q, p, {}, o);
        CHECK(pq.related == qp.related);
        if (pq.related)
          CHECK(validate_witness(pq, o));
        else
          CHECK(validate_evidence(pq, o));
        auto shifted = rename_keys(p, [](std::uint32_t k) { return 2 * k + 5; });
        CHECK(check(shifted, q, {}, o).related == pq.related);
      }
    }
  }
}

TEST_CASE("the naive oracles agree with the checkers on hand examples") {
  Bounds b;
  b.max_depth = 4;
  b.max_width = 2;
  auto lts = [&](const char* t) { return explore(parse(t), {}, b); };
  CHECK_FALSE(oracle::step_related(lts("a.nil | b.nil"), lts("a.b.nil + b.a.nil")));
  CHECK(oracle::step_related(lts("a.nil | b.nil"), lts("b.nil | a.nil")));
  CHECK(oracle::step_related(lts("a.nil | b.nil"), lts("a.b.nil + b.a.nil + (a || b).nil")) == false);
  CHECK_FALSE(oracle::hp_related(lts("a.nil | b.nil"), lts("a.b.nil + b.a.nil + (a || b).nil")));
  CHECK(oracle::hp_related(lts("a.b.nil + a.b.nil"), lts("a.b.nil")));
  CHECK(oracle::all_isomorphisms(history_of(parse("a[1].nil | a[2].nil")), history_of(parse("a[1].nil | a[2].nil")))
            .size() == 2);
}

TEST_CASE("checkers agree with the naive oracles on small pairs") {
  CheckOptions step = opts(Flavor::step), hp = opts(Flavor::hp);
  step.bounds.max_depth = hp.bounds.max_depth = 5;
  for (const auto& [p, q] : oracle::sample_pairs(77, 80, 4)) {
    if (action_count(p) > 5 || action_count(q) > 5) continue;
    INFO(render(p), " vs ", render(q));
    auto vs = check(p, q, {}, step);
    if (vs.bounded) continue;
    CHECK(vs.related == oracle::step_related(*vs.left, *vs.right));
    auto vh = check(p, q, {}, hp);
    CHECK(vh.related == oracle::hp_related(*vh.left, *vh.right));
  }
}
