#include <doctest.h>

#include "rctc/laws.hpp"
#include "rctc/syntax.hpp"

using namespace rctc;

TEST_CASE("parse builds the expected trees") {
  CHECK(parse("a.nil") == mk::prefix(Action::name("a"), mk::nil()));
  CHECK(parse("a.nil | ~a.nil") ==
        mk::par(mk::prefix(Action::name("a"), mk::nil()), mk::prefix(Action::coname("a"), mk::nil())));
  CHECK(parse("(a || b).nil") == mk::prefix({Action::name("a"), Action::name("b")}, mk::nil()));
  CHECK(parse("tau.nil") == mk::prefix(Action::tau(), mk::nil()));
}

TEST_CASE("precedence: prefix over par over sum, postfix tightest") {
  auto a = mk::prefix(Action::name("a"), mk::nil());
  auto b = mk::prefix(Action::name("b"), mk::nil());
  auto c = mk::prefix(Action::name("c"), mk::nil());
  CHECK(parse("a.nil + b.nil | c.nil") == mk::sum(a, mk::par(b, c)));
  CHECK(parse("a.nil | b.nil | c.nil") == mk::par(a, mk::par(b, c)));
  CHECK(parse("a.nil + b.nil + c.nil") == mk::sum(mk::sum(a, b), c));
  CHECK(parse("a.nil | b.nil \\ {a}") == mk::par(a, mk::restrict(b, {Label("a")})));
}

TEST_CASE("past prefixes and suffixes") {
  CHECK(parse("a[3].nil") == mk::prefix(Action::name("a"), mk::nil(), Key{3}));
  CHECK(parse("nil.(a[3] || b[3])") == mk::suffix(mk::nil(), {Action::name("a"), Action::name("b")}, Key{3}));
  auto s = parse("(a.nil).b");
  REQUIRE(s.as<Suffix>());
  CHECK_FALSE(s.as<Suffix>()->key);
}

TEST_CASE("render is canonical") {
  CHECK(render(mk::nil()) == "nil");
  CHECK(render(mk::prefix(Action::name("a"), mk::nil(), Key{3})) == "a[3].nil");
  CHECK(render(mk::restrict(mk::prefix(Action::name("a"), mk::nil()), {Label("b")})) == "a.nil \\ {b}");
  CHECK(render(parse("( (a.nil) + (b.nil) )")) == "a.nil + b.nil");
  CHECK(render(parse("a.nil[a->b, c->~d]")) == "a.nil[a->b, c->~d]");
}

TEST_CASE("parse errors carry positions") {
  CHECK_THROWS_AS(parse("a.(nil"), ParseError);
  CHECK_THROWS_AS(parse("a.nil $"), ParseError);
  CHECK_THROWS_AS(parse("a[x].nil"), ParseError);
  CHECK_THROWS_AS(parse("a[0].nil"), ParseError);
  CHECK_THROWS_AS(parse("nil \\ {tau}"), ParseError);
  try {
    parse("a.nil |\n  $");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("unknown constants are rejected only against definitions") {
  CHECK(parse("A") == mk::constant("A"));
  Definitions defs;
  CHECK_THROWS_AS(parse("A", &defs), UnresolvedConstant);
  defs.define("A", mk::nil());
  CHECK(parse("A | A", &defs) == mk::par(mk::constant("A"), mk::constant("A")));
}

TEST_CASE("definitions files") {
  auto d = parse_defs("A := a.nil");
  CHECK(d.lookup("A") == parse("a.nil"));
  auto r = parse_defs("# loop\nA := a.A\n");
  CHECK(r.lookup("A") == mk::prefix(Action::name("a"), mk::constant("A")));
  CHECK(parse_defs("").empty());
  CHECK_THROWS_AS(parse_defs("A := a.nil\nA := b.nil"), ParseError);
  CHECK_THROWS_AS(parse_defs("A := a.("), ParseError);
  CHECK_THROWS_AS(parse_defs("A := B"), Error);
}

TEST_CASE("round trip on generated terms") {
  for (bool keys : {false, true}) {
    GenConfig cfg;
    cfg.seed = 11;
    cfg.include_tau = true;
    cfg.include_keys = keys;
    cfg.max_actions = 6;
    for (const auto& p : gen_terms(cfg, 300)) {
      INFO(render(p));
      CHECK(parse(render(p)) == p);
    }
  }
}
