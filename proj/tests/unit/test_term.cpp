#include <doctest.h>

#include "rctc/laws.hpp"
#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

using namespace rctc;

namespace {
LabelSet labels(std::initializer_list<const char*> ls) {
  LabelSet out;
  for (std::string l : ls) out.insert(l[0] == '~' ? Label(l.substr(1), true) : Label(l));
  return out;
}
}  // namespace

TEST_CASE("complement is an involution") {
  Label a("a");
  CHECK(a.complement() != a);
  CHECK(a.complement().complement() == a);
  CHECK(Action::name("a").complements(Action::coname("a")));
  CHECK_FALSE(Action::tau().complements(Action::tau()));
}

TEST_CASE("relabelling extends to co-names and tau") {
  RelabelMap f;
  f.set("a", Label("b"));
  CHECK(apply_relabel(f, Action::name("a")) == Action::name("b"));
  CHECK(apply_relabel(f, Action::coname("a")) == Action::coname("b"));
  CHECK(apply_relabel(f, Action::tau()) == Action::tau());
  CHECK(apply_relabel(f, Action::name("c")) == Action::name("c"));
}

TEST_CASE("sort clauses") {
  CHECK(sort(parse("a.nil")).labels == labels({"a"}));
  CHECK(sort(parse("tau.nil")).labels.empty());
  CHECK(sort(parse("(a.nil) \\ {a}")).labels.empty());
  CHECK(sort(parse("~a.nil \\ {a}")).labels.empty());
  CHECK(sort(parse("a[1].nil")).labels == labels({"a"}));
  CHECK(sort(parse("nil.(a[2] || ~b[2])")).labels == labels({"a", "~b"}));
  CHECK(sort(parse("(a.nil | ~b.nil)[a->c, b->d]")).labels == labels({"c", "~d"}));
  CHECK(sort(parse("a.nil + b.nil")).labels == labels({"a", "b"}));
}

TEST_CASE("sort follows constants with fuel") {
  auto defs = parse_defs("A := a.B\nB := b.A\nC := c.(C[c->d])");
  auto s = sort(parse("A"), defs);
  CHECK(s.labels == labels({"a", "b"}));
  CHECK_FALSE(s.lower_bound);
  auto t = sort(parse("C"), defs, 3);
  CHECK(t.lower_bound);
  CHECK(t.labels.contains(Label("c")));
  CHECK_THROWS_AS(sort(parse("Z"), defs), UnresolvedConstant);
}

TEST_CASE("sort of a relabelling is the image of the sort") {
  GenConfig cfg;
  cfg.seed = 3;
  TermGenerator g(cfg);
  for (int i = 0; i < 200; ++i) {
    auto p = g.next();
    auto f = g.relabel_map(2);
    LabelSet image;
    for (const auto& l : sort(p).labels) image.insert(f.apply(l));
    CHECK(sort(mk::relabel(p, f)).labels == image);
  }
}

TEST_CASE("standard and fully executed") {
  CHECK(is_standard(parse("a.nil")));
  CHECK_FALSE(is_standard(parse("a[1].nil")));
  CHECK(is_standard(parse("nil")));
  CHECK(is_fully_executed(parse("a[1].nil")));
  CHECK_FALSE(is_fully_executed(parse("a[1].b.nil")));
  CHECK(is_fully_executed(parse("nil")));
  CHECK_FALSE(is_fully_executed(parse("a.nil")));
  CHECK(is_fully_executed(parse("a[1].nil + b.nil")));
  CHECK(is_fully_executed(parse("a[1].nil | nil.b[2]")));
  auto defs = parse_defs("A := a.nil");
  CHECK(is_standard(parse("A"), defs));
  CHECK_THROWS_AS(is_standard(parse("B"), defs), UnresolvedConstant);
}

TEST_CASE("max_key") {
  CHECK(max_key(parse("a.nil")) == 0);
  CHECK(max_key(parse("a[3].nil + b[7].nil")) == 7);
  CHECK(max_key(parse("a[2].(b[2].nil)")) == 2);
}

TEST_CASE("standard terms have no keys") {
  GenConfig cfg;
  cfg.seed = 5;
  cfg.include_keys = true;
  for (const auto& p : gen_terms(cfg, 300)) {
    if (is_standard(p)) CHECK(max_key(p) == 0);
    CHECK(is_standard(erase_keys(p)));
    CHECK(erase_keys(erase_keys(p)) == erase_keys(p));
  }
}

TEST_CASE("key renaming") {
  auto p = parse("b[7].nil | a[3].c[9].nil");
  std::map<std::uint32_t, std::uint32_t> m;
  CHECK(canonical_keys(p, &m) == parse("b[1].nil | a[2].c[3].nil"));
  CHECK(m.at(7) == 1);
  CHECK(m.at(3) == 2);
  CHECK(keys_of(p) == std::set<std::uint32_t>{3, 7, 9});
  CHECK(rename_keys(p, [](std::uint32_t k) { return k + 1; }) == parse("b[8].nil | a[4].c[10].nil"));
  CHECK(action_count(parse("(a || b).c.nil + d.nil")) == 4);
}

TEST_CASE("residuals") {
  CHECK(forward_residual(parse("a[1].b.nil")) == parse("b.nil"));
  CHECK(forward_residual(parse("a[1].nil + c.nil")) == parse("nil"));
  CHECK(is_fully_executed(reverse_residual(parse("a[1].b.nil | c.nil"))));
  CHECK(names_of(parse("a.nil[b->c] \\ {d}")) == std::set<std::string>{"a", "b", "c", "d"});
}
