#include "rctc/term.hpp"

#include <algorithm>
#include <vector>

namespace rctc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void add_labels(LabelSet& out, const std::vector<Action>& acts) {
  for (const auto& a : acts) {
    if (!a.is_tau()) out.insert(a.label());
  }
}

struct SortWalker {
  const Definitions& defs;
  unsigned fuel;
  bool lower_bound = false;
  // Constants on the current unfolding path, with the relabel depth at entry.
  std::vector<std::pair<std::string, unsigned>> path;
  unsigned relabel_depth = 0;

  LabelSet walk(const Process& p) {
    return std::visit(
        overloaded{
            [](const Nil&) { return LabelSet{}; },
            [&](const Const& c) {
              for (auto it = path.rbegin(); it != path.rend(); ++it) {
                if (it->first == c.name && it->second == relabel_depth) return LabelSet{};
              }
              if (fuel == 0) {
                lower_bound = true;
                return LabelSet{};
              }
              const Process& body = defs.lookup(c.name);
              --fuel;
              path.emplace_back(c.name, relabel_depth);
              LabelSet out = walk(body);
              path.pop_back();
              ++fuel;
              return out;
            },
            [&](const Prefix& x) {
              LabelSet out = walk(x.body);
              add_labels(out, x.actions);
              return out;
            },
            [&](const Suffix& x) {
              LabelSet out = walk(x.body);
              add_labels(out, x.actions);
              return out;
            },
            [&](const Sum& x) { return unite(walk(x.left), walk(x.right)); },
            [&](const Par& x) { return unite(walk(x.left), walk(x.right)); },
            [&](const Seq& x) { return unite(walk(x.left), walk(x.right)); },
            [&](const Restrict& x) {
              LabelSet inner = walk(x.body);
              LabelSet out;
              for (const auto& l : inner) {
                if (!x.labels.contains(l) && !x.labels.contains(l.complement())) out.insert(l);
              }
              return out;
            },
            [&](const Relabel& x) {
              ++relabel_depth;
              LabelSet inner = walk(x.body);
              --relabel_depth;
              LabelSet out;
              for (const auto& l : inner) out.insert(x.map.apply(l));
              return out;
            },
        },
        static_cast<const Node::variant&>(p.node()));
  }

  static LabelSet unite(LabelSet a, const LabelSet& b) {
    a.insert(b.begin(), b.end());
    return a;
  }
};

bool standard_impl(const Process& p, const Definitions& defs, std::set<std::string>& visiting) {
  return std::visit(
      overloaded{
          [](const Nil&) { return true; },
          [&](const Const& c) {
            if (visiting.contains(c.name)) return true;
            visiting.insert(c.name);
            bool r = standard_impl(defs.lookup(c.name), defs, visiting);
            visiting.erase(c.name);
            return r;
          },
          [&](const Prefix& x) { return !x.key && standard_impl(x.body, defs, visiting); },
          [&](const Suffix& x) { return !x.key && standard_impl(x.body, defs, visiting); },
          [&](const Sum& x) {
            return standard_impl(x.left, defs, visiting) && standard_impl(x.right, defs, visiting);
          },
          [&](const Par& x) {
            return standard_impl(x.left, defs, visiting) && standard_impl(x.right, defs, visiting);
          },
          [&](const Seq& x) {
            return standard_impl(x.left, defs, visiting) && standard_impl(x.right, defs, visiting);
          },
          [&](const Restrict& x) { return standard_impl(x.body, defs, visiting); },
          [&](const Relabel& x) { return standard_impl(x.body, defs, visiting); },
      },
      static_cast<const Node::variant&>(p.node()));
}

bool done_impl(const Process& p, const Definitions& defs, std::set<std::string>& visiting) {
  return std::visit(
      overloaded{
          [](const Nil&) { return true; },
          [&](const Const& c) {
            if (visiting.contains(c.name)) return false;
            visiting.insert(c.name);
            bool r = done_impl(defs.lookup(c.name), defs, visiting);
            visiting.erase(c.name);
            return r;
          },
          [&](const Prefix& x) { return x.key && done_impl(x.body, defs, visiting); },
          [&](const Suffix& x) { return x.key && done_impl(x.body, defs, visiting); },
          [&](const Sum& x) {
            bool ls = is_standard(x.left, defs);
            bool rs = is_standard(x.right, defs);
            if (!ls && rs) return done_impl(x.left, defs, visiting);
            if (ls && !rs) return done_impl(x.right, defs, visiting);
            return done_impl(x.left, defs, visiting) && done_impl(x.right, defs, visiting);
          },
          [&](const Par& x) {
            return done_impl(x.left, defs, visiting) && done_impl(x.right, defs, visiting);
          },
          [&](const Seq& x) {
            return done_impl(x.left, defs, visiting) && done_impl(x.right, defs, visiting);
          },
          [&](const Restrict& x) { return done_impl(x.body, defs, visiting); },
          [&](const Relabel& x) { return done_impl(x.body, defs, visiting); },
      },
      static_cast<const Node::variant&>(p.node()));
}

void collect_keys(const Process& p, std::vector<std::uint32_t>& out) {
  std::visit(overloaded{
                 [](const Nil&) {},
                 [](const Const&) {},
                 [&](const Prefix& x) {
                   if (x.key) out.push_back(x.key->value);
                   collect_keys(x.body, out);
                 },
                 [&](const Suffix& x) {
                   collect_keys(x.body, out);
                   if (x.key) out.push_back(x.key->value);
                 },
                 [&](const Sum& x) {
                   collect_keys(x.left, out);
                   collect_keys(x.right, out);
                 },
                 [&](const Par& x) {
                   collect_keys(x.left, out);
                   collect_keys(x.right, out);
                 },
                 [&](const Seq& x) {
                   collect_keys(x.left, out);
                   collect_keys(x.right, out);
                 },
                 [&](const Restrict& x) { collect_keys(x.body, out); },
                 [&](const Relabel& x) { collect_keys(x.body, out); },
             },
             static_cast<const Node::variant&>(p.node()));
}

}  // namespace

SortResult sort(const Process& p, const Definitions& defs, unsigned fuel) {
  SortWalker w{defs, fuel, false, {}, 0};
  SortResult r;
  r.labels = w.walk(p);
  r.lower_bound = w.lower_bound;
  return r;
}

bool is_standard(const Process& p, const Definitions& defs) {
  std::set<std::string> visiting;
  return standard_impl(p, defs, visiting);
}

bool is_fully_executed(const Process& p, const Definitions& defs) {
  std::set<std::string> visiting;
  return done_impl(p, defs, visiting);
}

std::uint32_t max_key(const Process& p) {
  std::vector<std::uint32_t> ks;
  collect_keys(p, ks);
  return ks.empty() ? 0 : *std::max_element(ks.begin(), ks.end());
}

std::set<std::uint32_t> keys_of(const Process& p) {
  std::vector<std::uint32_t> ks;
  collect_keys(p, ks);
  return {ks.begin(), ks.end()};
}

std::size_t action_count(const Process& p) {
  return std::visit(
      overloaded{
          [](const Nil&) -> std::size_t { return 0; },
          [](const Const&) -> std::size_t { return 0; },
          [](const Prefix& x) { return x.actions.size() + action_count(x.body); },
          [](const Suffix& x) { return x.actions.size() + action_count(x.body); },
          [](const Sum& x) { return action_count(x.left) + action_count(x.right); },
          [](const Par& x) { return action_count(x.left) + action_count(x.right); },
          [](const Seq& x) { return action_count(x.left) + action_count(x.right); },
          [](const Restrict& x) { return action_count(x.body); },
          [](const Relabel& x) { return action_count(x.body); },
      },
      static_cast<const Node::variant&>(p.node()));
}

Process rename_keys(const Process& p, const std::function<std::uint32_t(std::uint32_t)>& f) {
  auto rk = [&](const std::optional<Key>& k) -> std::optional<Key> {
    if (!k) return std::nullopt;
    return Key{f(k->value)};
  };
  return std::visit(
      overloaded{
          [&](const Nil&) { return p; },
          [&](const Const&) { return p; },
          [&](const Prefix& x) { return mk::prefix(x.actions, rename_keys(x.body, f), rk(x.key)); },
          [&](const Suffix& x) { return mk::suffix(rename_keys(x.body, f), x.actions, rk(x.key)); },
          [&](const Sum& x) { return mk::sum(rename_keys(x.left, f), rename_keys(x.right, f)); },
          [&](const Par& x) { return mk::par(rename_keys(x.left, f), rename_keys(x.right, f)); },
          [&](const Seq& x) { return mk::seq(rename_keys(x.left, f), rename_keys(x.right, f)); },
          [&](const Restrict& x) { return mk::restrict(rename_keys(x.body, f), x.labels); },
          [&](const Relabel& x) { return mk::relabel(rename_keys(x.body, f), x.map); },
      },
      static_cast<const Node::variant&>(p.node()));
}

Process canonical_keys(const Process& p, std::map<std::uint32_t, std::uint32_t>* mapping) {
  std::vector<std::uint32_t> ks;
  collect_keys(p, ks);
  std::map<std::uint32_t, std::uint32_t> m;
  for (auto k : ks) {
    if (!m.contains(k)) {
      auto next = static_cast<std::uint32_t>(m.size() + 1);
      m.emplace(k, next);
    }
  }
  bool identity = std::all_of(m.begin(), m.end(), [](const auto& kv) { return kv.first == kv.second; });
  Process out = identity ? p : rename_keys(p, [&](std::uint32_t k) { return m.at(k); });
  if (mapping) *mapping = std::move(m);
  return out;
}

Process erase_keys(const Process& p) {
  return std::visit(
      overloaded{
          [&](const Nil&) { return p; },
          [&](const Const&) { return p; },
          [&](const Prefix& x) { return mk::prefix(x.actions, erase_keys(x.body)); },
          [&](const Suffix& x) { return mk::suffix(erase_keys(x.body), x.actions); },
          [&](const Sum& x) { return mk::sum(erase_keys(x.left), erase_keys(x.right)); },
          [&](const Par& x) { return mk::par(erase_keys(x.left), erase_keys(x.right)); },
          [&](const Seq& x) { return mk::seq(erase_keys(x.left), erase_keys(x.right)); },
          [&](const Restrict& x) { return mk::restrict(erase_keys(x.body), x.labels); },
          [&](const Relabel& x) { return mk::relabel(erase_keys(x.body), x.map); },
      },
      static_cast<const Node::variant&>(p.node()));
}

Process forward_residual(const Process& p, const Definitions& defs) {
  return std::visit(
      overloaded{
          [&](const Nil&) { return p; },
          [&](const Const&) { return p; },
          [&](const Prefix& x) { return x.key ? forward_residual(x.body, defs) : p; },
          [&](const Suffix& x) {
            if (x.key) return mk::nil();
            return mk::suffix(forward_residual(x.body, defs), x.actions);
          },
          [&](const Sum& x) {
            bool ls = is_standard(x.left, defs);
            bool rs = is_standard(x.right, defs);
            if (ls && rs) return p;
            if (!ls && rs) return forward_residual(x.left, defs);
            if (ls && !rs) return forward_residual(x.right, defs);
            return mk::nil();
          },
          [&](const Par& x) {
            return mk::par(forward_residual(x.left, defs), forward_residual(x.right, defs));
          },
          [&](const Seq& x) {
            if (is_standard(x.right, defs)) return mk::seq(forward_residual(x.left, defs), x.right);
            return forward_residual(x.right, defs);
          },
          [&](const Restrict& x) { return mk::restrict(forward_residual(x.body, defs), x.labels); },
          [&](const Relabel& x) { return mk::relabel(forward_residual(x.body, defs), x.map); },
      },
      static_cast<const Node::variant&>(p.node()));
}

Process reverse_residual(const Process& p, const Definitions& defs) {
  return std::visit(
      overloaded{
          [&](const Nil&) { return p; },
          [&](const Const&) { return mk::nil(); },
          [&](const Prefix& x) {
            if (!x.key) return mk::nil();
            return mk::prefix(x.actions, reverse_residual(x.body, defs), x.key);
          },
          [&](const Suffix& x) {
            if (!x.key) return reverse_residual(x.body, defs);
            return mk::suffix(reverse_residual(x.body, defs), x.actions, x.key);
          },
          [&](const Sum& x) {
            bool ls = is_standard(x.left, defs);
            bool rs = is_standard(x.right, defs);
            if (ls && rs) return mk::nil();
            if (!ls && rs) return reverse_residual(x.left, defs);
            if (ls && !rs) return reverse_residual(x.right, defs);
            return mk::sum(reverse_residual(x.left, defs), reverse_residual(x.right, defs));
          },
          [&](const Par& x) {
            return mk::par(reverse_residual(x.left, defs), reverse_residual(x.right, defs));
          },
          [&](const Seq& x) {
            if (is_standard(x.right, defs)) return reverse_residual(x.left, defs);
            return mk::seq(reverse_residual(x.left, defs), reverse_residual(x.right, defs));
          },
          [&](const Restrict& x) { return mk::restrict(reverse_residual(x.body, defs), x.labels); },
          [&](const Relabel& x) { return mk::relabel(reverse_residual(x.body, defs), x.map); },
      },
      static_cast<const Node::variant&>(p.node()));
}

std::set<std::string> names_of(const Process& p) {
  std::set<std::string> out;
  std::function<void(const Process&)> go = [&](const Process& q) {
    std::visit(overloaded{
                   [](const Nil&) {},
                   [](const Const&) {},
                   [&](const Prefix& x) {
                     for (const auto& a : x.actions)
                       if (!a.is_tau()) out.insert(a.label().name());
                     go(x.body);
                   },
                   [&](const Suffix& x) {
                     for (const auto& a : x.actions)
                       if (!a.is_tau()) out.insert(a.label().name());
                     go(x.body);
                   },
                   [&](const Sum& x) { go(x.left), go(x.right); },
                   [&](const Par& x) { go(x.left), go(x.right); },
                   [&](const Seq& x) { go(x.left), go(x.right); },
                   [&](const Restrict& x) {
                     for (const auto& l : x.labels) out.insert(l.name());
                     go(x.body);
                   },
                   [&](const Relabel& x) {
                     for (const auto& [from, to] : x.map.pairs()) {
                       out.insert(from);
                       out.insert(to.name());
                     }
                     go(x.body);
                   },
               },
               static_cast<const Node::variant&>(q.node()));
  };
  go(p);
  return out;
}

}  // namespace rctc
