#include "rctc/syntax.hpp"

#include <cctype>
#include <charconv>
#include <set>

namespace rctc {

namespace {

enum class Tok {
  Label,  // lower-case identifier
  Const,  // upper-case identifier
  Nat,
  Nil,
  Tau,
  Dot,
  Bar,
  BarBar,
  Plus,
  LParen,
  RParen,
  LBrack,
  RBrack,
  LBrace,
  RBrace,
  Backslash,
  Tilde,
  Comma,
  Arrow,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  std::size_t line, column;
};

std::vector<Token> lex(std::string_view src, std::size_t line0) {
  std::vector<Token> out;
  std::size_t line = line0, col = 1;
  std::size_t i = 0;
  auto push = [&](Tok k, std::string t, std::size_t c) { out.push_back({k, std::move(t), line, c}); };
  while (i < src.size()) {
    char c = src[i];
    if (c == '\n') {
      ++line, col = 1, ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col, ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    std::size_t start = i, scol = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) ++i;
      std::string word(src.substr(start, i - start));
      col += i - start;
      if (word == "nil")
        push(Tok::Nil, word, scol);
      else if (word == "tau")
        push(Tok::Tau, word, scol);
      else if (std::isupper(static_cast<unsigned char>(c)))
        push(Tok::Const, word, scol);
      else
        push(Tok::Label, word, scol);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
      col += i - start;
      push(Tok::Nat, std::string(src.substr(start, i - start)), scol);
      continue;
    }
    auto two = src.substr(i, 2);
    if (two == "||") {
      push(Tok::BarBar, "||", scol), i += 2, col += 2;
      continue;
    }
    if (two == "->") {
      push(Tok::Arrow, "->", scol), i += 2, col += 2;
      continue;
    }
    Tok k;
    switch (c) {
      case '.': k = Tok::Dot; break;
      case '|': k = Tok::Bar; break;
      case '+': k = Tok::Plus; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case '[': k = Tok::LBrack; break;
      case ']': k = Tok::RBrack; break;
      case '{': k = Tok::LBrace; break;
      case '}': k = Tok::RBrace; break;
      case '\\': k = Tok::Backslash; break;
      case '~': k = Tok::Tilde; break;
      case ',': k = Tok::Comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line, col);
    }
    push(k, std::string(1, c), scol);
    ++i, ++col;
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Process whole() {
    Process p = proc();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return p;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k, std::size_t ahead = 0) const { return peek(ahead).kind == k; }
  const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    throw ParseError(msg, t.line, t.column);
  }
  void expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what + (at(Tok::End) ? " at end of input" : ", got '" + peek().text + "'"));
    take();
  }

  Process proc() {
    Process p = par();
    while (at(Tok::Plus)) {
      take();
      p = mk::sum(p, par());
    }
    return p;
  }

  Process par() {
    Process p = post();
    if (at(Tok::Bar)) {
      take();
      return mk::par(p, par());
    }
    return p;
  }

  Process post() {
    Process p = dotted();
    for (;;) {
      if (at(Tok::Backslash)) {
        take();
        expect(Tok::LBrace, "'{'");
        LabelSet ls;
        if (!at(Tok::RBrace)) {
          ls.insert(label());
          while (at(Tok::Comma)) take(), ls.insert(label());
        }
        expect(Tok::RBrace, "'}'");
        p = mk::restrict(p, std::move(ls));
      } else if (at(Tok::LBrack)) {
        take();
        RelabelMap f;
        std::set<std::string> seen;
        if (!at(Tok::RBrack)) {
          do {
            if (at(Tok::Comma)) take();
            if (!at(Tok::Label)) fail("expected a name in relabelling");
            std::string from = take().text;
            if (!seen.insert(from).second) fail("'" + from + "' relabelled twice");
            expect(Tok::Arrow, "'->'");
            f.set(from, label());
          } while (at(Tok::Comma));
        }
        expect(Tok::RBrack, "']'");
        p = mk::relabel(p, std::move(f));
      } else {
        return p;
      }
    }
  }

  Label label() {
    bool co = false;
    if (at(Tok::Tilde)) take(), co = true;
    if (at(Tok::Tau)) fail("tau cannot appear here");
    if (!at(Tok::Label)) fail("expected a label");
    return Label(take().text, co);
  }

  bool at_act(std::size_t ahead = 0) const {
    auto k = peek(ahead).kind;
    return k == Tok::Tau || k == Tok::Label || k == Tok::Tilde;
  }

  std::size_t act_len(std::size_t ahead) const { return peek(ahead).kind == Tok::Tilde ? 2 : 1; }

  // "(" act ("[" NAT "]")? "||" starts a multi-action list.
  bool at_multi() const {
    if (!at(Tok::LParen) || !at_act(1)) return false;
    std::size_t j = 1 + act_len(1);
    if (peek(j).kind == Tok::LBrack && peek(j + 1).kind == Tok::Nat) j += 3;
    return peek(j).kind == Tok::BarBar;
  }

  Action act() {
    if (at(Tok::Tau)) {
      take();
      return Action::tau();
    }
    return Action(label());
  }

  std::optional<Key> opt_key() {
    if (!(at(Tok::LBrack) && at(Tok::Nat, 1))) return std::nullopt;
    take();
    const auto& t = take();
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || v == 0) throw ParseError("key must be a natural number >= 1", t.line, t.column);
    expect(Tok::RBrack, "']'");
    return Key{v};
  }

  // Returns false if no action list starts here.
  bool actlist(std::vector<Action>& acts, std::optional<Key>& key) {
    if (at_multi()) {
      take();
      std::vector<std::optional<Key>> keys;
      do {
        if (at(Tok::BarBar)) take();
        acts.push_back(act());
        keys.push_back(opt_key());
      } while (at(Tok::BarBar));
      expect(Tok::RParen, "')'");
      for (const auto& k : keys) {
        if (k != keys.front()) fail("actions of one step must share one key");
      }
      key = keys.front();
      return true;
    }
    if (at_act()) {
      acts.push_back(act());
      key = opt_key();
      return true;
    }
    return false;
  }

  Process dotted() {
    std::vector<Action> acts;
    std::optional<Key> key;
    if (actlist(acts, key)) {
      expect(Tok::Dot, "'.' after action");
      return mk::prefix(std::move(acts), dotted(), key);
    }
    Process p = base();
    while (at(Tok::Dot)) {
      take();
      std::vector<Action> sacts;
      std::optional<Key> skey;
      if (actlist(sacts, skey)) {
        p = mk::suffix(p, std::move(sacts), skey);
      } else if (at(Tok::LParen)) {
        take();
        Process q = proc();
        expect(Tok::RParen, "')'");
        p = mk::seq(p, q);
      } else {
        fail("expected an action or '(' after '.'");
      }
    }
    return p;
  }

  Process base() {
    if (at(Tok::Nil)) {
      take();
      return mk::nil();
    }
    if (at(Tok::Const)) return mk::constant(take().text);
    if (at(Tok::LParen)) {
      take();
      Process p = proc();
      expect(Tok::RParen, "')'");
      return p;
    }
    if (at(Tok::End)) fail("unexpected end of input");
    fail("unexpected '" + peek().text + "'");
  }
};

enum Level { kSum = 0, kPar = 1, kPost = 2, kDotted = 3 };

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Level level_of(const Process& p) {
  return std::visit(overloaded{
                        [](const Sum&) { return kSum; },
                        [](const Par&) { return kPar; },
                        [](const Restrict&) { return kPost; },
                        [](const Relabel&) { return kPost; },
                        [](const auto&) { return kDotted; },
                    },
                    static_cast<const Node::variant&>(p.node()));
}

void emit(const Process& p, Level need, std::string& out);

void emit_left_of_dot(const Process& p, std::string& out) {
  if (p.as<Nil>() || p.as<Const>() || p.as<Suffix>() || p.as<Seq>()) {
    emit(p, kDotted, out);
  } else {
    out += '(';
    emit(p, kSum, out);
    out += ')';
  }
}

void emit(const Process& p, Level need, std::string& out) {
  bool paren = level_of(p) < need;
  if (paren) out += '(';
  std::visit(overloaded{
                 [&](const Nil&) { out += "nil"; },
                 [&](const Const& c) { out += c.name; },
                 [&](const Prefix& x) {
                   out += render_actions(x.actions, x.key);
                   out += '.';
                   emit(x.body, kDotted, out);
                 },
                 [&](const Suffix& x) {
                   emit_left_of_dot(x.body, out);
                   out += '.';
                   out += render_actions(x.actions, x.key);
                 },
                 [&](const Seq& x) {
                   emit_left_of_dot(x.left, out);
                   out += ".(";
                   emit(x.right, kSum, out);
                   out += ')';
                 },
                 [&](const Sum& x) {
                   emit(x.left, kSum, out);
                   out += " + ";
                   emit(x.right, kPar, out);
                 },
                 [&](const Par& x) {
                   emit(x.left, kPost, out);
                   out += " | ";
                   emit(x.right, kPar, out);
                 },
                 [&](const Restrict& x) {
                   emit(x.body, kPost, out);
                   out += " \\ {";
                   bool first = true;
                   for (const auto& l : x.labels) {
                     if (!first) out += ", ";
                     first = false;
                     out += l.str();
                   }
                   out += '}';
                 },
                 [&](const Relabel& x) {
                   emit(x.body, kPost, out);
                   out += '[';
                   bool first = true;
                   for (const auto& [from, to] : x.map.pairs()) {
                     if (!first) out += ", ";
                     first = false;
                     out += from + "->" + to.str();
                   }
                   out += ']';
                 },
             },
             static_cast<const Node::variant&>(p.node()));
  if (paren) out += ')';
}

void collect_constants(const Process& p, std::vector<std::string>& out) {
  std::visit(overloaded{
                 [&](const Const& c) { out.push_back(c.name); },
                 [&](const Prefix& x) { collect_constants(x.body, out); },
                 [&](const Suffix& x) { collect_constants(x.body, out); },
                 [&](const Restrict& x) { collect_constants(x.body, out); },
                 [&](const Relabel& x) { collect_constants(x.body, out); },
                 [&](const Sum& x) { collect_constants(x.left, out), collect_constants(x.right, out); },
                 [&](const Par& x) { collect_constants(x.left, out), collect_constants(x.right, out); },
                 [&](const Seq& x) { collect_constants(x.left, out), collect_constants(x.right, out); },
                 [](const Nil&) {},
             },
             static_cast<const Node::variant&>(p.node()));
}

}  // namespace

std::string render_actions(const std::vector<Action>& acts, const std::optional<Key>& key) {
  auto one = [&](const Action& a) {
    return key ? KeyedAction{a, *key}.str() : a.str();
  };
  if (acts.size() == 1) return one(acts.front());
  std::string out = "(";
  for (std::size_t i = 0; i < acts.size(); ++i) {
    if (i) out += " || ";
    out += one(acts[i]);
  }
  return out + ")";
}

Process parse(std::string_view src, const Definitions* defs) {
  Process p = Parser(lex(src, 1)).whole();
  if (defs) check_constants(p, *defs);
  return p;
}

std::string render(const Process& p) {
  std::string out;
  emit(p, kSum, out);
  return out;
}

void check_constants(const Process& p, const Definitions& defs) {
  std::vector<std::string> names;
  collect_constants(p, names);
  for (const auto& n : names) {
    if (!defs.contains(n)) throw UnresolvedConstant(n);
  }
}

Definitions parse_defs(std::string_view src) {
  Definitions defs;
  std::vector<std::pair<std::size_t, Process>> bodies;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= src.size()) {
    std::size_t nl = src.find('\n', pos);
    if (nl == std::string_view::npos) nl = src.size();
    std::string_view line = src.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) continue;
    auto eq = line.find(":=");
    if (eq == std::string_view::npos) throw ParseError("expected 'Name := term'", line_no, first + 1);
    std::string_view lhs = line.substr(0, eq);
    auto l0 = lhs.find_first_not_of(" \t");
    auto l1 = lhs.find_last_not_of(" \t");
    std::string name(lhs.substr(l0, l1 - l0 + 1));
    bool ok = !name.empty() && std::isupper(static_cast<unsigned char>(name[0]));
    for (char c : name) ok = ok && (std::isalnum(static_cast<unsigned char>(c)) || c == '_');
    if (!ok) throw ParseError("bad constant name '" + name + "'", line_no, l0 + 1);
    if (defs.contains(name)) throw ParseError("duplicate definition of '" + name + "'", line_no, l0 + 1);
    std::string body_src(eq + 2, ' ');
    body_src += line.substr(eq + 2);
    Process body = Parser(lex(body_src, line_no)).whole();
    defs.define(name, body);
    bodies.emplace_back(line_no, body);
  }
  for (const auto& [ln, body] : bodies) {
    std::vector<std::string> names;
    collect_constants(body, names);
    for (const auto& n : names) {
      if (!defs.contains(n)) throw ParseError("unresolved constant '" + n + "'", ln, 1);
    }
  }
  return defs;
}

}  // namespace rctc
