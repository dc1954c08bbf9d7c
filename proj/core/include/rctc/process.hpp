#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rctc/action.hpp"

namespace rctc {

struct Node;

/// Immutable RCTC term. Cheap to copy (shared structure); compared structurally.
class Process {
 public:
  Process();  // nil
  explicit Process(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }

  template <class T>
  const T* as() const;

  friend bool operator==(const Process& a, const Process& b);
  friend std::strong_ordering operator<=>(const Process& a, const Process& b);

 private:
  std::shared_ptr<const Node> node_;
};

struct Nil {
  auto operator<=>(const Nil&) const = default;
};

struct Const {
  std::string name;
  auto operator<=>(const Const&) const = default;
};

/// `acts.P` (forward) or `acts[key].P` (executed). |acts| >= 2 is the
/// multi-prefix `(a || b).P`.
struct Prefix {
  std::vector<Action> actions;
  std::optional<Key> key;
  Process body;
  auto operator<=>(const Prefix&) const = default;
};

/// `P.acts[key]` (past suffix) or `P.acts` once the suffix has been undone.
struct Suffix {
  Process body;
  std::vector<Action> actions;
  std::optional<Key> key;
  auto operator<=>(const Suffix&) const = default;
};

struct Sum {
  Process left, right;
  auto operator<=>(const Sum&) const = default;
};

struct Par {
  Process left, right;
  auto operator<=>(const Par&) const = default;
};

/// General sequential composition `P . Q`; Q starts once P is fully executed.
struct Seq {
  Process left, right;
  auto operator<=>(const Seq&) const = default;
};

struct Restrict {
  Process body;
  LabelSet labels;
  auto operator<=>(const Restrict&) const = default;
};

struct Relabel {
  Process body;
  RelabelMap map;
  auto operator<=>(const Relabel&) const = default;
};

struct Node : std::variant<Nil, Const, Prefix, Suffix, Sum, Par, Seq, Restrict, Relabel> {
  using variant::variant;
};

template <class T>
const T* Process::as() const {
  return std::get_if<T>(static_cast<const Node::variant*>(node_.get()));
}

namespace mk {
Process nil();
Process constant(std::string name);
Process prefix(std::vector<Action> acts, Process body, std::optional<Key> key = std::nullopt);
Process prefix(Action act, Process body, std::optional<Key> key = std::nullopt);
Process suffix(Process body, std::vector<Action> acts, std::optional<Key> key = std::nullopt);
Process sum(Process l, Process r);
Process par(Process l, Process r);
Process seq(Process l, Process r);
Process restrict(Process body, LabelSet labels);
Process relabel(Process body, RelabelMap map);
}  // namespace mk

/// Constant definitions `A := P`.
class Definitions {
 public:
  Definitions() = default;

  bool contains(const std::string& name) const { return defs_.contains(name); }
  /// Throws UnresolvedConstant.
  const Process& lookup(const std::string& name) const;
  void define(const std::string& name, Process body);
  const std::map<std::string, Process>& all() const { return defs_; }
  bool empty() const { return defs_.empty(); }
  std::size_t size() const { return defs_.size(); }
  /// Largest key occurring in any body.
  std::uint32_t max_key() const { return max_key_; }

 private:
  std::map<std::string, Process> defs_;
  std::uint32_t max_key_ = 0;
};

class UnresolvedConstant : public Error {
 public:
  explicit UnresolvedConstant(const std::string& name)
      : Error("unresolved constant '" + name + "'"), name_(name) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

}  // namespace rctc
