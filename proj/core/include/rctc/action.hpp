#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rctc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A visible label: a name `a` or its co-name `~a`.
class Label {
 public:
  Label() = default;
  explicit Label(std::string name, bool co = false) : name_(std::move(name)), co_(co) {}

  const std::string& name() const { return name_; }
  bool is_co() const { return co_; }
  Label complement() const { return Label(name_, !co_); }
  std::string str() const { return co_ ? "~" + name_ : name_; }

  auto operator<=>(const Label&) const = default;

 private:
  std::string name_;
  bool co_ = false;
};

using LabelSet = std::set<Label>;

/// An element of Act: a visible label or the silent action tau.
class Action {
 public:
  Action() = default;
  explicit Action(Label l) : tau_(false), label_(std::move(l)) {}
  static Action tau() { return Action(); }
  static Action name(std::string n) { return Action(Label(std::move(n), false)); }
  static Action coname(std::string n) { return Action(Label(std::move(n), true)); }

  bool is_tau() const { return tau_; }
  /// Undefined for tau.
  const Label& label() const { return label_; }
  std::string str() const { return tau_ ? "tau" : label_.str(); }

  /// True when both are visible and one is the complement of the other.
  bool complements(const Action& other) const {
    return !tau_ && !other.tau_ && label_.complement() == other.label_;
  }

  auto operator<=>(const Action&) const = default;

 private:
  bool tau_ = true;
  Label label_;
};

/// Communication key tagging an executed event. Always >= 1.
struct Key {
  std::uint32_t value = 0;
  auto operator<=>(const Key&) const = default;
};

struct KeyedAction {
  Action action;
  Key key;
  std::string str() const { return action.str() + "[" + std::to_string(key.value) + "]"; }
  auto operator<=>(const KeyedAction&) const = default;
};

/// Relabelling function given on plain names; co-names and tau follow
/// f(~l) = ~f(l) and f(tau) = tau. Unmapped names are fixed.
class RelabelMap {
 public:
  RelabelMap() = default;
  explicit RelabelMap(std::map<std::string, Label> pairs) : pairs_(std::move(pairs)) {}

  const std::map<std::string, Label>& pairs() const { return pairs_; }
  bool is_identity() const;

  void set(const std::string& from, Label to) { pairs_[from] = std::move(to); }
  Label apply(const Label& l) const;
  Action apply(const Action& a) const;

  /// (outer ∘ this): first this map, then `outer`.
  RelabelMap then(const RelabelMap& outer) const;

  auto operator<=>(const RelabelMap&) const = default;

 private:
  std::map<std::string, Label> pairs_;
};

Action apply_relabel(const RelabelMap& f, const Action& a);

/// Canonical text of an action multiset, e.g. "{a, b, tau}".
std::string multiset_str(std::vector<Action> actions);

}  // namespace rctc
