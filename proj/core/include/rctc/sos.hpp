#pragma once

#include <set>
#include <string>
#include <vector>

#include "rctc/process.hpp"

namespace rctc {

enum class Direction { forward, reverse };

const char* to_string(Direction d);

/// Events fired (forward) or undone (reverse) together. Forward events carry
/// the fresh key they were given; the key is bookkeeping, not part of the
/// observable forward label.
struct StepLabel {
  std::vector<KeyedAction> events;
  /// Keys of synchronisations (tau events) in this step.
  std::set<Key> sync_keys;

  std::vector<Action> actions() const;
  /// "{a, b}" for a forward step, "{a[1], b[2]}" for a reverse one.
  std::string str(Direction d) const;
  auto operator<=>(const StepLabel&) const = default;
};

struct Transition {
  Process source;
  StepLabel label;
  Direction direction = Direction::forward;
  Process target;
  auto operator<=>(const Transition&) const = default;
};

struct SosOptions {
  std::size_t max_width = 1;
  /// Reverse composition: one side may undo alone only if the other side
  /// cannot undo anything at all (instead of the default key-wise reading).
  bool strict_reverse_composition = false;
  /// Keep steps holding two unsynchronised complementary events. Such a step
  /// is not a transition on its own, but an enclosing composition may still
  /// pair one of them off; used when stepping a component in isolation.
  bool open = false;
};

std::vector<Transition> forward_steps(const Process& p, const Definitions& defs, const SosOptions& opt);
std::vector<Transition> reverse_steps(const Process& p, const Definitions& defs, const SosOptions& opt);

inline std::vector<Transition> forward_steps(const Process& p, const Definitions& defs, std::size_t max_width) {
  return forward_steps(p, defs, SosOptions{max_width});
}
inline std::vector<Transition> reverse_steps(const Process& p, const Definitions& defs, std::size_t max_width) {
  return reverse_steps(p, defs, SosOptions{max_width});
}
inline std::vector<Transition> forward_single(const Process& p, const Definitions& defs = {}) {
  return forward_steps(p, defs, SosOptions{1});
}
inline std::vector<Transition> reverse_single(const Process& p, const Definitions& defs = {}) {
  return reverse_steps(p, defs, SosOptions{1});
}

struct WeakResult {
  /// Labels hold the visible events only; every entry has at least one.
  std::vector<Transition> transitions;
  bool truncated = false;
};

/// tau* . step . tau* in one direction. `budget` caps the number of terms
/// visited while closing under tau.
WeakResult weak_forward_steps(const Process& p, const Definitions& defs, const SosOptions& opt,
                              std::size_t budget = 10000);
WeakResult weak_reverse_steps(const Process& p, const Definitions& defs, const SosOptions& opt,
                              std::size_t budget = 10000);

}  // namespace rctc
