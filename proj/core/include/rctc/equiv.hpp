#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rctc/lts.hpp"

namespace rctc {

enum class Flavor { step, pomset, hp, hhp };
enum class Strength { strong, weak };
/// Which clauses of the bisimulation are checked: both, forward only, or
/// reverse only.
enum class Mode { forward_reverse, forward, reverse };

const char* to_string(Flavor f);
const char* to_string(Strength s);
const char* to_string(Mode m);
Flavor flavor_from_string(const std::string& s);
Strength strength_from_string(const std::string& s);
Mode mode_from_string(const std::string& s);

struct CheckOptions {
  Flavor flavor = Flavor::step;
  Strength strength = Strength::strong;
  Mode mode = Mode::forward_reverse;
  Bounds bounds;
};

/// One observable move of a state: a strong edge, or for weak checking a
/// tau* . step . tau* path with at least one visible event.
struct Move {
  Direction direction = Direction::forward;
  std::size_t dst = 0;
  std::vector<Action> label;      // sorted multiset; visible actions only when weak
  std::vector<EventId> changed;   // forward: dst ids; reverse: src ids (visible only when weak)
  std::map<std::uint32_t, std::uint32_t> key_map;  // src key -> dst key
  auto operator<=>(const Move&) const = default;
};

struct MoveGraph {
  std::vector<std::vector<Move>> moves;  // by state
  Strength strength = Strength::strong;
};

MoveGraph build_moves(const KeyedLts& lts, Strength strength);

/// History restricted to visible events (order closed through tau events).
History visible_history(const History& h);

struct Triple {
  std::size_t left = 0, right = 0;
  std::vector<std::pair<EventId, EventId>> map;  // sorted by left id
  auto operator<=>(const Triple&) const = default;
  std::string str() const;
};

struct EvidenceStep {
  Direction direction;
  std::string label;
  std::size_t left_state, right_state;  // pair reached after the step
};

/// A path of jointly matched moves from the initial pair, ending in a pair
/// where `side` (0 = left, 1 = right) has a move the other side cannot match
/// at all.
struct Evidence {
  std::vector<EvidenceStep> path;
  std::size_t left_state = 0, right_state = 0;
  int side = 0;
  Direction direction = Direction::forward;
  std::string label;
  /// Set when the initial configurations themselves cannot be related.
  bool initial_mismatch = false;
  /// hp / hhp: the triple at which the move fails.
  std::optional<Triple> triple;
  std::string str() const;
};

struct Verdict {
  bool related = false;
  /// Either LTS was cut by the bounds; a verdict then holds only up to them.
  bool bounded = false;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // step / pomset witness
  std::vector<Triple> triples;                              // hp / hhp witness
  std::optional<Evidence> evidence;
  std::shared_ptr<const KeyedLts> left, right;
};

Verdict check(const Process& p, const Process& q, const Definitions& defs, const CheckOptions& opt);
Verdict check_lts(std::shared_ptr<const KeyedLts> left, std::shared_ptr<const KeyedLts> right,
                  const CheckOptions& opt);

/// Re-checks every clause of the chosen definition on the witness.
bool validate_witness(const Verdict& v, const CheckOptions& opt);
/// Replays the evidence on the LTSs: every step exists on both sides and the
/// final move really has no counterpart.
bool validate_evidence(const Verdict& v, const CheckOptions& opt);

}  // namespace rctc
