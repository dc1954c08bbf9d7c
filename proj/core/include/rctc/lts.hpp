#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rctc/pomset.hpp"
#include "rctc/process.hpp"
#include "rctc/sos.hpp"

namespace rctc {

struct Bounds {
  std::size_t max_depth = 6;  // events in a state's history
  std::size_t max_width = 3;
  std::size_t max_states = 20000;
  bool strict_reverse_composition = false;
};

/// An executed event: the key it was given and its position among the
/// actions of a multi-action step sharing that key.
struct EventId {
  std::uint32_t key = 0;
  std::uint32_t index = 0;
  auto operator<=>(const EventId&) const = default;
  std::string str() const { return std::to_string(key) + "." + std::to_string(index); }
};

struct EventRecord {
  EventId id;
  Action action;
  /// Immediate causal predecessors.
  std::vector<EventId> causes;
  bool operator==(const EventRecord&) const = default;
};

/// The configuration of a state: its executed events and their causal order.
struct History {
  std::vector<EventRecord> events;      // sorted by id
  std::vector<std::vector<bool>> less;  // transitive, indexed like `events`

  std::size_t size() const { return events.size(); }
  std::optional<std::size_t> find(EventId id) const;
  bool before(EventId a, EventId b) const;
  /// Pomset of the given events with the order restricted to them.
  Pomset pomset(const std::vector<EventId>& ids) const;
  bool operator==(const History&) const = default;
};

/// Executed events of P computed from its structure: an event causes what
/// lies under its prefix or after it in a sequential composition. A key at
/// two places is one synchronisation (a tau event).
History history_of(const Process& p);

struct LtsState {
  Process term;  // keys canonical: 1..n in order of first occurrence
  History history;
};

struct Edge {
  std::size_t src = 0, dst = 0;
  Direction direction = Direction::forward;
  /// Keys live in the dst key space for forward edges, src for reverse ones.
  StepLabel label;
  /// Events created (forward, dst ids) or removed (reverse, src ids).
  std::vector<EventId> changed;
  /// Surviving keys: src key -> dst key.
  std::map<std::uint32_t, std::uint32_t> key_map;
  bool operator==(const Edge&) const = default;
};

struct KeyedLts {
  std::vector<LtsState> states;
  std::vector<Edge> edges;
  std::vector<std::vector<std::size_t>> out;  // edge indices by source state
  std::size_t initial = 0;
  bool truncated = false;

  std::optional<std::size_t> find(const Process& canonical_term) const;
  void rebuild_index();

 private:
  std::map<Process, std::size_t> index_;
  friend KeyedLts explore(const Process&, const Definitions&, const Bounds&);
};

/// Breadth-first over forward and reverse steps. Forward steps that would push
/// a history past max_depth (or past the start term's own history, if that is
/// larger), and states beyond max_states, are cut and mark the result
/// truncated.
KeyedLts explore(const Process& p, const Definitions& defs, const Bounds& bounds);

struct PomsetRun {
  Pomset pomset;
  std::size_t end_state = 0;
  /// Forward runs: events in the end state's ids. Reverse runs: events in the
  /// start state's ids.
  std::vector<EventId> events;
};

/// Runs of 1..max_events events in one direction, one per (pomset class, end
/// state). A request for 0 events yields the empty pomset at `from`.
std::vector<PomsetRun> pomset_runs(const KeyedLts& lts, std::size_t from, std::size_t max_events,
                                   Direction dir = Direction::forward);

enum class ExportFormat { text, machine };

std::string export_lts(const KeyedLts& lts, ExportFormat fmt);
/// Reads the machine format back.
KeyedLts import_lts(const std::string& machine_text);

}  // namespace rctc
