#pragma once

#include <cstdint>
#include <functional>
#include <set>

#include "rctc/process.hpp"

namespace rctc {

struct SortResult {
  LabelSet labels;
  /// Set when constant unfolding ran out of fuel; `labels` is then a lower bound.
  bool lower_bound = false;
};

/// The sort L(P): visible labels P may ever perform (tau excluded). Constants
/// are unfolded up to `fuel` times along a path; recursion that does not pass
/// through a relabelling is cut exactly.
SortResult sort(const Process& p, const Definitions& defs = {}, unsigned fuel = 16);

/// Std(P): no keyed action occurs in P (constants unfolded).
bool is_standard(const Process& p, const Definitions& defs = {});

/// NStd(P): P has nothing left to execute. See README for the reading of
/// summation: a sum committed to one branch is done when that branch is.
bool is_fully_executed(const Process& p, const Definitions& defs = {});

/// Largest key literal in P, 0 if none. Constants are not unfolded.
std::uint32_t max_key(const Process& p);

/// Keys occurring in P.
std::set<std::uint32_t> keys_of(const Process& p);

/// Number of action occurrences (an upper bound on the events a standard,
/// constant-free term can perform).
std::size_t action_count(const Process& p);

/// Rewrites every key literal with `f`.
Process rename_keys(const Process& p, const std::function<std::uint32_t(std::uint32_t)>& f);

/// Keys renumbered 1..n in order of first occurrence (pre-order, left to right).
/// `mapping`, if given, receives old -> new.
Process canonical_keys(const Process& p, std::map<std::uint32_t, std::uint32_t>* mapping = nullptr);

/// The standard origin of P: every key dropped.
Process erase_keys(const Process& p);

/// Standard term with the same forward behaviour as P: executed prefixes
/// removed, committed sums reduced to the chosen branch.
Process forward_residual(const Process& p, const Definitions& defs = {});

/// Fully executed term with the same reverse behaviour as P: unexecuted
/// parts dropped.
Process reverse_residual(const Process& p, const Definitions& defs = {});

/// Names (plain) of all labels occurring syntactically in P, including
/// restriction sets and relabel maps.
std::set<std::string> names_of(const Process& p);

}  // namespace rctc
