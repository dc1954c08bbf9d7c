#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rctc/equiv.hpp"

namespace rctc {

struct GenConfig {
  std::uint64_t seed = 1;
  std::size_t alphabet = 3;     // names a, b, c, ...
  std::size_t max_depth = 3;    // syntactic depth
  std::size_t max_par = 2;      // parallel components per composition chain
  std::size_t max_actions = 4;  // action occurrences per term
  bool include_tau = false;
  bool include_keys = false;    // keyed terms: reachable states of generated ones
  bool include_multi = true;    // (a || b).P
  bool include_seq = true;      // P.(Q) and P.a
  bool include_static = true;   // restriction and relabelling
};

/// Deterministic stream of ground terms. Standard unless include_keys.
class TermGenerator {
 public:
  explicit TermGenerator(GenConfig cfg) : cfg_(cfg), rng_(cfg.seed) {}
  Process next();
  /// A term with at most `actions` action occurrences.
  Process next(std::size_t actions);
  Action action(bool visible_only = false);
  Label label();
  std::string name();
  LabelSet label_set(std::size_t max_size);
  RelabelMap relabel_map(std::size_t max_size);
  std::mt19937_64& rng() { return rng_; }
  const GenConfig& config() const { return cfg_; }

 private:
  Process gen(std::size_t depth, std::size_t budget, std::size_t par_left);
  GenConfig cfg_;
  std::mt19937_64 rng_;
};

std::vector<Process> gen_terms(const GenConfig& cfg, std::size_t count);

/// Random maximal forward run to a fully executed state; nullopt if every
/// attempt deadlocks first.
std::optional<Process> execute(const Process& p, std::mt19937_64& rng, const Definitions& defs = {});
/// Random forward run of at most `steps` steps (possibly none).
Process partially_execute(const Process& p, std::size_t steps, std::mt19937_64& rng, const Definitions& defs = {});

struct Component {
  Process term;
  RelabelMap map;
};

/// (P1[f1] | ... | Pn[fn]) \ L, right-nested.
Process compose(const std::vector<Component>& cs, const LabelSet& restriction);
/// Components of a term with the same skeleton as compose(shape, L), e.g. a
/// state reached from it by forward steps.
std::optional<std::vector<Component>> decompose(const Process& p, const std::vector<Component>& shape,
                                                const LabelSet& restriction);

/// Right-hand side of the expansion law. Forward: a sum over every joint step
/// of the components (synchronisations become tau entries) of the step as one
/// prefix followed by the composition of the residuals. Reverse: the same over
/// joint reverse steps, each summand a fully executed residual followed by the
/// step as a keyed suffix.
Process expansion_rhs(const std::vector<Component>& cs, const LabelSet& restriction, std::size_t max_width,
                      Direction dir, const Definitions& defs = {});

enum class Expect { equivalent, inequivalent, disputed };
const char* to_string(Expect e);

struct Instance {
  Process lhs, rhs;
  Definitions defs;
};

struct LawCase {
  std::string id;      // e.g. "static.7/hp"
  std::string item;    // proposition item it encodes
  Flavor flavor = Flavor::step;
  Strength strength = Strength::strong;
  Mode mode = Mode::forward_reverse;
  Expect expect = Expect::equivalent;
  /// nullopt when no admissible instance was drawn (counted as skipped).
  std::function<std::optional<Instance>(TermGenerator&, const Bounds&)> instantiate;
};

/// Every law item: monoid, static, Milner, expansion, tau, congruence.
std::vector<LawCase> law_registry();
/// Laws whose id starts with `prefix`.
std::vector<LawCase> select_laws(const std::vector<LawCase>& all, const std::string& prefix);

struct LawResult {
  std::string id, item;
  Flavor flavor;
  Strength strength;
  Mode mode;
  Expect expect;
  std::size_t samples = 0, passes = 0, fails = 0, bounded = 0, skipped = 0;
  std::vector<std::string> failing;  // "lhs  vs  rhs"
};

struct Report {
  std::vector<LawResult> results;
  bool ok() const;
  std::string text() const;
  std::string machine() const;
};

/// Each law gets its own generator seeded from cfg.seed and its id.
Report run_law_suite(const GenConfig& cfg, const std::vector<LawCase>& laws, const Bounds& bounds,
                     std::size_t samples);

/// Wraps each (verified) pair in the one-hole contexts and re-checks.
/// Pairs that are not related under `flavor`/`strength` are reported as
/// rejected rather than checked.
Report check_congruence(const std::vector<std::pair<Process, Process>>& pairs, const GenConfig& cfg,
                        const Bounds& bounds, Flavor flavor, Strength strength);

}  // namespace rctc
