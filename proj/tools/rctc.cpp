// rctc: command-line front end for the RCTC workbench.
//
// Exit codes: 0 success / related / all laws pass, 1 not related / law
// failure, 2 usage or input error, 3 verdict limited by exploration bounds.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rctc/equiv.hpp"
#include "rctc/laws.hpp"
#include "rctc/syntax.hpp"
#include "rctc/term.hpp"

namespace {

using namespace rctc;

struct Flags {
  std::string defs_file;
  std::size_t depth = 6, width = 3, states = 20000;
  bool strict = false;
  std::string flavor = "step", strength = "strong", mode = "fr", format = "text";
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  std::string filter;
  std::vector<std::string> terms;
};

Bounds bounds_of(const Flags& f) { return Bounds{f.depth, f.width, f.states, f.strict}; }

ExportFormat format_of(const Flags& f) {
  if (f.format == "text") return ExportFormat::text;
  if (f.format == "machine") return ExportFormat::machine;
  throw Error("unknown format '" + f.format + "'");
}

Definitions load_defs(const Flags& f) {
  if (f.defs_file.empty()) return {};
  std::ifstream in(f.defs_file);
  if (!in) throw Error("cannot read " + f.defs_file);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_defs(ss.str());
}

std::string sort_text(const SortResult& s) {
  std::string out = "{";
  bool first = true;
  for (const auto& l : s.labels) {
    out += (first ? "" : ", ") + l.str();
    first = false;
  }
  return out + "}" + (s.lower_bound ? " (lower bound)" : "");
}

int cmd_parse(const Flags& f) {
  auto defs = load_defs(f);
  auto p = parse(f.terms.at(0), &defs);
  std::cout << render(p) << "\n";
  std::cout << "sort: " << sort_text(sort(p, defs)) << "\n";
  std::cout << "standard: " << (is_standard(p, defs) ? "yes" : "no") << "\n";
  std::cout << "fully executed: " << (is_fully_executed(p, defs) ? "yes" : "no") << "\n";
  return 0;
}

std::string keys_text(const StepLabel& l) {
  std::string out;
  for (const auto& e : l.events) out += (out.empty() ? "" : ",") + std::to_string(e.key.value);
  return out;
}

int cmd_trace(const Flags& f) {
  auto defs = load_defs(f);
  auto p = parse(f.terms.at(0), &defs);
  SosOptions opt{f.width, f.strict};
  std::cout << render(p) << "\n";
  for (const auto& t : forward_steps(p, defs, opt)) {
    std::cout << "  forward " << t.label.str(Direction::forward) << " key " << keys_text(t.label) << " -> "
              << render(t.target) << "\n";
    for (const auto& r : reverse_steps(t.target, defs, opt)) {
      std::cout << "    reverse " << r.label.str(Direction::reverse) << " -> " << render(r.target) << "\n";
    }
  }
  for (const auto& t : reverse_steps(p, defs, opt)) {
    std::cout << "  reverse " << t.label.str(Direction::reverse) << " -> " << render(t.target) << "\n";
  }
  return 0;
}

int cmd_explore(const Flags& f) {
  auto defs = load_defs(f);
  auto p = parse(f.terms.at(0), &defs);
  auto lts = explore(p, defs, bounds_of(f));
  std::cout << export_lts(lts, format_of(f));
  return lts.truncated ? 3 : 0;
}

int cmd_check(const Flags& f) {
  auto defs = load_defs(f);
  auto p = parse(f.terms.at(0), &defs);
  auto q = parse(f.terms.at(1), &defs);
  CheckOptions opt{flavor_from_string(f.flavor), strength_from_string(f.strength), mode_from_string(f.mode),
                   bounds_of(f)};
  auto v = check(p, q, defs, opt);
  std::string what = std::string(to_string(opt.strength)) + " " + to_string(opt.flavor) + " (" + to_string(opt.mode) + ")";
  if (f.format == "machine") {
    std::cout << "{\"related\": " << (v.related ? "true" : "false") << ", \"bounded\": " << (v.bounded ? "true" : "false")
              << ", \"witness\": " << (v.pairs.size() + v.triples.size());
    if (v.evidence) std::cout << ", \"evidence\": \"" << v.evidence->str() << "\"";
    std::cout << "}\n";
  } else if (v.related) {
    std::cout << "related under " << what << "; witness of " << (v.pairs.size() + v.triples.size())
              << (v.triples.empty() ? " pairs" : " triples") << "\n";
  } else {
    std::cout << "not related under " << what << "\n";
    if (v.evidence) std::cout << "evidence: " << v.evidence->str() << "\n";
  }
  if (v.bounded) std::cerr << "note: exploration was cut by the bounds; the verdict holds only up to them\n";
  if (v.bounded) return 3;
  return v.related ? 0 : 1;
}

int cmd_laws(const Flags& f) {
  GenConfig cfg;
  cfg.seed = f.seed;
  cfg.max_actions = f.depth;  // generated terms fit the exploration depth
  auto bounds = bounds_of(f);
  auto laws = select_laws(law_registry(), f.filter);
  if (laws.empty()) throw Error("no law matches '" + f.filter + "'");
  auto rep = run_law_suite(cfg, laws, bounds, f.samples);
  std::cout << (format_of(f) == ExportFormat::machine ? rep.machine() : rep.text());
  return rep.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible truly concurrent process calculus workbench"};
  app.require_subcommand(1);
  Flags f;
  auto common = [&](CLI::App* c) {
    c->add_option("--defs", f.defs_file, "Constant definitions file (NAME := term per line)");
    c->add_option("--depth", f.depth, "Max events in a history")->capture_default_str();
    c->add_option("--width", f.width, "Max events in one step")->capture_default_str();
    c->add_option("--states", f.states, "Max explored states")->capture_default_str();
    c->add_flag("--strict-reverse", f.strict, "Term-wide negative premise for reverse composition");
    c->add_option("--format", f.format, "text or machine")->capture_default_str();
  };
  auto parse_cmd = app.add_subcommand("parse", "Parse a term and print its canonical form");
  auto trace_cmd = app.add_subcommand("trace", "List the transitions of a term");
  auto explore_cmd = app.add_subcommand("explore", "Explore and export the keyed LTS");
  auto check_cmd = app.add_subcommand("check", "Decide an equivalence between two terms");
  auto laws_cmd = app.add_subcommand("laws", "Run the sampled law suite");
  for (auto c : {parse_cmd, trace_cmd, explore_cmd, check_cmd, laws_cmd}) common(c);
  for (auto c : {parse_cmd, trace_cmd, explore_cmd}) c->add_option("term", f.terms, "Term")->required()->expected(1);
  check_cmd->add_option("terms", f.terms, "Left and right terms")->required()->expected(2);
  check_cmd->add_option("--flavor", f.flavor, "step, pomset, hp or hhp")->capture_default_str();
  check_cmd->add_option("--strength", f.strength, "strong or weak")->capture_default_str();
  check_cmd->add_option("--mode", f.mode, "fr, f or r")->capture_default_str();
  laws_cmd->add_option("--seed", f.seed)->capture_default_str();
  laws_cmd->add_option("--samples", f.samples, "Instances per law")->capture_default_str();
  laws_cmd->add_option("--filter", f.filter, "Only laws whose id starts with this");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    if (*parse_cmd) return cmd_parse(f);
    if (*trace_cmd) return cmd_trace(f);
    if (*explore_cmd) return cmd_explore(f);
    if (*check_cmd) return cmd_check(f);
    return cmd_laws(f);
  } catch (const ParseError& e) {
    std::cerr << "parse error at " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
  }
  return 2;
}
