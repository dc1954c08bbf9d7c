#pragma once

#include <string>
#include <string_view>

#include "rctc/process.hpp"

namespace rctc {

class ParseError : public Error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
        line_(line),
        column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

/// Parses one term. If `defs` is given, every constant must be defined there.
Process parse(std::string_view src, const Definitions* defs = nullptr);

/// Canonical text with minimal parentheses; parse(render(p)) == p.
std::string render(const Process& p);

/// `Name := term` per line, `#` starts a comment. Bodies may refer to any
/// constant defined in the same file.
Definitions parse_defs(std::string_view src);

/// Throws UnresolvedConstant for the first constant of `p` not in `defs`.
void check_constants(const Process& p, const Definitions& defs);

std::string render_actions(const std::vector<Action>& acts, const std::optional<Key>& key);

}  // namespace rctc
