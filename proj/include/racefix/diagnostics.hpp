// Error types shared across the pipeline.  Every error that can surface to a
// user carries a source location where one exists; internal contract
// violations use assertions instead.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace racefix {

// Raised by the lexer/parser.  Carries the 1-based location of the offending
// token and, when the parser knows them, the token spellings it would have
// accepted at that point.
class ParseError : public std::runtime_error {
public:
  ParseError(std::string file, int line, int col, const std::string &what,
             std::vector<std::string> expected = {})
      : std::runtime_error(format(file, line, col, what, expected)),
        file_(std::move(file)), line_(line), col_(col),
        expected_(std::move(expected)) {}

  const std::string &file() const { return file_; }
  int line() const { return line_; }
  int col() const { return col_; }
  const std::vector<std::string> &expected() const { return expected_; }

private:
  static std::string format(const std::string &file, int line, int col,
                            const std::string &what,
                            const std::vector<std::string> &expected) {
    std::string msg = file + ":" + std::to_string(line) + ":" +
                      std::to_string(col) + ": " + what;
    if (!expected.empty()) {
      msg += " (expected ";
      for (size_t i = 0; i < expected.size(); ++i) {
        if (i)
          msg += ", ";
        msg += expected[i];
      }
      msg += ")";
    }
    return msg;
  }

  std::string file_;
  int line_, col_;
  std::vector<std::string> expected_;
};

// An expression that was required to be an access path is not one
// (arithmetic, literal, call, ...).
class NotAPathError : public std::runtime_error {
public:
  explicit NotAPathError(const std::string &what)
      : std::runtime_error("not an access path: " + what) {}
};

// A patch refers to a source location that no longer exists in the program it
// is being applied to (the program changed between synthesis and application).
class StalePatchError : public std::runtime_error {
public:
  explicit StalePatchError(const std::string &what)
      : std::runtime_error("stale patch: " + what) {}
};

// Two actions of one patch alternative touch overlapping statement ranges.
class ConflictError : public std::runtime_error {
public:
  explicit ConflictError(const std::string &what)
      : std::runtime_error("conflicting patch actions: " + what) {}
};

// A declaration the patch wants to introduce collides with an existing name.
class FreshNameError : public std::runtime_error {
public:
  explicit FreshNameError(const std::string &what)
      : std::runtime_error("name collision: " + what) {}
};

} // namespace racefix
