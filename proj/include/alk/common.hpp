// Shared error types, three-valued judgements, and small utilities.
#ifndef ALK_COMMON_HPP
#define ALK_COMMON_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace alk {

struct ParseError : std::runtime_error {
  int line, col;
  ParseError(int line_, int col_, const std::string& msg)
      : std::runtime_error("parse error at " + std::to_string(line_) + ":" +
                           std::to_string(col_) + ": " + msg),
        line(line_), col(col_) {}
};

struct TypeError : std::runtime_error {
  explicit TypeError(const std::string& msg) : std::runtime_error("type error: " + msg) {}
};

// Raised when a proof transformation meets a shape it cannot handle soundly.
// `precondition()` distinguishes documented inapplicability (the caller asked
// for a transformation outside the lemma's reach) from internal failures.
struct TransformError : std::runtime_error {
  explicit TransformError(const std::string& msg, bool precondition = false)
      : std::runtime_error("transform error: " + msg), pre_(precondition) {}
  bool precondition() const { return pre_; }

 private:
  bool pre_ = false;
};

enum class Verdict : std::uint8_t { Proved, Refuted, Unknown };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Proved: return "proved";
    case Verdict::Refuted: return "refuted";
    default: return "unknown";
  }
}

// Resource bounds shared by the entailment engines and law suites.
struct Budget {
  int depth = 4;        // axiom instantiation / search depth
  int carrier = 3;      // countermodel carrier bound
  long steps = 200000;  // generic step budget for searches
};

template <typename... Ts>
std::string cat(const Ts&... parts) {
  std::ostringstream os;
  (os << ... << parts);
  return os.str();
}

using Rng = std::mt19937_64;

}  // namespace alk

#endif
