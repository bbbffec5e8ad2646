#pragma once

#include <stdexcept>
#include <string>

namespace kc {

// Error categories map one-to-one onto CLI exit codes.
enum class Errc {
  invalid_input = 1,
  parse = 2,
  bound = 3,
  refusal = 4,
  internal = 5,
};

class Error : public std::runtime_error {
public:
  Error(Errc c, const std::string& msg) : std::runtime_error(msg), code_(c) {}
  Errc code() const { return code_; }

private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc c, const std::string& msg) { throw Error(c, msg); }

struct OracleLimits {
  int max_vars = 20;
};

}  // namespace kc
