#pragma once

#include <stdexcept>
#include <string>

namespace lena {

enum class Errc {
  invalid_argument = 1,
  unsupported = 2,
  numeric = 3,
  io = 4,
  config = 5,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string &what) : std::runtime_error(what), code_(code) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string &what) { throw Error(code, what); }

inline void require(bool ok, Errc code, const std::string &what) {
  if (!ok) fail(code, what);
}

}  // namespace lena
