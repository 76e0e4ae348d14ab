#pragma once

#include <stdexcept>
#include <string>

namespace fockshift {

// Library-level failure with a stable machine-readable kind, so the CLI can
// emit {"error": {"kind": ..., "message": ...}} and exit 2 uniformly.
class error : public std::runtime_error {
public:
  error(std::string kind, const std::string& msg)
      : std::runtime_error(msg), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

[[noreturn]] inline void fail(const std::string& kind, const std::string& msg) {
  throw error(kind, msg);
}

inline void require(bool ok, const std::string& kind, const std::string& msg) {
  if (!ok) fail(kind, msg);
}

}  // namespace fockshift
