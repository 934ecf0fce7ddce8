#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace qac {

enum class ErrorKind { kUsage, kData, kIo };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Stream failure while ingesting; malformed rows never raise this.
class IngestError : public Error {
 public:
  IngestError(const std::string& what, std::uint64_t line)
      : Error(ErrorKind::kIo, what + " at line " + std::to_string(line)),
        line_(line) {}
  std::uint64_t line() const noexcept { return line_; }

 private:
  std::uint64_t line_;
};

}  // namespace qac
