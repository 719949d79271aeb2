#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mvqc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input text or bytes; carries the byte offset where parsing failed.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        message_(what),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }
  /// The message without the offset suffix.
  const std::string& message() const noexcept { return message_; }

 private:
  std::string message_;
  std::size_t offset_;
};

}  // namespace mvqc
