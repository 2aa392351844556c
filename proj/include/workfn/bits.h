#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace workfn {

enum class ErrorKind {
  schema,          // malformed or inconsistent input document
  invalid_argument,
  not_found,
  budget_exceeded,
  conflict,        // concurrent-write violation in an ensemble
  capacity,        // search or emulator limits exceeded
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Bit width needed to distinguish `count` values, with ceil_log2(1) == 0.
unsigned ceil_log2(std::uint64_t count);

// `bits`-wide two's complement, 1 <= bits <= 32.
std::int64_t from_twos_complement(std::uint64_t s, unsigned bits);
std::uint64_t to_twos_complement(std::int64_t v, unsigned bits);
bool fits_twos_complement(std::int64_t v, unsigned bits);

}  // namespace workfn
