#include "workfn/bits.h"

namespace workfn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::schema: return "schema";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::not_found: return "not_found";
    case ErrorKind::budget_exceeded: return "budget_exceeded";
    case ErrorKind::conflict: return "conflict";
    case ErrorKind::capacity: return "capacity";
  }
  return "unknown";
}

unsigned ceil_log2(std::uint64_t count) {
  if (count == 0) throw Error(ErrorKind::invalid_argument, "ceil_log2 of zero");
  unsigned bits = 0;
  std::uint64_t reach = 1;
  while (reach < count) {
    reach <<= 1;
    ++bits;
  }
  return bits;
}

std::int64_t from_twos_complement(std::uint64_t s, unsigned bits) {
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  const std::uint64_t v = s & mask;
  if ((v >> (bits - 1)) & 1u) return static_cast<std::int64_t>(v) - static_cast<std::int64_t>(mask) - 1;
  return static_cast<std::int64_t>(v);
}

std::uint64_t to_twos_complement(std::int64_t v, unsigned bits) {
  return static_cast<std::uint64_t>(v) & ((std::uint64_t{1} << bits) - 1);
}

bool fits_twos_complement(std::int64_t v, unsigned bits) {
  const std::int64_t half = std::int64_t{1} << (bits - 1);
  return v >= -half && v < half;
}

}  // namespace workfn
