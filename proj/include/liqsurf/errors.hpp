#pragma once

#include <stdexcept>
#include <string>

namespace liqsurf {

// Input files that do not match their documented schema (bad JSON, bad CSV,
// duplicate keys, non-monotone blocks). Carries enough context to name the
// offending record.
class parse_error : public std::runtime_error {
 public:
  explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Violations of documented preconditions or type invariants on otherwise
// well-formed data (insufficient jumps, log of zero liquidity, even M,
// non-orthonormal subspace inputs, out-of-domain parameters, ...).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace liqsurf
