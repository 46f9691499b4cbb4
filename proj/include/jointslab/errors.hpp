#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace jlab {

/// Base class for every domain error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The prime field has too few elements for the requested construction.
class FieldTooSmall : public Error {
 public:
  using Error::Error;
};

/// Input exceeds a hard size ceiling (brute-force oracle, genericity guard).
class TooLarge : public Error {
 public:
  using Error::Error;
};

/// A certified lemma failed at runtime. Never expected; signals an arithmetic bug.
class LemmaViolation : public Error {
 public:
  using Error::Error;
};

class GenericityViolation : public Error {
 public:
  using Error::Error;
};

class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Malformed input data (configuration files, descriptors, certificates).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File system failures. Kept outside Error so the CLI can map it to its own exit code.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Outcome of a certificate re-check: ok, or the first failed condition.
struct CheckResult {
  bool ok = true;
  std::string reason;
  static CheckResult fail(std::string why) { return {false, std::move(why)}; }
  explicit operator bool() const noexcept { return ok; }
};

}  // namespace jlab
