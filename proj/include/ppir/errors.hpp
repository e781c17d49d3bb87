#pragma once

#include <stdexcept>
#include <string>

namespace ppir {

// Base for every protocol-level failure. Specific subclasses exist so call
// sites and tests can catch the exact condition they expect.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// gf
struct DivisionByZero : Error {
  using Error::Error;
};
struct ModulusMismatch : Error {
  using Error::Error;
};
struct FieldTooSmall : Error {
  using Error::Error;
};
struct SingularMatrix : Error {
  using Error::Error;
};

// dataset
struct IndexOutOfClass : Error {
  using Error::Error;
};
struct BadSeed : Error {
  using Error::Error;
};
struct LambdaTooLarge : Error {
  using Error::Error;
};

// capacity
struct SingularSystem : Error {
  using Error::Error;
};
struct ImaginaryResidue : Error {
  using Error::Error;
};

// schemes
struct UnsupportedSingleDB : Error {
  using Error::Error;
};
struct RegimeUnsupported : Error {
  using Error::Error;
};
struct InconsistentTranscript : Error {
  using Error::Error;
};

// audit
struct BudgetExceeded : Error {
  using Error::Error;
};

// net
struct MalformedFrame : Error {
  using Error::Error;
};
struct UnknownKind : Error {
  using Error::Error;
};
struct OversizeFrame : Error {
  using Error::Error;
};
struct Timeout : Error {
  using Error::Error;
};
struct PartialFailure : Error {
  using Error::Error;
};

}  // namespace ppir
