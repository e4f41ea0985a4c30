#ifndef ZESC_ERRORS_HPP
#define ZESC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace zesc {

// Every library failure derives from Error so callers can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonStochastic : Error {
  using Error::Error;
};
struct UnknownSymbol : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct BlocklengthMismatch : Error {
  using Error::Error;
};
struct NotFullSupport : Error {
  using Error::Error;
};
struct NotCycleFree : Error {
  using Error::Error;
};
struct NoApplicableTheorem : Error {
  using Error::Error;
};
struct InvalidColoring : Error {
  using Error::Error;
};
struct ProtocolViolation : Error {
  using Error::Error;
};

// Fatal: a protocol run decoded something other than the source sequence.
struct ZeroErrorViolated : Error {
  using Error::Error;
};

}  // namespace zesc

#endif  // ZESC_ERRORS_HPP
