#pragma once

#include <stdexcept>
#include <string>

namespace crscore {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidDistribution : Error {
  using Error::Error;
};
struct InvalidRanking : Error {
  using Error::Error;
};
struct EmptyAssortment : Error {
  using Error::Error;
};
struct TooManyItems : Error {
  using Error::Error;
};
struct EmptyFamily : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct ParseError : Error {
  using Error::Error;
};
struct RangeError : Error {
  using Error::Error;
};
struct ProbabilityError : Error {
  using Error::Error;
};
struct InvalidStd : Error {
  using Error::Error;
};
struct MissingContext : Error {
  using Error::Error;
};
struct NetworkError : Error {
  using Error::Error;
};
struct AuthError : Error {
  using Error::Error;
};
struct InsufficientValidResponses : Error {
  using Error::Error;
};
struct SchemaError : Error {
  using Error::Error;
};
struct MissingInput : Error {
  using Error::Error;
};
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace crscore
