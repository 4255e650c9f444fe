#pragma once

#include <stdexcept>
#include <string>

namespace duopose {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A camera point with z_bar <= 0 cannot be projected or declared visible.
struct NonPositiveDepth : Error {
  using Error::Error;
};

/// A filter was fed a NaN or infinite value.
struct NonFiniteInput : Error {
  using Error::Error;
};

/// Requested point id does not exist in the world.
struct UnknownPoint : Error {
  using Error::Error;
};

/// Wire bytes failed validation (bad version, truncation, non-finite field).
struct MalformedMessage : Error {
  using Error::Error;
};

/// Innovation covariance is not invertible.
struct SingularInnovation : Error {
  using Error::Error;
};

/// Velocity-level innovation requires estimate rates on both sides.
struct MissingRates : Error {
  using Error::Error;
};

/// Scenario configuration is invalid; `path` names the offending field.
struct ConfigError : Error {
  ConfigError(const std::string& field_path, const std::string& what)
      : Error("config error at '" + field_path + "': " + what), path(field_path) {}
  std::string path;
};

/// Filesystem failure while emitting reports.
struct IoError : Error {
  using Error::Error;
};

}  // namespace duopose
