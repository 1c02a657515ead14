#pragma once

#include <stdexcept>
#include <string>

namespace gripscribe {

/// Base class of every domain error raised by the library. `name()` is the
/// stable error identifier reported on the CLI diagnostic stream.
class Error : public std::runtime_error {
public:
  Error(std::string name, const std::string& message)
      : std::runtime_error(message), name_(std::move(name)) {}

  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

#define GRIPSCRIBE_DEFINE_ERROR(Type)                                          \
  class Type : public Error {                                                  \
  public:                                                                      \
    explicit Type(const std::string& message) : Error(#Type, message) {}      \
  }

GRIPSCRIBE_DEFINE_ERROR(InvalidArgument);
GRIPSCRIBE_DEFINE_ERROR(OutOfReach);
GRIPSCRIBE_DEFINE_ERROR(NoFeasiblePlacement);
GRIPSCRIBE_DEFINE_ERROR(SingularMass);
GRIPSCRIBE_DEFINE_ERROR(NonFinite);
GRIPSCRIBE_DEFINE_ERROR(LinkageLocked);
GRIPSCRIBE_DEFINE_ERROR(DiameterOutOfRange);
GRIPSCRIBE_DEFINE_ERROR(Unreachable);

#undef GRIPSCRIBE_DEFINE_ERROR

/// Configuration failure carrying the dotted path of the offending field,
/// e.g. `mechanism.l1`.
class ConfigError : public Error {
public:
  ConfigError(std::string field_path, const std::string& message)
      : Error("ConfigError", field_path + ": " + message),
        field_path_(std::move(field_path)) {}

  const std::string& field_path() const noexcept { return field_path_; }

private:
  std::string field_path_;
};

}  // namespace gripscribe

namespace gripscribe {

/// Malformed or out-of-contract frame on the session wire protocol.
class ProtocolError : public Error {
public:
  explicit ProtocolError(const std::string& message) : Error("ProtocolError", message) {}
};

}  // namespace gripscribe
