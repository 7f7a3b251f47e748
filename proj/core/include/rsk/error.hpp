#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rsk {

/// Error families. The CLI maps Input/Config/Model to exit status 2 and
/// Numeric/Statistics/Range to exit status 3.
enum class ErrorKind { Input, Config, Model, Numeric, Statistics, Range };

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

#define RSK_DEFINE_ERROR(Name, Kind)                                                    \
  class Name : public Error {                                                          \
  public:                                                                              \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {}           \
  };

RSK_DEFINE_ERROR(InputError, Input)
RSK_DEFINE_ERROR(ConfigError, Config)
RSK_DEFINE_ERROR(ModelError, Model)
RSK_DEFINE_ERROR(NumericError, Numeric)
RSK_DEFINE_ERROR(StatisticsError, Statistics)
RSK_DEFINE_ERROR(RangeError, Range)

#undef RSK_DEFINE_ERROR

}  // namespace rsk
