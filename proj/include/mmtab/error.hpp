#pragma once

#include <stdexcept>
#include <string>

namespace mmtab {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MMTAB_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

MMTAB_DEFINE_ERROR(InvalidTable);
MMTAB_DEFINE_ERROR(UnsupportedConstruct);
MMTAB_DEFINE_ERROR(UnrepresentableInFormat);
MMTAB_DEFINE_ERROR(RasterizerUnavailable);
MMTAB_DEFINE_ERROR(RasterizerError);
MMTAB_DEFINE_ERROR(KTooLarge);
MMTAB_DEFINE_ERROR(InsufficientUniqueCells);
MMTAB_DEFINE_ERROR(PoolFormatError);
MMTAB_DEFINE_ERROR(DuplicateId);
MMTAB_DEFINE_ERROR(MissingMandatoryDefault);
MMTAB_DEFINE_ERROR(MissingPlaceholder);
MMTAB_DEFINE_ERROR(LengthMismatch);
MMTAB_DEFINE_ERROR(FileFormatError);
MMTAB_DEFINE_ERROR(ConfigError);

#undef MMTAB_DEFINE_ERROR

/// Structural parse failure; `location` is a human-readable position such as
/// "line 3" or "offset 120".
class ParseError : public Error {
 public:
  ParseError(std::string location, std::string reason)
      : Error(location + ": " + reason),
        location_(std::move(location)),
        reason_(std::move(reason)) {}

  const std::string& location() const noexcept { return location_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string location_;
  std::string reason_;
};

}  // namespace mmtab
