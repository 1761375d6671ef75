#pragma once

#include <stdexcept>
#include <string>

namespace kitaoka {

enum class ErrorCode {
  NotSquarefree,
  OutOfRange,
  VariantMismatch,
  DimensionMismatch,
  NotPrime,
  NotPositiveDefinite,
  IsotropicAtQ,
  InvariantViolation,
  NotIntegral,
  NotTotallyPD,
  UnknownName,
  AdmissibleD,
  RankNot3,
  ParseError,
  ChecksumMismatch,
  FieldMismatch,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace kitaoka
