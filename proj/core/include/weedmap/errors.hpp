#pragma once

#include <stdexcept>
#include <string>

namespace weedmap {

enum class ErrorCode {
  // record validation
  BandCountMismatch,
  NegativeReflectance,
  NonFiniteValue,
  CloudFractionOutOfRange,
  UnknownSensor,
  // preprocessing
  EmptyWindow,
  EmptySeries,
  NonAscendingDates,
  // features
  NonFiniteInput,
  GridMismatch,
  EmptyParcel,
  SchemaMismatch,
  // learning
  ClassTooSmall,
  FractionOutOfRange,
  EmptyTrainingSet,
  KTooLarge,
  ClassSmallerThanFolds,
  // evaluation
  LengthMismatch,
  EmptyInput,
  ZeroSupport,
  UnsupportedFormat,
  // io / config
  ParseError,
  IoError,
  ConfigError,
  UnknownVersion,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace weedmap
