// Copyright 2026 The hevo Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace hevo {

enum class ErrorCode {
  TailTooLarge,
  NonFiniteCoefficient,
  UnsupportedInput,
  InvalidWeights,
  NotMarkov,
  InvalidParameter,
  MissingCertificate,
  Parse,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above; the
/// C API maps them one-to-one onto status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hevo
