// Copyright 2026 The topoloss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace topoloss {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad argument: shape mismatch, out-of-range parameter, too-small image.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Malformed file contents (PGM header, CSV rows, profile JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

// PGM maxval other than 255 or 65535.
class UnsupportedDepthError : public FormatError {
 public:
  using FormatError::FormatError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// The input carries no usable signal, e.g. no contrast patches survive.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Two inputs are individually valid but incompatible (essential class counts).
class MismatchError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

}  // namespace topoloss
