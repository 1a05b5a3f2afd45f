// Copyright 2026 The Photocount Authors
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

namespace photocount {

/// Base of every error thrown by the library. The CLI maps the three
/// families below onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Configuration / caller mistakes (CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class ShapeError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};
class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// Numerical failures (CLI exit code 2).
class NumericalError : public Error {
 public:
  using Error::Error;
};
class IntegratorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class EmptyProjectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};
class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Raised when a waveform does not fit in the buffer bandwidth, or a pump
/// constraint is violated. Carries the first offending dimensionless time.
class BandwidthError : public NumericalError {
 public:
  BandwidthError(const std::string& what, double tau)
      : NumericalError(what + " (first violation at tau = " + std::to_string(tau) + ")"),
        tau_(tau) {}
  double tau() const noexcept { return tau_; }

 private:
  double tau_;
};

// File and format problems (CLI exit code 3).
class IoError : public Error {
 public:
  using Error::Error;
};
class ParseError : public IoError {
 public:
  ParseError(const std::string& what, int line)
      : IoError(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace photocount
