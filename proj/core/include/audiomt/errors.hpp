// Copyright 2026 The audiomt Authors.
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

namespace audiomt {

// Every failure raised by the library derives from Error so callers can catch
// broadly; the leaf types map onto the documented error kinds.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed container (bad RIFF header, truncated chunk).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Well-formed container carrying an encoding we do not decode.
class UnsupportedCodecError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Input outside the domain of the operation (empty buffer, silent signal...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Perturbation or configuration parameter out of its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

class MissingFixtureError : public Error {
 public:
  using Error::Error;
};

// Provider response could not be mapped onto a Verdict.
class MappingError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

// Campaign/backend configuration violates its schema. `field` names the
// offending JSON path.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace audiomt
