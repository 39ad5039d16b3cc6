// Copyright 2026 The sagbiped Authors
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

namespace sagbiped {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration value; `field()` is the dotted config path.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  ParseError(std::string source, int line, const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        source_(std::move(source)),
        line_(line) {}
  int line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  std::string source_;
  int line_;
};

// Inverse kinematics target outside the leg workspace.
class UnreachableError : public Error {
 public:
  UnreachableError(double distance, double reach)
      : Error("target out of reach: d=" + std::to_string(distance) +
              " reach=" + std::to_string(reach)),
        distance_(distance),
        reach_(reach) {}
  double distance() const { return distance_; }
  double reach() const { return reach_; }

 private:
  double distance_;
  double reach_;
};

// Singular mass matrix or a non-finite state after integration.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double time)
      : Error(what + " (t=" + std::to_string(time) + ")"), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class PhaseError : public Error {
 public:
  using Error::Error;
};

class NoContactError : public Error {
 public:
  using Error::Error;
};

class UndefinedComError : public Error {
 public:
  using Error::Error;
};

class InferenceError : public Error {
 public:
  using Error::Error;
};

}  // namespace sagbiped
