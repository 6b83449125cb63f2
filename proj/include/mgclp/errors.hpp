// Copyright 2026 The MGCLP Authors
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

namespace mgclp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Input that parses but violates a model invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Inconsistent user-supplied parameters (e.g. R <= r).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A size guard refused the computation (e.g. brute force on a large set).
class GuardError : public Error {
 public:
  using Error::Error;
};

// Memory/size budget exceeded during a solve.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace mgclp
