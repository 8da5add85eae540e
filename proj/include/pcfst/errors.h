// pcfst/errors.h

// Copyright 2026  The pcfst Authors
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

#ifndef PCFST_ERRORS_H_
#define PCFST_ERRORS_H_

#include <stdexcept>
#include <string>

namespace pcfst {

// Bad input data: malformed files, unknown symbols, inconsistent models.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

// Parse failure at a specific line of a text stream.
class ParseError : public DataError {
 public:
  ParseError(int line, const std::string &msg)
      : DataError("line " + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A class label had no bound class FST when the replace view needed it.
class ExpansionError : public DataError {
 public:
  explicit ExpansionError(const std::string &msg) : DataError(msg) {}
};

// Misuse of an API in the wrong lifecycle phase (e.g. a session on an
// unsealed cache).
class ConfigError : public std::logic_error {
 public:
  explicit ConfigError(const std::string &msg) : std::logic_error(msg) {}
};

// Work bound exceeded (composition state explosion, epsilon loops).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string &msg) : std::runtime_error(msg) {}
};

// A structural invariant was found violated at runtime.
class InvariantError : public std::logic_error {
 public:
  explicit InvariantError(const std::string &msg) : std::logic_error(msg) {}
};

}  // namespace pcfst

#endif  // PCFST_ERRORS_H_
