// include/csaug/errors.h

// Copyright 2026  The csaug authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CSAUG_ERRORS_H_
#define CSAUG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace csaug {

// Error classes map 1:1 onto CLI exit codes (see tools/csaug_main.cc):
//   ConfigError     -> 2   bad flags, config files, model files
//   DataError       -> 3   malformed or inconsistent input data
//   InfeasibleError -> 4   a generation request that cannot be satisfied

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& msg) : Error(msg) {}
};

class InfeasibleError : public Error {
 public:
  explicit InfeasibleError(const std::string& msg) : Error(msg) {}
};

}  // namespace csaug

#endif  // CSAUG_ERRORS_H_
