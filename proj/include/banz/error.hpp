/* Copyright 2026 The banz Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef BANZ_ERROR_HPP_
#define BANZ_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace banz {

// Base class for every error the library reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration or arguments (e.g. context length 0).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed model snapshot or container header.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Container was produced with a different model than the one supplied.
class ModelMismatchError : public Error {
 public:
  using Error::Error;
};

// Range-coded payload is truncated or corrupt.
class DecodeError : public Error {
 public:
  using Error::Error;
};

// A probability or gradient that must be finite is not.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace banz

#endif  // BANZ_ERROR_HPP_
