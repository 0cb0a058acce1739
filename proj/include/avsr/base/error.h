// avsr/base/error.h

// Copyright 2026  The AVSR Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AVSR_BASE_ERROR_H_
#define AVSR_BASE_ERROR_H_

#include <stdexcept>
#include <string>

namespace avsr {

// Root of every error the toolkit throws. The CLI maps the three families
// below onto distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration or a violated precondition of a public call.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input data (files, transcripts, corpora).
class DataError : public Error {
 public:
  using Error::Error;
};

// Numeric failure: non-finite values, infeasible alignments, poisoned updates.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Shape mismatch inside a tensor op.
class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace avsr

#endif  // AVSR_BASE_ERROR_H_
