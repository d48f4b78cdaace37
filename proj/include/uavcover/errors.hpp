// Copyright 2026 The uavcover Authors.
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

namespace uavcover {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Map text violates the file format.
class FormatError : public Error {
 public:
  using Error::Error;
};

class EmptyMapError : public Error {
 public:
  using Error::Error;
};

// Free cells split into more than one 4-connected component.
class DisconnectedMapError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Experiment or CLI configuration is inconsistent or malformed.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Aggregation found no seed with a covering episode.
class AllRunsFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace uavcover
