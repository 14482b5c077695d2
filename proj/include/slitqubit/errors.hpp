// Copyright 2026 The slitqubit Authors
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

namespace slitqubit {

// Base for every error raised by the library. Callers that only care about
// "something numeric went wrong" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

// Detector sits in the lens focal plane (z == f); R is infinite there.
class FocalPlaneSingularity : public InvalidGeometry {
 public:
  using InvalidGeometry::InvalidGeometry;
};

// Detector sits in the image plane (R == 0); K is infinite there.
class ImagePlaneSingularity : public InvalidGeometry {
 public:
  using InvalidGeometry::InvalidGeometry;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Input data cannot support the requested estimate (empty grid, all-zero
// block, window too narrow, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, unknown keys or missing units. The CLI maps this
// to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// File cannot be opened, read or parsed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace slitqubit
