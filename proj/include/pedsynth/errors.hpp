// Copyright 2026 The pedsynth Authors. All Rights Reserved.
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

namespace pedsynth {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invariant or parameter violation (bad box, bad element size, bad config).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Manifest parsing / validation problems (duplicate id, missing file, ...).
class ManifestError : public Error {
 public:
  using Error::Error;
};

// File and codec problems (unreadable PNG, unwritable output, ...).
class IoError : public Error {
 public:
  using Error::Error;
};

// A paste request whose clipped footprint is empty or otherwise unusable.
class PlacementError : public Error {
 public:
  using Error::Error;
};

// Asset collapses to zero width/height under the requested resize.
class DegenerateAssetError : public Error {
 public:
  using Error::Error;
};

// A whole record could not be generated (empty pool, no occluders, all
// placements exhausted their retry budget).
class GenerationError : public Error {
 public:
  using Error::Error;
};

// Metric is undefined for the given inputs (e.g. zero ground truth).
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace pedsynth
