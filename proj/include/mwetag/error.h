// Copyright 2026 The mwetag Authors.
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

#ifndef MWETAG_ERROR_H_
#define MWETAG_ERROR_H_

#include <stdexcept>
#include <string>

namespace mwetag {

// Root of every exception thrown by the library. Callers that only need to
// distinguish "bad input" from "bug" can catch this one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched tensor or sequence dimensions passed to a numeric routine.
class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptySequence : public Error {
 public:
  EmptySequence() : Error("sequence must contain at least one position") {}
};

}  // namespace mwetag

#endif  // MWETAG_ERROR_H_
