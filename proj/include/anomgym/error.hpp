// Copyright 2026 The anomgym Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace anomgym {

// Every failure raised by the library carries a short machine-readable tag.
// Benchmark cells record the tag of the exception that failed them.
class Error : public std::runtime_error {
 public:
  Error(std::string tag, const std::string& what)
      : std::runtime_error(what), tag_(std::move(tag)) {}
  const std::string& tag() const noexcept { return tag_; }

 private:
  std::string tag_;
};

#define ANOMGYM_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                        \
   public:                                                           \
    explicit Name(const std::string& what) : Error(#Name, what) {}   \
  };

ANOMGYM_DEFINE_ERROR(DimensionError)
ANOMGYM_DEFINE_ERROR(ContractError)
ANOMGYM_DEFINE_ERROR(NumericError)
ANOMGYM_DEFINE_ERROR(ConfigError)
ANOMGYM_DEFINE_ERROR(LoadError)
ANOMGYM_DEFINE_ERROR(MetricError)
ANOMGYM_DEFINE_ERROR(UsageError)
ANOMGYM_DEFINE_ERROR(InsufficientNeighbors)

#undef ANOMGYM_DEFINE_ERROR

}  // namespace anomgym
