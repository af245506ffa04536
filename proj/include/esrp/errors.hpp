// Copyright 2026 The ESRP Simulator Authors.
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

namespace esrp {

// Invalid scenario or run configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The sink could not select a first cluster head.
class FormationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A byte buffer does not hold a well-formed packet of the requested type.
class MalformedPacket : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace esrp
