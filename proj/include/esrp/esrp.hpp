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

// Umbrella header for the whole simulator.

#include "esrp/adversary.hpp"
#include "esrp/attack_profile.hpp"
#include "esrp/clustering.hpp"
#include "esrp/codec.hpp"
#include "esrp/energy.hpp"
#include "esrp/engine.hpp"
#include "esrp/errors.hpp"
#include "esrp/json_io.hpp"
#include "esrp/metrics.hpp"
#include "esrp/rng.hpp"
#include "esrp/scenario.hpp"
#include "esrp/security.hpp"
#include "esrp/security_role.hpp"
#include "esrp/topology.hpp"
