// Copyright 2026 The onabc Authors.
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

// Umbrella header.

#pragma once

#include "onabc/audit.hpp"
#include "onabc/dp/prior.hpp"
#include "onabc/dp/tables.hpp"
#include "onabc/dp/thiele_table.hpp"
#include "onabc/election.hpp"
#include "onabc/proportional.hpp"
#include "onabc/rational.hpp"
#include "onabc/registry.hpp"
#include "onabc/replay.hpp"
#include "onabc/secretary.hpp"
#include "onabc/sim/adversary.hpp"
#include "onabc/sim/rng.hpp"
#include "onabc/sim/simlab.hpp"
#include "onabc/thiele.hpp"
