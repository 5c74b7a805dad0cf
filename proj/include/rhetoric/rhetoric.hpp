// Copyright 2026 The Rhetoric Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Everything except the CLI and the network clients.

#include "rhetoric/analysis.hpp"
#include "rhetoric/annotation.hpp"
#include "rhetoric/csv.hpp"
#include "rhetoric/dataset.hpp"
#include "rhetoric/debate.hpp"
#include "rhetoric/error.hpp"
#include "rhetoric/gateway.hpp"
#include "rhetoric/jsonl.hpp"
#include "rhetoric/log.hpp"
#include "rhetoric/metrics.hpp"
#include "rhetoric/persona.hpp"
#include "rhetoric/prompts.hpp"
#include "rhetoric/random.hpp"
#include "rhetoric/stances.hpp"
#include "rhetoric/stats.hpp"
#include "rhetoric/strategy.hpp"
#include "rhetoric/strategy_guide.hpp"
