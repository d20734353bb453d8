// Copyright 2026 the sddjd authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "sddjd/baseline.hpp"
#include "sddjd/errors.hpp"
#include "sddjd/experiments.hpp"
#include "sddjd/io.hpp"
#include "sddjd/matrix_ops.hpp"
#include "sddjd/metrics.hpp"
#include "sddjd/rng.hpp"
#include "sddjd/solver.hpp"
#include "sddjd/synthesis.hpp"
#include "sddjd/types.hpp"
