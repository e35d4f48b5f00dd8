// Copyright 2026 The hamxform Authors
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

// Reads the Hamiltonian hidden inside a SeedOracle. Reference computations
// and tests only; engine.hpp must never include this header (enforced by
// tests/blackbox_lint_test.cpp).

#pragma once

#include "hamxform/seed_oracle.hpp"

namespace hamxform {

struct WhiteBox {
  static const PauliSum& hamiltonian(const SeedOracle& oracle) { return oracle.hamiltonian_; }
};

}  // namespace hamxform
