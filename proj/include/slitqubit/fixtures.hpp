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

// Published reference data for the 40 um / 150 um double slit: the
// six-setting coincidence table (raw counts and normalized
// probabilities), the two reconstructed two-qubit density matrices and
// the optical geometry.

#include <array>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slitqubit/optics.hpp"
#include "slitqubit/quantum.hpp"
#include "slitqubit/tomography.hpp"

namespace slitqubit::fixtures {

using CountTable = std::array<std::array<double, kSettingCount>, kSettingCount>;

// Raw coincidence counts, rows = arm B setting, columns = arm A setting.
const CountTable& pauli_counts();

// Normalized probabilities as printed (three decimals).
SettingTable pauli_probabilities();

// Linear-inversion result of the normalized table, as printed.
DensityMatrix pauli_state();

// State assembled from conditional intermediate-plane scans, as printed.
DensityMatrix scan_state();

OpticalGeometry geometry();

// Per-arm efficiency ratios applied to the second setting of the sigma_x
// pair (|l>-|r>) and of the sigma_y pair (|l>-i|r>). The sigma_z pair sits
// in the image plane and needs none.
struct EfficiencyRatios {
  double x = 1.0;
  double y = 1.0;
};

// Ratios recovered from the diagonal of the xx and yy blocks of the raw
// counts so that they normalize to the printed probabilities.
EfficiencyRatios recovered_efficiency_ratios();

// normalize_block on every 2x2 block, each arm corrected with the ratio of
// its own setting pair.
SettingTable normalize_counts(const CountTable& counts, EfficiencyRatios ratios);

using Payload = std::variant<CountTable, SettingTable, DensityMatrix, OpticalGeometry>;

struct Fixture {
  std::string name;
  std::string description;
  Payload payload;
};

const std::vector<Fixture>& all();

// Accepts the bare name, a "fixtures/" prefix and a file extension.
// Returns nullptr when nothing matches.
const Fixture* find(std::string_view name);

}  // namespace slitqubit::fixtures
