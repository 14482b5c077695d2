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

#include "slitqubit/fixtures.hpp"

#include "slitqubit/forward.hpp"

namespace slitqubit::fixtures {

namespace {

ComplexMatrix from_rows(const std::array<std::array<cplx, 4>, 4>& rows) {
  ComplexMatrix m(4, 4);
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

const CountTable& pauli_counts() {
  static const CountTable counts = {{
      {77, 14838, 995, 999, 957, 967},
      {14885, 66, 993, 888, 953, 970},
      {1032, 1071, 643, 22, 340, 288},
      {1050, 986, 22, 595, 290, 313},
      {1063, 1053, 309, 308, 554, 29},
      {1008, 1049, 320, 276, 17, 576},
  }};
  return counts;
}

SettingTable pauli_probabilities() {
  SettingTable t;
  t.p = {{
      {0.003, 0.497, 0.253, 0.262, 0.252, 0.248},
      {0.498, 0.002, 0.252, 0.233, 0.251, 0.249},
      {0.245, 0.255, 0.486, 0.017, 0.275, 0.227},
      {0.258, 0.242, 0.017, 0.480, 0.243, 0.255},
      {0.258, 0.256, 0.254, 0.262, 0.484, 0.025},
      {0.238, 0.248, 0.256, 0.228, 0.014, 0.477},
  }};
  return t;
}

DensityMatrix pauli_state() {
  using c = cplx;
  return DensityMatrix(from_rows({{
      {c(0.003, 0), c(-0.005, -0.007), c(-0.006, 0.000), c(0.002, -0.006)},
      {c(-0.005, 0.007), c(0.498, 0), c(0.463, -0.024), c(0.009, 0.001)},
      {c(-0.006, 0.000), c(0.463, 0.024), c(0.497, 0), c(0.008, -0.007)},
      {c(0.002, 0.006), c(0.009, -0.001), c(0.008, 0.007), c(0.002, 0)},
  }}));
}

DensityMatrix scan_state() {
  using c = cplx;
  return DensityMatrix(from_rows({{
      {c(0.008, 0), c(0.008, -0.012), c(0.015, 0.021), c(-0.018, -0.001)},
      {c(0.008, 0.012), c(0.485, 0), c(0.347, -0.038), c(0.002, -0.027)},
      {c(0.015, -0.021), c(0.347, 0.038), c(0.469, 0), c(0.008, 0.005)},
      {c(-0.018, 0.001), c(0.002, 0.027), c(0.008, -0.005), c(0.038, 0)},
  }}));
}

OpticalGeometry geometry() { return OpticalGeometry::reference_double_slit(); }

EfficiencyRatios recovered_efficiency_ratios() {
  const CountTable& c = pauli_counts();
  const SettingTable printed = pauli_probabilities();
  auto ratio = [&](int k) {
    const CountBlock raw = {{{c[k][k], c[k][k + 1]}, {c[k + 1][k], c[k + 1][k + 1]}}};
    return consistent_efficiency_ratio(raw, printed.p[k][k], printed.p[k + 1][k + 1]);
  };
  return {ratio(2), ratio(4)};
}

SettingTable normalize_counts(const CountTable& counts, EfficiencyRatios ratios) {
  const std::array<double, 3> pair_ratio = {1.0, ratios.x, ratios.y};
  SettingTable t;
  for (int j = 0; j < 3; ++j) {
    for (int i = 0; i < 3; ++i) {
      CountBlock raw;
      for (int b = 0; b < 2; ++b) {
        for (int a = 0; a < 2; ++a) raw[b][a] = counts[2 * j + b][2 * i + a];
      }
      // Normalization is scale free, so the two arms can be corrected one
      // after the other.
      const CountBlock p = normalize_block(normalize_block(raw, pair_ratio[i], {true, false}),
                                           pair_ratio[j], {false, true});
      for (int b = 0; b < 2; ++b) {
        for (int a = 0; a < 2; ++a) t.p[2 * j + b][2 * i + a] = p[b][a];
      }
    }
  }
  return t;
}

const std::vector<Fixture>& all() {
  static const std::vector<Fixture> fixtures = {
      {"table1a", "raw six-setting coincidence counts (rows arm B, columns arm A)",
       pauli_counts()},
      {"table1b", "normalized six-setting probabilities", pauli_probabilities()},
      {"pauli-state", "two-qubit state from the six-setting table", pauli_state()},
      {"scan-state", "two-qubit state from conditional scans at z = 1.8f", scan_state()},
      {"geometry", "40 um slits, 150 um apart, 810 nm, f = 50 mm, L = 2f, z = 1.8f",
       geometry()},
  };
  return fixtures;
}

const Fixture* find(std::string_view name) {
  if (name.starts_with("./")) name.remove_prefix(2);
  if (name.starts_with("fixtures/")) name.remove_prefix(9);
  if (const auto dot = name.rfind('.'); dot != std::string_view::npos) name = name.substr(0, dot);
  for (const Fixture& f : all()) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

}  // namespace slitqubit::fixtures
