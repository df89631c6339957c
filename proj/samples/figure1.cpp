// Copyright 2026 The lht Authors
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

// Prints the one-way and two-way Hoeffding curves for sqrt(0.1)|00> + sqrt(0.9)|11>.

#include <cstdio>

#include "lht/exponents.hpp"

int main() {
    const auto spec = lht::SchmidtSpectrum::from_lambda(2, 0.1);
    const auto one = lht::make_curve(spec, lht::ClassTag::kOneWay);
    const auto two = lht::make_curve(spec, lht::ClassTag::kTwoWay);
    std::printf("critical rates: one-way %.5f, two-way %.5f\n", one.plateau_rate, two.plateau_rate);
    std::printf("r,one_way,two_way\n");
    for (int i = 0; i <= 20; ++i) {
        const double r = 0.05 * i;
        std::printf("%.2f,%.6f,%.6f\n", r, one(r), two(r));
    }
}
