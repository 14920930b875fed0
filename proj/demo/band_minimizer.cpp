// Copyright 2026 The StrokeForge Authors
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

// Where a disc on a straight band settles, for a few growth exponents.

#include <strokeforge/band_profile.hpp>

#include <cstdio>

int main() {
    using namespace strokeforge;
    BandModel m{10.0, 1.0, 1.0, 1.0};
    std::printf("R = %.1f, c1 = %.1f, c2 = %.1f\n", m.R, m.c1, m.c2);
    std::printf("alpha = 1 closed form: r* = %.9f\n", closed_form_minimizer_alpha1(m));
    for (double alpha : {0.25, 0.5, 1.0, 2.0}) {
        m.alpha = alpha;
        std::printf("alpha = %.2f grid search: r* = %.9f\n", alpha, grid_minimizer(m));
    }
    return 0;
}
