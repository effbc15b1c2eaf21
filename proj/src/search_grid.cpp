// SPDX-License-Identifier: Apache-2.0
//
// cranloc: source localization over capacity-limited C-RAN fronthaul
// Copyright (C) 2026 The cranloc authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cranloc/search_grid.hpp"

#include <cmath>

namespace cranloc
{

void SearchGrid::validate() const
{
    if (!(spacing > 0.0))
        throw ScenarioError("SearchGrid: spacing must be positive");
    if (t0_oversampling < 1)
        throw ScenarioError("SearchGrid: t0 oversampling must be >= 1");
    if (zoom_rounds < 0 || zoom_factor < 2)
        throw ScenarioError("SearchGrid: zoom rounds must be >= 0 and zoom factor >= 2");
}

std::vector<Position> lattice_points(const Region &region, double spacing)
{
    std::vector<Position> points;
    if (!(spacing > 0.0) || region.width() < 0.0 || region.height() < 0.0)
        return points;
    const auto nx = static_cast<std::size_t>(std::floor(region.width() / spacing + 1e-9)) + 1;
    const auto ny = static_cast<std::size_t>(std::floor(region.height() / spacing + 1e-9)) + 1;
    points.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy)
        for (std::size_t ix = 0; ix < nx; ++ix)
            points.push_back({region.x_min + static_cast<double>(ix) * spacing,
                              region.y_min + static_cast<double>(iy) * spacing});
    return points;
}

} // namespace cranloc
