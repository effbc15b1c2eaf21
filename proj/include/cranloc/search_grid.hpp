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

#pragma once

#include <cstddef>
#include <vector>

#include "cranloc/scenario.hpp"

namespace cranloc
{

/// Position lattice over the region plus the t0 grid resolution.
struct SearchGrid
{
    double spacing = 25.0;   // meters
    int t0_oversampling = 1; // q_t0
    int zoom_rounds = 2;
    int zoom_factor = 5;

    void validate() const;
};

/// Row-major lattice (y outer, x inner) with the given spacing, anchored at the region's lower-left corner.
std::vector<Position> lattice_points(const Region &region, double spacing);

struct LatticeMaximum
{
    Position position;
    double score = 0.0;
    std::size_t evaluations = 0;
};

/// Exhaustive maximization over the lattice followed by nested zoom rounds
/// around the incumbent. Equal scores keep the earliest (row-major) point.
template <class ScoreFn>
LatticeMaximum maximize_over_lattice(const Region &region, const SearchGrid &grid, ScoreFn &&score)
{
    grid.validate();
    const auto points = lattice_points(region, grid.spacing);
    if (points.empty())
        throw ScenarioError("maximize_over_lattice: empty search grid");

    LatticeMaximum best;
    bool first = true;
    for (const auto &p : points)
    {
        const double s = score(p);
        ++best.evaluations;
        if (first || s > best.score)
        {
            best.position = p;
            best.score = s;
            first = false;
        }
    }

    double spacing = grid.spacing;
    for (int round = 0; round < grid.zoom_rounds; ++round)
    {
        const double fine = spacing / grid.zoom_factor;
        const Position centre = best.position;
        for (int iy = -grid.zoom_factor; iy <= grid.zoom_factor; ++iy)
            for (int ix = -grid.zoom_factor; ix <= grid.zoom_factor; ++ix)
            {
                if (ix == 0 && iy == 0)
                    continue;
                const Position p{centre.x + ix * fine, centre.y + iy * fine};
                if (!region.contains(p))
                    continue;
                const double s = score(p);
                ++best.evaluations;
                if (s > best.score)
                {
                    best.position = p;
                    best.score = s;
                }
            }
        spacing = fine;
    }
    return best;
}

} // namespace cranloc
