#pragma once

#include <initializer_list>
#include <vector>

#include "wavesum/density.hpp"

namespace fixture {

using wavesum::Space;
using wavesum::Vec4;
using wavesum::density::Configuration;
using wavesum::density::WeightedPoint;

inline Configuration points(int d, std::initializer_list<std::pair<Vec4, double>> pts, bool product = false) {
    Configuration c;
    c.space = Space{d};
    for (const auto& [y, r] : pts) c.points.push_back({y, r, {1.0, 0.0}});
    c.is_product = product;
    return c;
}

// nx x ny x nz lattice at `spacing` times every radius, product structure.
inline Configuration grid3(int nx, int ny, int nz, double spacing, const std::vector<double>& radii) {
    Configuration c;
    c.space = Space{3};
    c.is_product = true;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            for (int k = 0; k < nz; ++k)
                for (double r : radii) c.points.push_back({{i * spacing, j * spacing, k * spacing, 0}, r, {1.0, 0.0}});
    return c;
}

inline wavesum::density::Ids all_ids(const Configuration& c) {
    wavesum::density::Ids ids(c.points.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
    return ids;
}

}  // namespace fixture
