#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "tubekit/chart.hpp"

namespace tubekit {

using Rng = std::mt19937_64;

// Low-discrepancy (Halton, randomly shifted by `seed`) points strictly inside
// the box, keeping a 5% margin from every face.
std::vector<Point> probe_points(const std::vector<Interval>& box, std::size_t count, std::uint64_t seed);

// Same, restricted to the central `fraction` of every interval.
std::vector<Point> probe_points_shrunk(const std::vector<Interval>& box, double fraction, std::size_t count,
                                       std::uint64_t seed);

Vector random_vector(Rng& rng, std::size_t n);
// Unit vector with respect to g.
Vector random_unit(Rng& rng, const Matrix& g);
// `count` g-orthonormal random vectors as columns.
Matrix random_orthonormal(Rng& rng, const Matrix& g, std::size_t count);

}  // namespace tubekit
