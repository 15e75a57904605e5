#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "tubekit/chart.hpp"

namespace tubekit {

struct GeodesicPath {
    std::vector<double> times;
    std::vector<Point> points;
    std::vector<Vector> velocities;
    // Set when the path left the domain; the path ends at the last inside sample.
    bool truncated = false;

    const Point& end_point() const { return points.back(); }
    const Vector& end_velocity() const { return velocities.back(); }
};

using ChristoffelField = std::function<Christoffel(const Point&)>;
using DomainTest = std::function<bool(const Point&)>;

// Classical fourth-order Runge-Kutta on  ẍ^k + Γ^k_{ij} ẋ^i ẋ^j = 0.
// Requires steps >= 16.
GeodesicPath integrate_geodesic(const ChristoffelField& gamma, const DomainTest& inside, const Point& p,
                                const Vector& v, double duration, int steps);

GeodesicPath integrate_geodesic(const ChartManifold& m, const Point& p, const Vector& v, double duration,
                                int steps);

// max_t |g(ẋ, ẋ) − g(v, v)| along the path.
double speed_drift(const ChartManifold& m, const GeodesicPath& path);

// Checks that transverse coordinate rays p + tξ from points of the tube are
// unit-speed geodesics for t <= epsilon, i.e. that the chart is adapted.
struct FermiReport {
    double max_deviation = 0.0;  // max over geodesics and samples of |x(t) − (p + tξ)|_inf
    double worst_time = 0.0;
    std::size_t geodesics = 0;
    std::size_t truncated = 0;
    double tolerance = 1e-6;
    bool adapted() const { return truncated == 0 && max_deviation <= tolerance; }
};
FermiReport verify_fermi_chart(const ChartManifold& m, const TubeSpec& tube, std::size_t samples,
                               std::uint64_t seed = 1, double tol = 1e-6);

}  // namespace tubekit
