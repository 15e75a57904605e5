#include "tubekit/geodesic.hpp"

#include <cmath>
#include <stdexcept>

#include "tubekit/errors.hpp"
#include "tubekit/sampling.hpp"

namespace tubekit {

namespace {

Point to_point(const Vector& v) { return Point(v.data(), v.data() + v.size()); }

Vector to_vector(const Point& p) { return Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())); }

}  // namespace

GeodesicPath integrate_geodesic(const ChristoffelField& gamma, const DomainTest& inside, const Point& p,
                                const Vector& v, double duration, int steps) {
    if (steps < 16) throw std::invalid_argument("geodesic integration needs at least 16 steps");
    if (static_cast<std::size_t>(v.size()) != p.size()) throw ArityError("velocity and point arity differ");

    GeodesicPath path;
    path.times.push_back(0.0);
    path.points.push_back(p);
    path.velocities.push_back(v);
    if (!inside(p)) {
        path.truncated = true;
        return path;
    }

    const double h = duration / steps;
    Vector x = to_vector(p);
    Vector u = v;

    // Returns false when a stage point leaves the domain.
    auto accel = [&](const Vector& xs, const Vector& us, Vector& out) {
        const Point pt = to_point(xs);
        if (!inside(pt)) return false;
        out = -gamma(pt).contract(us, us);
        return true;
    };

    Vector a1, a2, a3, a4;
    for (int s = 0; s < steps; ++s) {
        const Vector k1x = u;
        if (!accel(x, u, a1)) break;
        const Vector k2x = u + 0.5 * h * a1;
        if (!accel(x + 0.5 * h * k1x, k2x, a2)) break;
        const Vector k3x = u + 0.5 * h * a2;
        if (!accel(x + 0.5 * h * k2x, k3x, a3)) break;
        const Vector k4x = u + h * a3;
        if (!accel(x + h * k3x, k4x, a4)) break;

        const Vector xn = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        const Vector un = u + (h / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        if (!inside(to_point(xn))) break;
        x = xn;
        u = un;
        path.times.push_back((s + 1) * h);
        path.points.push_back(to_point(x));
        path.velocities.push_back(u);
    }
    path.truncated = path.times.size() != static_cast<std::size_t>(steps) + 1;
    return path;
}

GeodesicPath integrate_geodesic(const ChartManifold& m, const Point& p, const Vector& v, double duration,
                                int steps) {
    if (p.size() != m.dim()) throw ArityError("point arity does not match chart dimension");
    return integrate_geodesic([&m](const Point& x) { return christoffel_from_jet(m.metric_jet(x)); },
                              [&m](const Point& x) { return m.contains(x); }, p, v, duration, steps);
}

double speed_drift(const ChartManifold& m, const GeodesicPath& path) {
    const Matrix g0 = m.metric_at(path.points.front());
    const double s0 = path.velocities.front().dot(g0 * path.velocities.front());
    double drift = 0.0;
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        const Matrix g = m.metric_at(path.points[i]);
        drift = std::max(drift, std::abs(path.velocities[i].dot(g * path.velocities[i]) - s0));
    }
    return drift;
}

FermiReport verify_fermi_chart(const ChartManifold& m, const TubeSpec& tube, std::size_t samples,
                               std::uint64_t seed, double tol) {
    const std::size_t n = m.dim();
    const std::size_t k = tube.tangential;
    if (k == 0 || k >= n || tube.origin.size() != n - k) throw InvariantViolation("tube does not fit the chart");
    FermiReport report;
    report.tolerance = tol;

    std::vector<Interval> along(m.domain().begin(), m.domain().begin() + static_cast<std::ptrdiff_t>(k));
    const auto feet = probe_points(along, samples, seed);
    Rng rng(seed);
    constexpr int kSteps = 256;

    for (const auto& foot : feet) {
        Point p = foot;
        p.insert(p.end(), tube.origin.begin(), tube.origin.end());
        const Matrix g = m.metric_at(p);
        const Matrix gt = g.bottomRightCorner(n - k, n - k);
        // Coordinate axes in both orientations plus one random direction.
        std::vector<Vector> dirs;
        for (std::size_t a = 0; a < n - k; ++a) {
            Vector e = Vector::Zero(static_cast<Eigen::Index>(n - k));
            e(static_cast<Eigen::Index>(a)) = 1.0;
            dirs.push_back(e);
            dirs.push_back(-e);
        }
        dirs.push_back(random_vector(rng, n - k));
        for (auto& d : dirs) {
            d /= std::sqrt(d.dot(gt * d));
            Vector xi = Vector::Zero(static_cast<Eigen::Index>(n));
            xi.tail(static_cast<Eigen::Index>(n - k)) = d;
            const GeodesicPath path = integrate_geodesic(m, p, xi, tube.epsilon, kSteps);
            ++report.geodesics;
            if (path.truncated) ++report.truncated;
            for (std::size_t s = 0; s < path.points.size(); ++s) {
                const double t = path.times[s];
                double dev = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    dev = std::max(dev, std::abs(path.points[s][i] - (p[i] + t * xi(static_cast<Eigen::Index>(i)))));
                }
                if (dev > report.max_deviation) {
                    report.max_deviation = dev;
                    report.worst_time = t;
                }
            }
        }
    }
    return report;
}

}  // namespace tubekit
