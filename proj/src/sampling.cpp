#include "tubekit/sampling.hpp"

#include <array>
#include <cmath>

namespace tubekit {

namespace {

constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double out = 0.0;
    while (index > 0) {
        out += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return out;
}

}  // namespace

std::vector<Point> probe_points_shrunk(const std::vector<Interval>& box, double fraction, std::size_t count,
                                       std::uint64_t seed) {
    Rng rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<double> shift(box.size());
    for (auto& s : shift) s = uni(rng);

    std::vector<Point> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        Point p(box.size());
        for (std::size_t d = 0; d < box.size(); ++d) {
            double u = radical_inverse(n + 1, kPrimes[d % kPrimes.size()]) + shift[d];
            u -= std::floor(u);
            const double mid = 0.5 * (box[d].lo + box[d].hi);
            const double half = 0.5 * box[d].width() * fraction * 0.9;
            p[d] = mid + (2.0 * u - 1.0) * half;
        }
        out.push_back(std::move(p));
    }
    return out;
}

std::vector<Point> probe_points(const std::vector<Interval>& box, std::size_t count, std::uint64_t seed) {
    return probe_points_shrunk(box, 1.0, count, seed);
}

Vector random_vector(Rng& rng, std::size_t n) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
    return v;
}

Vector random_unit(Rng& rng, const Matrix& g) {
    Vector v = random_vector(rng, static_cast<std::size_t>(g.rows()));
    return v / std::sqrt(v.dot(g * v));
}

Matrix random_orthonormal(Rng& rng, const Matrix& g, std::size_t count) {
    Matrix cols(g.rows(), static_cast<Eigen::Index>(count));
    for (std::size_t c = 0; c < count; ++c) cols.col(static_cast<Eigen::Index>(c)) = random_vector(rng, g.rows());
    return gram_schmidt(cols, g);
}

}  // namespace tubekit
