// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Each criterion uses its own sample counts and tolerances and, where
// possible, an oracle that does not share code with the quantity under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "tubekit/bundle.hpp"
#include "tubekit/geodesic.hpp"
#include "tubekit/hermitian.hpp"
#include "tubekit/manifest.hpp"
#include "tubekit/sampling.hpp"
#include "tubekit/tube.hpp"

using namespace tubekit;
using Index = Eigen::Index;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (!detail.empty()) detail += "; ";
        detail += what + (ok ? "" : " [fail]");
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ExprMatrix coordinate_field(std::size_t n, std::size_t a) {
    Matrix e = Matrix::Zero(static_cast<Index>(n), 1);
    e(static_cast<Index>(a), 0) = 1.0;
    return ExprMatrix::constant(e);
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Index>(xs.size()));
    Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

Outcome sasaki_construction() {
    Outcome o;
    for (const char* name : {"euclidean2", "sphere_fermi", "halfplane"}) {
        const auto start = std::chrono::steady_clock::now();
        const BundleChart b = build_sasaki(load_manifold(name));
        Rng rng(101);
        double worst = 0.0;
        for (const auto& u : probe_points(b.total.domain(), 100, 101)) {
            const SasakiResiduals s = sasaki_residuals(b, u, rng);
            worst = std::max({worst, s.reconstruction, s.orthogonality, s.lift_norm, s.frame});
        }
        const double elapsed = seconds_since(start);
        o.require(worst <= 1e-9 && elapsed <= 10.0, std::string(name) + " " + fmt(worst) + " in " + fmt(elapsed) + " s");
    }
    return o;
}

Outcome bracket_identities() {
    Outcome o;
    const BundleChart b = build_sasaki(load_manifold("sphere_fermi"));
    double vv = 0, hv = 0, ph = 0, curv = 0, flipped = 0;
    for (const auto& u : probe_points(b.total.domain(), 50, 202)) {
        const BracketReport r = check_bracket_identities(b, coordinate_field(2, 0), coordinate_field(2, 1), u);
        vv = std::max(vv, r.vertical_vertical);
        hv = std::max(hv, r.horizontal_vertical);
        ph = std::max(ph, r.projected_horizontal);
        curv = std::max(curv, r.curvature);
        flipped = std::max(flipped, r.curvature_flipped);
    }
    o.require(vv <= 1e-6, "[Xv,Yv] " + fmt(vv));
    o.require(hv <= 1e-6, "[Xh,Yv] " + fmt(hv));
    o.require(ph <= 1e-6, "pi[Xh,Yh] " + fmt(ph));
    o.require(curv <= 1e-6, "K[Xh,Yh]=R(X,Y)U " + fmt(curv));
    o.detail += " (against -R(X,Y)U: " + fmt(flipped) + ")";
    return o;
}

Outcome h_case_table() {
    Outcome o;
    for (const char* name : {"sphere_fermi", "halfplane"}) {
        const ChartManifold m = load_manifold(name);
        const BundleChart b = build_sasaki(m);
        for (int a : {1, 2}) {
            const ChartManifold bundle = bundle_with_structure(b, a);
            Rng rng(300 + static_cast<std::uint64_t>(a));
            std::string failing;
            double printed_worst = 0.0, derived_worst = 0.0;
            for (int k = 1; k <= 8; ++k) {
                double printed = 0.0;
                for (const auto& u : probe_points(b.total.domain(), 50, 300 + static_cast<std::uint64_t>(k))) {
                    const Matrix f = random_orthonormal(rng, m.metric_at(b.foot(u)), 2);
                    const Vector x = f.col(0), y = f.col(1), z = f.col(static_cast<Index>(rng() % 2));
                    const double direct = bundle_h_direct(b, bundle, k, u, x, y, z);
                    auto closed = [&](HTable t) {
                        return a == 1 ? h1_closed_form(k, b, u, x, y, z, t) : h2_closed_form(k, b, u, x, y, z, t);
                    };
                    printed = std::max(printed, std::abs(direct - closed(HTable::Printed)));
                    derived_worst = std::max(derived_worst, std::abs(direct - closed(HTable::Derived)));
                }
                printed_worst = std::max(printed_worst, printed);
                if (printed > 1e-6) failing += std::to_string(k);
            }
            o.require(printed_worst <= 1e-6, std::string(name) + " h" + std::to_string(a) + " " + fmt(printed_worst) +
                                                 (failing.empty() ? "" : " cases " + failing) +
                                                 " (sign-corrected " + fmt(derived_worst) + ")");
        }
    }
    // Unit sphere, U = 0.1 e2 at the origin, orthonormal e1, e2, e1.
    const BundleChart b = build_sasaki(load_manifold("sphere_fermi"));
    const Point u = {0.0, 0.0, 0.0, 0.1};
    const Vector e1 = vec({1, 0}), e2 = vec({0, 1});
    const double closed = h1_closed_form(2, b, u, e1, e2, e1);
    const double direct = bundle_h_direct(b, bundle_with_structure(b, 1), 2, u, e1, e2, e1);
    o.require(std::abs(closed - 0.025) <= 1e-6, "fixture closed form " + fmt(closed));
    o.require(std::abs(direct - 0.025) <= 1e-6, "fixture direct " + fmt(direct));
    return o;
}

Outcome kaehler_iff_flat() {
    Outcome o;
    auto survey = [](const std::string& name, std::size_t count) {
        const ChartManifold m = load_manifold(name);
        const BundleChart b = build_sasaki(m);
        const ChartManifold bundle = bundle_with_structure(b, 1);
        const std::size_t n = m.dim();
        Rng rng(404);
        double h = 0.0, nabla = 0.0;
        for (const auto& u : probe_points(b.total.domain(), count, 404)) {
            if (b.fiber(u).norm() < 1e-3) continue;  // off the null section only
            const Matrix f = random_orthonormal(rng, m.metric_at(b.foot(u)), std::min<std::size_t>(n, 3));
            const Index w = f.cols();
            for (int k = 1; k <= 8; ++k) {
                h = std::max(h, std::abs(bundle_h_direct(b, bundle, k, u, f.col(0), f.col(1 % w), f.col(2 % w))));
            }
            for (const Matrix& d : covariant_derivative_acs(bundle, u)) nabla = std::max(nabla, d.cwiseAbs().maxCoeff());
        }
        return std::make_pair(h, nabla);
    };
    for (const char* name : {"euclidean2", "euclidean4"}) {
        const auto [h, nabla] = survey(name, 50);
        o.require(h <= 1e-9 && nabla <= 1e-9, std::string(name) + " |h1| " + fmt(h) + " |nabla J1| " + fmt(nabla));
    }
    const auto [h, nabla] = survey("sphere_fermi", 50);
    o.require(h >= 1e-3, "sphere_fermi max |h1| " + fmt(h));
    return o;
}

Outcome deformation_mechanics() {
    Outcome o;
    double profile = 0.0;
    for (const auto& [t, rho] : std::vector<std::pair<double, double>>{{0.1, 0.0}, {0.3, 0.2}, {0.4, 0.4}}) {
        profile = std::max(profile, std::abs(radial_profile(t, 0.4) - rho));
    }
    o.require(profile <= 1e-12, "profile " + fmt(profile));

    const AdaptedTube tube = make_tube(load_manifold("sphere_fermi"));
    const PiecewiseField metric = deform_metric(tube);
    // Inner points see the equator metric, annulus points the latitude 2t − ε.
    const std::vector<std::pair<Point, double>> fixtures = {
        {{0.7, 0.1}, 1.0}, {{0.7, 0.3}, std::pow(std::cos(0.2), 2)}, {{0.7, 0.5}, std::pow(std::cos(0.5), 2)}};
    double worst = 0.0;
    for (const auto& [x, expected] : fixtures) worst = std::max(worst, std::abs(metric.evaluate(x).value(0, 0) - expected));
    o.require(worst <= 1e-5, "g_phiphi fixtures " + fmt(worst));
    o.detail += " (annulus value " + std::to_string(metric.evaluate({0.7, 0.3}).value(0, 0)) + ")";
    const double jump = interface_jump(metric, 50, 505);
    o.require(jump <= 1e-8, "interface jump " + fmt(jump));
    return o;
}

TotallyGeodesicReport totally_geodesic(const PiecewiseField& metric) {
    TotallyGeodesicOptions opts;
    opts.samples = 50;
    opts.tol = 1e-8;
    opts.drift_tol = 1e-5;
    opts.duration = 1.0;
    opts.steps = 256;
    return verify_totally_geodesic(metric, opts);
}

Outcome totally_geodesic_tubes(const PiecewiseField& equator, const PiecewiseField& null_section) {
    Outcome o;
    for (const auto& [label, metric] : {std::pair{"equator", &equator}, std::pair{"null section", &null_section}}) {
        const TotallyGeodesicReport r = totally_geodesic(*metric);
        o.require(r.algebraic.pass(), std::string(label) + " residual " + fmt(r.algebraic.max_residual));
        o.require(r.drift.pass() && r.truncated == 0, std::string(label) + " drift " + fmt(r.drift.max_residual));
    }
    return o;
}

Outcome inner_flatness(const PiecewiseField& equator, const PiecewiseField& null_section) {
    Outcome o;
    const FlatInnerReport eq = verify_flat_inner(equator, 50, 707);
    const FlatInnerReport ns = verify_flat_inner(null_section, 50, 707);
    o.require(eq.transverse_check().pass(), "equator transverse " + fmt(eq.transverse));
    o.require(ns.transverse_check().pass(), "null section transverse " + fmt(ns.transverse));
    o.require(eq.full_check().pass(), "equator full " + fmt(eq.full));
    o.detail += " (null section full " + fmt(ns.full) + ")";
    return o;
}

Outcome parallel_structure(const KaehlerTube& k) {
    Outcome o;
    const TubeCheck inner = verify_parallel_J(k.metric, k.j1, RegionTag::InnerDisk, 50, 808, 1e-5);
    o.require(inner.pass(), "inner nabla J1 " + fmt(inner.max_residual) + " over " + std::to_string(inner.samples));
    // Control: the undeformed Sasaki pair at an exterior point.
    const ChartManifold bundle = bundle_with_structure(k.bundle, 1);
    const Point x = sample_region(k.tube, RegionTag::Exterior, 1, 808).at(0);
    double control = 0.0;
    for (const Matrix& d : covariant_derivative_acs(bundle, x)) control = std::max(control, d.cwiseAbs().maxCoeff());
    o.require(control > 1e-3, "exterior control " + fmt(control));
    return o;
}

bool exactly_u4(const GHClassReport& r) {
    return r.member("U4") && !r.member("K") && !r.member("U1") && !r.member("U2") && !r.member("U3");
}

Outcome class_preservation() {
    Outcome o;
    GHOptions opts;
    opts.tol = 1e-6;
    const ChartManifold kahler = load_manifold("kahler_r6");
    const GHClassReport kb = gh_classify(kahler, opts);
    const GHClassReport kt = classify_tube(build_kaehler_tube(kahler), 2, opts);
    o.require(kb.tightest() == "K", "kahler_r6 " + kb.tightest());
    o.require(kt.tightest() == "K", "kahler_r6 tube " + kt.tightest());
    const ChartManifold conformal = load_manifold("conformal_r6");
    const GHClassReport cb = gh_classify(conformal, opts);
    const GHClassReport ct = classify_tube(build_kaehler_tube(conformal), 2, opts);
    o.require(exactly_u4(cb), "conformal_r6 " + cb.tightest());
    o.require(exactly_u4(ct), "conformal_r6 tube " + ct.tightest());
    return o;
}

Outcome hyper_stage() {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    HyperStageOptions opts;
    opts.samples = 20;
    opts.quaternion_tol = 1e-8;
    opts.parallel_tol = 1e-4;
    const HyperStageReport r = build_hyper_stage(load_manifold("curve1"), opts);
    const double elapsed = seconds_since(start);
    o.require(r.quaternion.pass(), "quaternion " + fmt(r.quaternion.max_residual));
    for (std::size_t a = 0; a < 3; ++a) {
        o.require(r.parallel[a].pass(), "nabla J" + std::to_string(a + 1) + "' " + fmt(r.parallel[a].max_residual));
    }
    o.require(elapsed <= 300.0, "runtime " + fmt(elapsed) + " s");
    return o;
}

// Central differences of the numeric metric, independent of the symbolic path.
Christoffel christoffel_fd(const ChartManifold& m, const Point& p) {
    const std::size_t n = m.dim();
    const double h = 1e-5;
    std::vector<Matrix> dg(n);
    for (std::size_t a = 0; a < n; ++a) {
        Point plus = p, minus = p;
        plus[a] += h;
        minus[a] -= h;
        dg[a] = (m.metric_at(plus) - m.metric_at(minus)) / (2 * h);
    }
    const Matrix ginv = m.metric_at(p).inverse();
    Christoffel gamma(n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t l = 0; l < n; ++l) {
                    const auto L = static_cast<Index>(l), I = static_cast<Index>(i), J = static_cast<Index>(j);
                    s += ginv(static_cast<Index>(k), L) * (dg[i](L, J) + dg[j](L, I) - dg[l](I, J));
                }
                gamma(k, i, j) = 0.5 * s;
            }
        }
    }
    return gamma;
}

Outcome cross_oracle() {
    Outcome o;
    double worst = 0.0;
    std::string worst_name;
    for (const auto& entry : list_manifolds()) {
        const ChartManifold m = load_manifest(entry.path);
        for (const auto& p : probe_points(m.domain(), 20, 1111)) {
            const Christoffel a = christoffel(m, p), b = christoffel_fd(m, p);
            for (std::size_t i = 0; i < a.data().size(); ++i) {
                const double d = std::abs(a.data()[i] - b.data()[i]);
                if (d > worst) {
                    worst = d;
                    worst_name = entry.name;
                }
            }
        }
    }
    o.require(worst <= 1e-6, "symbolic vs fd " + fmt(worst) + (worst_name.empty() ? "" : " (" + worst_name + ")"));

    // Great circle through the origin with direction (0.6, 0.8).
    const ChartManifold sphere = load_manifold("sphere_fermi");
    const double a = 0.6, b = 0.8, T = 1.0;
    const double s = std::asin(b * std::sin(T)), phi = std::atan2(a * std::sin(T), std::cos(T));
    auto error = [&](int steps) {
        const GeodesicPath path = integrate_geodesic(sphere, {0.0, 0.0}, vec({a, b}), T, steps);
        return std::hypot(path.end_point()[0] - phi, path.end_point()[1] - s);
    };
    const double e16 = error(16), e32 = error(32), e64 = error(64);
    const double order = std::log2(std::sqrt((e16 / e32) * (e32 / e64)));
    o.require(order >= 3.7 && order <= 4.5, "RK4 observed order " + fmt(order));
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::string& title, const std::function<Outcome()>& run) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        if (!o.pass) ++failures;
        std::printf("%s criterion %2d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
                    seconds_since(start));
        std::fflush(stdout);
    };

    const ChartManifold sphere = load_manifold("sphere_fermi");
    const PiecewiseField equator = deform_metric(make_tube(sphere));
    const KaehlerTube sphere_bundle = build_kaehler_tube(sphere);

    report(1, "sasaki construction", sasaki_construction);
    report(2, "lift brackets", bracket_identities);
    report(3, "h case table", h_case_table);
    report(4, "kaehler iff flat base", kaehler_iff_flat);
    report(5, "deformation mechanics", deformation_mechanics);
    report(6, "totally geodesic tubes", [&] { return totally_geodesic_tubes(equator, sphere_bundle.metric); });
    report(7, "inner tube curvature", [&] { return inner_flatness(equator, sphere_bundle.metric); });
    report(8, "parallel J1 on inner tube", [&] { return parallel_structure(sphere_bundle); });
    report(9, "class preservation", class_preservation);
    report(10, "hyperhermitian stage", hyper_stage);
    report(11, "cross-oracle differentiation", cross_oracle);

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
