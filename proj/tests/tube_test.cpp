#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "tubekit/errors.hpp"
#include "tubekit/manifest.hpp"
#include "tubekit/sampling.hpp"
#include "tubekit/tube.hpp"

using namespace tubekit;
using fixtures::vec;

namespace {

AdaptedTube equator() { return make_tube(load_manifold("sphere_fermi")); }

TubeOptions fast() {
    TubeOptions o;
    o.verify_adapted = false;
    return o;
}

double max_diff(const Christoffel& a, const Christoffel& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double max_abs(const std::vector<Matrix>& ms) {
    double m = 0.0;
    for (const auto& x : ms) m = std::max(m, x.cwiseAbs().maxCoeff());
    return m;
}

// The inner branch of a null-section tube written out symbolically: fiber
// coordinates replaced by zero in the source field.
ExprMatrix frozen(const ExprMatrix& field, std::size_t base_dim) {
    std::vector<std::optional<ScalarExpr>> sub(2 * base_dim);
    for (std::size_t a = base_dim; a < 2 * base_dim; ++a) sub[a] = ScalarExpr::constant(0.0);
    return field.substituted(sub);
}

}  // namespace

TEST(RadialProfile, Fixtures) {
    EXPECT_EQ(radial_profile(0.1, 0.4), 0.0);
    EXPECT_NEAR(radial_profile(0.3, 0.4), 0.2, 1e-15);
    EXPECT_NEAR(radial_profile(0.4, 0.4), 0.4, 1e-15);
    EXPECT_EQ(radial_profile(0.5, 0.4), 0.5);
    EXPECT_EQ(radial_profile(0.2, 0.4), 0.0);
}

TEST(RadialProfile, ContinuousAndPiecewiseAffine) {
    const double eps = 0.7;
    for (double t : {0.5 * eps, eps}) {
        EXPECT_NEAR(radial_profile(t * (1 - 1e-12), eps), radial_profile(t * (1 + 1e-12), eps), 1e-11);
    }
    for (double t = 0.36; t < 0.69; t += 0.01) {
        EXPECT_NEAR(radial_profile(t + 1e-3, eps) - radial_profile(t, eps), 2e-3, 1e-12);
    }
}

TEST(RadialDecompose, EquatorFixtures) {
    const auto tube = equator();
    const auto a = radial_decompose(tube, {0.7, 0.3});
    EXPECT_EQ(a.foot, (Point{0.7, 0.0}));
    EXPECT_NEAR(a.t, 0.3, 1e-15);
    EXPECT_EQ(a.tag, RegionTag::Annulus);
    EXPECT_NEAR(a.xi(0), 1.0, 1e-15);

    const auto b = radial_decompose(tube, {0.7, 0.1});
    EXPECT_NEAR(b.t, 0.1, 1e-15);
    EXPECT_EQ(b.tag, RegionTag::InnerDisk);

    const auto c = radial_decompose(tube, {0.7, 0.0});
    EXPECT_EQ(c.t, 0.0);
    EXPECT_EQ(c.tag, RegionTag::InnerDisk);
    EXPECT_EQ(c.xi.norm(), 0.0);

    const auto d = radial_decompose(tube, {0.7, -0.9});
    EXPECT_EQ(d.tag, RegionTag::Exterior);
    EXPECT_NEAR(d.xi(0), -1.0, 1e-15);
}

TEST(RadialDecompose, RegionPartitionMatchesHandRadius) {
    // g_ss = 1, so the radius is |s|.
    const auto tube = equator();
    const double eps = 0.4, guard = 1e-3 * eps;
    int guarded = 0;
    for (const auto& x : probe_points(tube.ambient.domain(), 2000, 5)) {
        const double t = std::abs(x[1]);
        RegionTag expect = t <= eps / 2 ? RegionTag::InnerDisk : t < eps ? RegionTag::Annulus : RegionTag::Exterior;
        if (std::abs(t - eps / 2) < guard || std::abs(t - eps) < guard) expect = RegionTag::BoundaryGuard;
        const auto r = radial_decompose(tube, x);
        EXPECT_EQ(r.tag, expect);
        EXPECT_NE(r.region, RegionTag::BoundaryGuard);
        guarded += r.tag == RegionTag::BoundaryGuard;
    }
    for (double t : {0.2, 0.4}) {
        EXPECT_EQ(radial_decompose(tube, {0.0, t + 0.5 * guard}).tag, RegionTag::BoundaryGuard);
        EXPECT_EQ(radial_decompose(tube, {0.0, -t - 0.5 * guard}).tag, RegionTag::BoundaryGuard);
    }
    EXPECT_LT(guarded, 20);
}

TEST(RadialDecompose, UsesFootMetricOnTransverseBlock) {
    // Null section over halfplane: the fiber norm is v/y at foot (x, y).
    const auto k = build_kaehler_tube(load_manifold("halfplane"), fast());
    const auto r = radial_decompose(k.tube, {0.3, 2.0, 0.1, -0.2});
    EXPECT_NEAR(r.t, std::sqrt(0.01 + 0.04) / 2.0, 1e-14);
    EXPECT_EQ(r.foot, (Point{0.3, 2.0, 0.0, 0.0}));
}

TEST(MakeTube, RejectsBadTubes) {
    const auto e2 = load_manifold("euclidean2");
    EXPECT_THROW(make_tube(e2, TubeSpec{0, 0.4, {0, 0}}), InvariantViolation);
    EXPECT_THROW(make_tube(e2, TubeSpec{2, 0.4, {}}), InvariantViolation);
    EXPECT_THROW(make_tube(e2, TubeSpec{1, 0.0, {0}}), InvariantViolation);
    EXPECT_THROW(make_tube(e2, TubeSpec{1, 2.5, {0}}), InvariantViolation);
    EXPECT_THROW(make_tube(e2, TubeSpec{1, 0.4, {0, 0}}), InvariantViolation);
    EXPECT_THROW(make_tube(load_manifold("curve1")), InvariantViolation);
    // Vertical rays of the halfplane chart are not unit-speed geodesics.
    EXPECT_THROW(make_tube(load_manifold("halfplane")), InvariantViolation);
    EXPECT_NO_THROW(make_tube(load_manifold("halfplane"), fast()));
    EXPECT_NO_THROW(make_tube(e2));
    EXPECT_NO_THROW(make_tube(load_manifold("euclidean4")));
}

TEST(DeformField, EquatorMetricFixtures) {
    const auto g = deform_metric(equator());
    const auto a = g.evaluate({0.7, 0.1});
    EXPECT_NEAR(a.value(0, 0), 1.0, 1e-15);
    EXPECT_EQ(a.tag, RegionTag::InnerDisk);
    const auto b = g.evaluate({0.7, 0.3});
    EXPECT_NEAR(b.value(0, 0), std::pow(std::cos(0.2), 2), 1e-14);
    EXPECT_EQ(b.tag, RegionTag::Annulus);
    const auto c = g.evaluate({0.7, 0.5});
    EXPECT_NEAR(c.value(0, 0), std::pow(std::cos(0.5), 2), 1e-15);
    EXPECT_NEAR(c.value(0, 0), 0.77015, 1e-5);
    EXPECT_EQ(c.tag, RegionTag::Exterior);
    EXPECT_NEAR(g.evaluate({0.7, -0.3}).value(0, 0), std::pow(std::cos(0.2), 2), 1e-14);
    EXPECT_EQ(g.evaluate({0.7, 0.3}).value(1, 1), 1.0);
}

TEST(DeformField, ErrorsAndValence) {
    const auto g = deform_metric(equator());
    EXPECT_THROW(g.evaluate({0.0, 1.4}), OutsideDomain);
    EXPECT_THROW(g.evaluate({0.0}), ArityError);
    EXPECT_EQ(g.valence(), (std::array<int, 2>{0, 2}));
    ExprMatrix wide(1, 1);
    wide(0, 0) = ScalarExpr::coordinate(4);
    EXPECT_THROW(deform_field(wide, equator(), {0, 0}), ArityError);
}

TEST(DeformField, ContinuousAcrossInterfaces) {
    EXPECT_LE(interface_jump(deform_metric(equator()), 50, 1), 1e-8);
    const auto k = build_kaehler_tube(load_manifold("sphere_fermi"), fast());
    EXPECT_LE(interface_jump(k.metric, 50, 2), 1e-8);
    EXPECT_LE(interface_jump(k.j1, 50, 3), 1e-8);
    const auto h = build_kaehler_tube(load_manifold("halfplane"), fast());
    EXPECT_LE(interface_jump(h.metric, 50, 4), 1e-8);
    EXPECT_LE(interface_jump(*h.j2, 50, 5), 1e-8);
    // The field does change across the annulus, so the jumps above are not vacuous.
    const double v = 0.35 / std::cos(0.9);
    EXPECT_EQ(k.metric.evaluate({0.3, 0.9, v, 0.0}).tag, RegionTag::Exterior);
    EXPECT_GT(std::abs(k.metric.evaluate({0.3, 0.9, v, 0.0}).value(0, 0) -
                       k.metric.evaluate({0.3, 0.9, 0.0, 0.0}).value(0, 0)),
              1e-2);
}

TEST(DeformField, IdentityOnConstantFields) {
    const auto tube = equator();
    Matrix c(2, 2);
    c << 1.5, -0.25, 0.75, 2.0;
    const auto f = deform_field(ExprMatrix::constant(c), tube, {1, 1});
    for (const auto& x : probe_points(tube.ambient.domain(), 200, 8)) {
        EXPECT_EQ(f.evaluate(x).value, c);
    }
    const auto flat = deform_metric(make_tube(load_manifold("euclidean4")));
    for (const auto& x : probe_points(flat.tube().ambient.domain(), 200, 9)) {
        EXPECT_EQ(flat.evaluate(x).value, Matrix::Identity(4, 4));
    }
}

TEST(DeformField, SubmanifoldIsometryAndExteriorIdentity) {
    const auto k = build_kaehler_tube(load_manifold("sphere_fermi"), fast());
    const auto& total = k.bundle.total;
    for (const auto& p : sample_submanifold(k.tube, 50, 3)) {
        EXPECT_LE((k.metric.evaluate(p).value - total.metric_at(p)).cwiseAbs().maxCoeff(), 1e-12);
    }
    for (const auto& x : sample_region(k.tube, RegionTag::Exterior, 30, 4)) {
        EXPECT_EQ(k.metric.evaluate(x).value, total.metric_at(x));
        EXPECT_EQ(k.j1.evaluate(x).value, bundle_structure(k.bundle, 1).evaluate(x));
    }
}

TEST(DeformField, RetractionStaysBetweenFootAndPoint) {
    const auto k = build_kaehler_tube(load_manifold("conformal_r6"), fast());
    for (const auto& x : sample_region(k.tube, RegionTag::Annulus, 20, 6)) {
        const auto r = radial_decompose(k.tube, x);
        const Point y = retract(k.tube, x, RegionTag::Annulus);
        const auto ry = radial_decompose(k.tube, y);
        EXPECT_EQ(ry.foot, r.foot);
        EXPECT_NEAR(ry.t, radial_profile(r.t, k.tube.epsilon), 1e-12);
        EXPECT_LE((ry.xi - r.xi).norm(), 1e-9);
    }
}

TEST(Sampling, RegionsAndSubmanifold) {
    const auto k = build_kaehler_tube(load_manifold("sphere_fermi"), fast());
    for (RegionTag tag : {RegionTag::InnerDisk, RegionTag::Annulus, RegionTag::Exterior}) {
        const auto pts = sample_region(k.tube, tag, 30, 1);
        EXPECT_EQ(pts.size(), 30u);
        for (const auto& x : pts) {
            EXPECT_EQ(radial_decompose(k.tube, x).tag, tag);
            EXPECT_TRUE(k.tube.ambient.contains(x));
        }
        EXPECT_EQ(pts, sample_region(k.tube, tag, 30, 1));
    }
    EXPECT_TRUE(sample_region(k.tube, RegionTag::BoundaryGuard, 5, 1).empty());
    for (const auto& p : sample_submanifold(k.tube, 10, 2)) EXPECT_EQ(radial_decompose(k.tube, p).t, 0.0);
}

TEST(DeformedChristoffel, EquatorRegions) {
    const auto g = deform_metric(equator());
    // Inner disk: ḡ = dφ² + ds², constant.
    for (const auto& x : sample_region(g.tube(), RegionTag::InnerDisk, 20, 1)) {
        EXPECT_LE(deformed_christoffel(g, x).max_abs(), 1e-12);
    }
    // Exterior: the source connection.
    for (const auto& x : sample_region(g.tube(), RegionTag::Exterior, 20, 2)) {
        EXPECT_LE(max_diff(deformed_christoffel(g, x), christoffel(g.tube().ambient, x)), 1e-6);
    }
    // Annulus, by hand: ḡ_φφ = cos²u, u = 2|s| − ε, so Γ^s_φφ = sin 2u · sgn s and
    // Γ^φ_φs = −2 tan u · sgn s.
    for (double s : {0.25, 0.3, 0.37, -0.33}) {
        const double u = 2 * std::abs(s) - 0.4, sg = s > 0 ? 1.0 : -1.0;
        const Christoffel c = deformed_christoffel(g, {0.4, s});
        EXPECT_NEAR(c(1, 0, 0), std::sin(2 * u) * sg, 1e-8);
        EXPECT_NEAR(c(0, 0, 1), -2 * std::tan(u) * sg, 1e-8);
        EXPECT_NEAR(c(0, 1, 0), -2 * std::tan(u) * sg, 1e-8);
        EXPECT_NEAR(c(1, 1, 1), 0.0, 1e-12);
    }
}

TEST(DeformedChristoffel, GuardShellsThrow) {
    const auto g = deform_metric(equator());
    const double guard = 1e-3 * 0.4;
    EXPECT_THROW(deformed_christoffel(g, {0.1, 0.2 + 0.3 * guard}), BoundaryGuardViolation);
    EXPECT_THROW(deformed_christoffel(g, {0.1, -0.4 + 0.3 * guard}), BoundaryGuardViolation);
    EXPECT_THROW(deformed_curvature(g, {0.1, 0.4}), BoundaryGuardViolation);
    EXPECT_NO_THROW(deformed_christoffel(g, {0.1, 0.2 + 2 * guard}));
    EXPECT_THROW(deformed_christoffel(g, {0.1, 1.35}), OutsideDomain);
}

TEST(DeformedChristoffel, MatchesSymbolicFrozenChart) {
    // Inner branch of the null-section tube vs the symbolic connection of the
    // same metric with the fiber set to zero.
    for (const char* name : {"sphere_fermi", "halfplane"}) {
        const auto k = build_kaehler_tube(load_manifold(name), fast());
        const ChartManifold fz("frozen", k.bundle.total.coordinate_names(), k.bundle.total.domain(),
                               frozen(k.bundle.total.metric(), 2), frozen(bundle_structure(k.bundle, 1), 2));
        for (const auto& x : sample_region(k.tube, RegionTag::InnerDisk, 20, 3)) {
            EXPECT_LE(max_diff(deformed_christoffel(k.metric, x), christoffel(fz, x)), 1e-7) << name;
            const auto nabla = deformed_nabla_acs(k.metric, k.j1, x);
            const auto exact = covariant_derivative_acs(fz, x);
            for (std::size_t i = 0; i < 4; ++i) EXPECT_LE((nabla[i] - exact[i]).cwiseAbs().maxCoeff(), 1e-7);
        }
    }
}

TEST(TotallyGeodesic, EquatorAndFlatTubes) {
    const auto eq = verify_totally_geodesic(deform_metric(equator()));
    EXPECT_TRUE(eq.pass());
    EXPECT_EQ(eq.algebraic.samples, 50u);
    EXPECT_LE(eq.algebraic.max_residual, 1e-8);
    EXPECT_LE(eq.drift.max_residual, 1e-6);
    EXPECT_EQ(eq.truncated, 0u);
    for (const char* name : {"euclidean2", "euclidean4"}) {
        const auto r = verify_totally_geodesic(deform_metric(make_tube(load_manifold(name))));
        EXPECT_TRUE(r.pass()) << name;
        EXPECT_LE(r.drift.max_residual, 1e-12);
    }
}

TEST(TotallyGeodesic, NullSectionOfSphereBundle) {
    const auto k = build_kaehler_tube(load_manifold("sphere_fermi"));
    EXPECT_TRUE(k.fermi.adapted());
    const auto r = verify_totally_geodesic(k.metric);
    EXPECT_TRUE(r.pass());
    EXPECT_LE(r.drift.max_residual, 1e-5);
}

TEST(TotallyGeodesic, DetectsTiltedSubmanifold) {
    // g_xy = 0.3 sin x makes ḡ(∇_∂x ∂x, ∂y) = ∂_x g_xy = 0.3 cos x on the axis.
    const auto x = ScalarExpr::coordinate(0);
    ExprMatrix g = ExprMatrix::identity(2);
    g(0, 1) = ScalarExpr::constant(0.3) * sin(x);
    g(1, 0) = g(0, 1);
    const ChartManifold m("tilted", {"x", "y"}, {{-1, 1}, {-1, 1}}, g);
    const auto r = verify_totally_geodesic(deform_metric(make_tube(m, TubeSpec{1, 0.4, {0}}, fast())));
    EXPECT_FALSE(r.pass());
    EXPECT_GT(r.algebraic.max_residual, 0.25);
    EXPECT_GT(r.drift.max_residual, 1e-3);
}

TEST(FlatInner, EquatorVanishesEverywhere) {
    const auto r = verify_flat_inner(deform_metric(equator()), 30);
    EXPECT_EQ(r.samples, 30u);
    EXPECT_EQ(r.blocks.size(), 16u);
    EXPECT_LE(r.full, 1e-6);
    EXPECT_TRUE(r.full_check().pass());
    EXPECT_TRUE(r.transverse_check().pass());
}

TEST(FlatInner, NullSectionTransverseBlockOnly) {
    const auto k = build_kaehler_tube(load_manifold("sphere_fermi"), fast());
    const auto r = verify_flat_inner(k.metric, 30);
    EXPECT_LE(r.transverse, 1e-6);
    // The frozen metric diag(g, g) still curves along the base.
    EXPECT_GT(r.blocks.at("TTTT"), 0.5);
    EXPECT_GT(r.full, 0.5);
    EXPECT_FALSE(r.full_check().pass());
}

TEST(FlatInner, ExteriorKeepsSourceCurvature) {
    const auto g = deform_metric(equator());
    for (const auto& x : sample_region(g.tube(), RegionTag::Exterior, 10, 4)) {
        const Riemann r = deformed_curvature(g, x);
        const Matrix gx = g.tube().ambient.metric_at(x);
        // Sectional curvature of the coordinate plane: g(R(∂φ, ∂s)∂s, ∂φ) / det g.
        const double rs = gx.row(0).dot(r.apply(vec({1, 0}), vec({0, 1}), vec({0, 1}))) / gx.determinant();
        EXPECT_NEAR(rs, 1.0, 1e-5);
    }
}

TEST(KaehlerTube, FlatBaseIsIdentity) {
    const auto k = build_kaehler_tube(load_manifold("euclidean2"));
    for (RegionTag tag : {RegionTag::InnerDisk, RegionTag::Annulus, RegionTag::Exterior}) {
        EXPECT_LE(verify_parallel_J(k.metric, k.j1, tag, 20).max_residual, 1e-9);
        for (const auto& x : sample_region(k.tube, tag, 10, 2)) {
            EXPECT_EQ(k.metric.evaluate(x).value, Matrix::Identity(4, 4));
        }
    }
    EXPECT_FALSE(k.j2.has_value());
    EXPECT_THROW(k.structure(2), MissingBaseACS);
    EXPECT_THROW(k.structure(4), BadCase);
}

TEST(KaehlerTube, SphereExteriorIsNotKaehler) {
    const auto k = build_kaehler_tube(load_manifold("sphere_fermi"));
    const auto exterior = verify_parallel_J(k.metric, k.j1, RegionTag::Exterior, 10);
    EXPECT_EQ(exterior.samples, 10u);
    EXPECT_GT(exterior.max_residual, 1e-3);
}

TEST(KaehlerTube, BadBases) {
    EXPECT_THROW(build_kaehler_tube(fixtures::perturbed_r6()), InvariantViolation);
    auto m = load_manifold("sphere_fermi");
    m.fiber_box = 0.2;
    EXPECT_THROW(build_kaehler_tube(m), InvariantViolation);
}

TEST(KaehlerTube, ProductStructureParallelOverKaehlerBase) {
    const auto k = build_kaehler_tube(load_manifold("kahler_r6"), fast());
    for (int a = 1; a <= 3; ++a) {
        EXPECT_LE(verify_parallel_J(k.metric, k.structure(a), RegionTag::InnerDisk, 10).max_residual, 1e-5);
    }
}

TEST(KaehlerTube, ConformalBaseClassesAsU4) {
    const auto k = build_kaehler_tube(load_manifold("conformal_r6"), fast());
    EXPECT_GT(verify_parallel_J(k.metric, *k.j2, RegionTag::InnerDisk, 10).max_residual, 1e-5);
    GHOptions o;
    o.points = 8;
    const auto r = classify_tube(k, 2, o);
    EXPECT_TRUE(r.dimension_valid);
    EXPECT_TRUE(r.member("U4"));
    for (const char* c : {"K", "U1", "U2", "U3"}) EXPECT_FALSE(r.member(c)) << c;
    const auto flat = classify_tube(build_kaehler_tube(load_manifold("kahler_r6"), fast()), 2, o);
    EXPECT_EQ(flat.tightest(), "K");
}

TEST(HyperStage, FlatLineGivesStandardTriple) {
    const auto r = build_hyper_stage(load_manifold("euclidean1"));
    EXPECT_EQ(r.stage2.tube.dim(), 4u);
    EXPECT_LE(r.quaternion.max_residual, 1e-10);
    for (const auto& p : r.parallel) EXPECT_LE(p.max_residual, 1e-10);
    EXPECT_TRUE(r.pass());
    const Point x{0.1, 0.05, 0.02, -0.03};
    const Matrix j1 = r.stage2.j1.evaluate(x).value;
    Matrix expect = Matrix::Zero(4, 4);
    expect.topRightCorner(2, 2) = -Matrix::Identity(2, 2);
    expect.bottomLeftCorner(2, 2) = Matrix::Identity(2, 2);
    EXPECT_LE((j1 - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(HyperStage, CurvedLineExportAndOracle) {
    const auto base = load_manifold("curve1");
    const auto r = build_hyper_stage(base);
    // Stage 1 freezes to f(x)²(dx² + dv²) with the standard rotation.
    for (const auto& p : probe_points(r.stage1.domain(), 20, 2)) {
        const double f = 1 + 0.1 * std::sin(p[0]);
        EXPECT_NEAR((r.stage1.metric_at(p) - f * f * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 0.0, 1e-14);
        EXPECT_EQ(r.stage1.acs_jet(p).J, standard_complex_structure(2));
    }
    const std::string text = serialize_manifest(r.stage1);
    EXPECT_EQ(serialize_manifest(parse_manifest(text)), text);
    EXPECT_EQ(r.quaternion.samples, 20u);
    EXPECT_LE(r.quaternion.max_residual, 1e-8);
    // The deformed stage-2 connection against the symbolic frozen chart.
    const ChartManifold fz("frozen2", r.stage2.bundle.total.coordinate_names(), r.stage2.bundle.total.domain(),
                           frozen(r.stage2.bundle.total.metric(), 2), frozen(bundle_structure(r.stage2.bundle, 1), 2));
    for (const auto& x : sample_region(r.stage2.tube, RegionTag::InnerDisk, 10, 5)) {
        const auto nabla = deformed_nabla_acs(r.stage2.metric, r.stage2.j1, x);
        const auto exact = covariant_derivative_acs(fz, x);
        for (std::size_t i = 0; i < 4; ++i) EXPECT_LE((nabla[i] - exact[i]).cwiseAbs().maxCoeff(), 1e-7);
        EXPECT_NEAR(max_abs(nabla), r.parallel[0].max_residual, r.parallel[0].max_residual);
    }
    for (const auto& p : r.parallel) EXPECT_EQ(p.samples, 20u);
}

TEST(HyperStage, EmptyInnerTube) {
    HyperStageOptions o;
    o.tube.guard_fraction = 0.3;
    o.tube.verify_adapted = false;
    EXPECT_THROW(build_hyper_stage(load_manifold("euclidean1"), o), EmptyInnerTube);
}
