#include "tubekit/tube.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tubekit/errors.hpp"
#include "tubekit/sampling.hpp"

namespace tubekit {

namespace {

using Index = Eigen::Index;

std::vector<Interval> tangential_box(const AdaptedTube& tube) {
    const auto& d = tube.ambient.domain();
    return {d.begin(), d.begin() + static_cast<std::ptrdiff_t>(tube.tangential)};
}

Point foot_point(const AdaptedTube& tube, const Point& x) {
    Point p(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(tube.tangential));
    for (Index a = 0; a < tube.origin.size(); ++a) p.push_back(tube.origin(a));
    return p;
}

Matrix transverse_metric(const AdaptedTube& tube, const Point& foot) {
    const auto m = static_cast<Index>(tube.transverse());
    return tube.ambient.metric_at(foot).bottomRightCorner(m, m);
}

Vector offset(const AdaptedTube& tube, const Point& x) {
    Vector w(static_cast<Index>(tube.transverse()));
    for (Index a = 0; a < w.size(); ++a) w(a) = x[tube.tangential + static_cast<std::size_t>(a)] - tube.origin(a);
    return w;
}

Point with_transverse(const AdaptedTube& tube, const Point& foot, const Vector& w) {
    Point p = foot;
    for (Index a = 0; a < w.size(); ++a) p[tube.tangential + static_cast<std::size_t>(a)] = tube.origin(a) + w(a);
    return p;
}

Point shifted(const Point& x, std::size_t l, double h) {
    Point y = x;
    y[l] += h;
    return y;
}

MetricJet jet_in_region(const PiecewiseField& metric, const Point& x, RegionTag region) {
    const double h = fd_step(metric.tube());
    return {metric.branch(x, region), metric.branch_gradient(x, region, h)};
}

Christoffel christoffel_in_region(const PiecewiseField& metric, const Point& x, RegionTag region) {
    return christoffel_from_jet(jet_in_region(metric, x, region));
}

RegionTag checked_region(const PiecewiseField& f, const Point& x) {
    f.tube().ambient.check_point(x);
    const RadialPoint r = radial_decompose(f.tube(), x);
    if (r.tag == RegionTag::BoundaryGuard) {
        throw BoundaryGuardViolation("point at radius " + std::to_string(r.t) + " lies in a guard shell of the " +
                                     f.tube().ambient.name() + " tube");
    }
    return r.region;
}

std::string block_key(const AdaptedTube& tube, std::size_t l, std::size_t k, std::size_t i, std::size_t j) {
    std::string key;
    for (std::size_t idx : {l, k, i, j}) key += tube.is_tangential(idx) ? 'T' : 'N';
    return key;
}

}  // namespace

std::string to_string(RegionTag tag) {
    switch (tag) {
        case RegionTag::InnerDisk: return "inner";
        case RegionTag::Annulus: return "annulus";
        case RegionTag::Exterior: return "exterior";
        case RegionTag::BoundaryGuard: return "guard";
    }
    return "?";
}

AdaptedTube make_tube(const ChartManifold& ambient, const TubeSpec& spec, const TubeOptions& options) {
    const std::size_t n = ambient.dim();
    const std::size_t k = spec.tangential;
    if (k == 0 || k >= n) throw InvariantViolation("tube needs 0 < k < n, got k = " + std::to_string(k));
    if (!(spec.epsilon > 0.0)) throw InvariantViolation("tube radius must be positive");
    if (spec.origin.size() != n - k) throw InvariantViolation("tube origin has the wrong length");

    AdaptedTube tube{ambient, k, spec.epsilon, Vector(static_cast<Index>(n - k)), options.guard_fraction * spec.epsilon};
    for (std::size_t a = 0; a < n - k; ++a) tube.origin(static_cast<Index>(a)) = spec.origin[a];

    // The ellipsoid {w : wᵀ G w ≤ ε²} reaches ε·sqrt((G⁻¹)_aa) along axis a.
    for (const auto& t : probe_points(tangential_box(tube), options.containment_probes, 3)) {
        Point foot = t;
        foot.insert(foot.end(), spec.origin.begin(), spec.origin.end());
        const Matrix ginv = transverse_metric(tube, foot).inverse();
        for (std::size_t a = 0; a < n - k; ++a) {
            const double reach = spec.epsilon * std::sqrt(ginv(static_cast<Index>(a), static_cast<Index>(a)));
            const Interval& box = ambient.domain()[k + a];
            if (!box.contains(spec.origin[a] - reach) || !box.contains(spec.origin[a] + reach)) {
                throw InvariantViolation("tube of radius " + std::to_string(spec.epsilon) + " leaves the domain of " +
                                         ambient.name() + " along " + ambient.coordinate_names()[k + a]);
            }
        }
    }
    if (options.verify_adapted) {
        const FermiReport f = verify_fermi_chart(ambient, spec, options.fermi_samples, 1, options.fermi_tol);
        if (!f.adapted()) {
            throw InvariantViolation("chart of " + ambient.name() + " is not adapted to the tube: ray deviation " +
                                     std::to_string(f.max_deviation));
        }
    }
    return tube;
}

AdaptedTube make_tube(const ChartManifold& ambient, const TubeOptions& options) {
    if (!ambient.tube) throw InvariantViolation(ambient.name() + " declares no tube");
    return make_tube(ambient, *ambient.tube, options);
}

double radial_profile(double t, double epsilon) {
    if (t <= 0.5 * epsilon) return 0.0;
    if (t <= epsilon) return 2.0 * t - epsilon;
    return t;
}

RegionTag region_of(double t, double epsilon, double guard) {
    if (guard > 0.0 && (std::abs(t - 0.5 * epsilon) < guard || std::abs(t - epsilon) < guard)) {
        return RegionTag::BoundaryGuard;
    }
    if (t <= 0.5 * epsilon) return RegionTag::InnerDisk;
    if (t < epsilon) return RegionTag::Annulus;
    return RegionTag::Exterior;
}

RadialPoint radial_decompose(const AdaptedTube& tube, const Point& x) {
    RadialPoint r;
    r.foot = foot_point(tube, x);
    const Vector w = offset(tube, x);
    r.t = std::sqrt(std::max(0.0, w.dot(transverse_metric(tube, r.foot) * w)));
    r.xi = r.t > 0.0 ? Vector(w / r.t) : Vector::Zero(w.size());
    r.tag = region_of(r.t, tube.epsilon, tube.guard);
    r.region = region_of(r.t, tube.epsilon);
    return r;
}

Point retract(const AdaptedTube& tube, const Point& x, RegionTag region) {
    const Point foot = foot_point(tube, x);
    switch (region) {
        case RegionTag::InnerDisk: return foot;
        case RegionTag::Exterior: return x;
        case RegionTag::Annulus: {
            const Vector w = offset(tube, x);
            const double t = std::sqrt(w.dot(transverse_metric(tube, foot) * w));
            return with_transverse(tube, foot, w * ((2.0 * t - tube.epsilon) / t));
        }
        case RegionTag::BoundaryGuard: break;
    }
    throw BoundaryGuardViolation("no branch for a guard shell");
}

PiecewiseField::PiecewiseField(ExprMatrix source, AdaptedTube tube, std::array<int, 2> valence)
    : source_(std::move(source)), tube_(std::move(tube)), valence_(valence) {}

FieldValue PiecewiseField::evaluate(const Point& x) const {
    tube_.ambient.check_point(x);
    const RadialPoint r = radial_decompose(tube_, x);
    return {branch(x, r.region), r.tag};
}

Matrix PiecewiseField::branch(const Point& x, RegionTag region) const {
    return source_.evaluate(retract(tube_, x, region));
}

std::vector<Matrix> PiecewiseField::branch_gradient(const Point& x, RegionTag region, double h) const {
    std::vector<Matrix> out;
    out.reserve(x.size());
    for (std::size_t l = 0; l < x.size(); ++l) {
        out.push_back((branch(shifted(x, l, h), region) - branch(shifted(x, l, -h), region)) / (2.0 * h));
    }
    return out;
}

PiecewiseField deform_field(const ExprMatrix& field, const AdaptedTube& tube, std::array<int, 2> valence) {
    if (field.arity() > tube.dim()) throw ArityError("field uses more coordinates than the tube chart has");
    return PiecewiseField(field, tube, valence);
}

PiecewiseField deform_metric(const AdaptedTube& tube) { return deform_field(tube.ambient.metric(), tube, {0, 2}); }

double interface_jump(const PiecewiseField& f, std::size_t count, std::uint64_t seed, double eta) {
    const AdaptedTube& tube = f.tube();
    Rng rng(seed);
    double worst = 0.0;
    for (const auto& t : probe_points_shrunk(tangential_box(tube), 0.8, count, seed)) {
        const Point foot = foot_point(tube, Point(t.begin(), t.end()));
        const Vector dir = random_unit(rng, transverse_metric(tube, foot));
        for (double radius : {0.5 * tube.epsilon, tube.epsilon}) {
            const Point in = with_transverse(tube, foot, dir * (radius * (1.0 - eta)));
            const Point out = with_transverse(tube, foot, dir * (radius * (1.0 + eta)));
            if (!tube.ambient.contains(in) || !tube.ambient.contains(out)) continue;
            worst = std::max(worst, (f.evaluate(in).value - f.evaluate(out).value).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

double fd_step(const AdaptedTube& tube) { return 1e-4 * tube.epsilon; }

MetricJet deformed_metric_jet(const PiecewiseField& metric, const Point& x) {
    return jet_in_region(metric, x, checked_region(metric, x));
}

Christoffel deformed_christoffel(const PiecewiseField& metric, const Point& x) {
    return christoffel_in_region(metric, x, checked_region(metric, x));
}

Riemann deformed_curvature(const PiecewiseField& metric, const Point& x) {
    const RegionTag region = checked_region(metric, x);
    const double h = fd_step(metric.tube());
    std::vector<Christoffel> dgamma;
    for (std::size_t m = 0; m < x.size(); ++m) {
        const Christoffel plus = christoffel_in_region(metric, shifted(x, m, h), region);
        const Christoffel minus = christoffel_in_region(metric, shifted(x, m, -h), region);
        Christoffel d(x.size());
        for (std::size_t k = 0; k < x.size(); ++k) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                for (std::size_t j = 0; j < x.size(); ++j) d(k, i, j) = (plus(k, i, j) - minus(k, i, j)) / (2.0 * h);
            }
        }
        dgamma.push_back(std::move(d));
    }
    return riemann_from(christoffel_in_region(metric, x, region), dgamma);
}

StructureJet deformed_structure_jet(const PiecewiseField& metric, const PiecewiseField& acs, const Point& x) {
    const RegionTag region = checked_region(metric, x);
    StructureJet s;
    s.metric = jet_in_region(metric, x, region);
    s.acs = {acs.branch(x, region), acs.branch_gradient(x, region, fd_step(acs.tube()))};
    s.gamma = christoffel_from_jet(s.metric);
    return s;
}

std::vector<Matrix> deformed_nabla_acs(const PiecewiseField& metric, const PiecewiseField& acs, const Point& x) {
    const StructureJet s = deformed_structure_jet(metric, acs, x);
    return covariant_derivative_11(s.acs, s.gamma);
}

std::vector<Point> sample_region(const AdaptedTube& tube, RegionTag region, std::size_t count, std::uint64_t seed) {
    const double eps = tube.epsilon;
    const double margin = 2.0 * tube.guard;
    double lo = 0.0, hi = 0.0;
    switch (region) {
        case RegionTag::InnerDisk: lo = 0.0; hi = 0.5 * eps - margin; break;
        case RegionTag::Annulus: lo = 0.5 * eps + margin; hi = eps - margin; break;
        case RegionTag::Exterior: lo = eps + margin; hi = 2.0 * eps; break;
        case RegionTag::BoundaryGuard: return {};
    }
    Rng rng(seed);
    std::uniform_real_distribution<double> radius(lo, hi);
    std::vector<Point> out;
    // Oversample the tangential probes; exterior shells can leave the box.
    const auto feet = probe_points_shrunk(tangential_box(tube), 0.8, 4 * count + 8, seed);
    for (const auto& t : feet) {
        if (out.size() == count) break;
        const Point foot = foot_point(tube, Point(t.begin(), t.end()));
        const Matrix gt = transverse_metric(tube, foot);
        for (int attempt = 0; attempt < 8; ++attempt) {
            const Point x = with_transverse(tube, foot, random_unit(rng, gt) * radius(rng));
            if (!tube.ambient.contains(x)) continue;
            if (radial_decompose(tube, x).tag != region) continue;
            out.push_back(x);
            break;
        }
    }
    return out;
}

std::vector<Point> sample_submanifold(const AdaptedTube& tube, std::size_t count, std::uint64_t seed) {
    std::vector<Point> out;
    for (const auto& t : probe_points_shrunk(tangential_box(tube), 0.8, count, seed)) {
        out.push_back(foot_point(tube, Point(t.begin(), t.end())));
    }
    return out;
}

TotallyGeodesicReport verify_totally_geodesic(const PiecewiseField& metric, const TotallyGeodesicOptions& options) {
    const AdaptedTube& tube = metric.tube();
    const std::size_t n = tube.dim();
    TotallyGeodesicReport report;
    report.algebraic = {"second-fundamental-form", "submanifold", 0, 0.0, options.tol};
    report.drift = {"geodesic-drift", "submanifold", 0, 0.0, options.drift_tol};

    for (const auto& p : sample_submanifold(tube, options.samples, options.seed)) {
        const Christoffel first = christoffel_first_kind(deformed_metric_jet(metric, p));
        for (std::size_t l = tube.tangential; l < n; ++l) {
            for (std::size_t i = 0; i < tube.tangential; ++i) {
                for (std::size_t j = 0; j < tube.tangential; ++j) {
                    report.algebraic.max_residual = std::max(report.algebraic.max_residual, std::abs(first(l, i, j)));
                }
            }
        }
        ++report.algebraic.samples;
    }

    const ChristoffelField gamma = [&](const Point& x) {
        return christoffel_in_region(metric, x, radial_decompose(tube, x).region);
    };
    const DomainTest inside = [&](const Point& x) { return tube.ambient.contains(x); };
    Rng rng(options.seed);
    // Starts near the middle of the tangential box so unit-speed paths stay inside.
    for (const auto& t : probe_points_shrunk(tangential_box(tube), 0.2, options.geodesics, options.seed)) {
        const Point p = foot_point(tube, Point(t.begin(), t.end()));
        const auto k = static_cast<Index>(tube.tangential);
        const Matrix g = metric.evaluate(p).value;
        Vector v = Vector::Zero(static_cast<Index>(n));
        v.head(k) = random_unit(rng, g.topLeftCorner(k, k));
        const GeodesicPath path = integrate_geodesic(gamma, inside, p, v, options.duration, options.steps);
        if (path.truncated) ++report.truncated;
        for (const auto& x : path.points) {
            report.drift.max_residual = std::max(report.drift.max_residual, offset(tube, x).cwiseAbs().maxCoeff());
        }
        ++report.drift.samples;
    }
    return report;
}

TubeCheck FlatInnerReport::transverse_check() const {
    return {"inner-curvature-transverse", "inner", samples, transverse, tolerance};
}

TubeCheck FlatInnerReport::full_check() const { return {"inner-curvature-full", "inner", samples, full, tolerance}; }

FlatInnerReport verify_flat_inner(const PiecewiseField& metric, std::size_t samples, std::uint64_t seed, double tol) {
    const AdaptedTube& tube = metric.tube();
    const std::size_t n = tube.dim();
    FlatInnerReport report;
    report.tolerance = tol;
    for (const auto& x : sample_region(tube, RegionTag::InnerDisk, samples, seed)) {
        const Riemann r = deformed_curvature(metric, x);
        for (std::size_t l = 0; l < n; ++l) {
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t i = 0; i < n; ++i) {
                    for (std::size_t j = 0; j < n; ++j) {
                        double& slot = report.blocks[block_key(tube, l, k, i, j)];
                        slot = std::max(slot, std::abs(r(l, k, i, j)));
                    }
                }
            }
        }
        ++report.samples;
    }
    for (const auto& [key, value] : report.blocks) {
        report.full = std::max(report.full, value);
        if (key == "NNNN") report.transverse = value;
    }
    return report;
}

const PiecewiseField& KaehlerTube::structure(int index) const {
    switch (index) {
        case 1: return j1;
        case 2:
            if (j2) return *j2;
            break;
        case 3:
            if (j3) return *j3;
            break;
        default: throw BadCase("structure index must be 1, 2 or 3");
    }
    throw MissingBaseACS(bundle.base.name() + " carries no almost complex structure");
}

KaehlerTube build_kaehler_tube(const ChartManifold& base, const TubeOptions& options) {
    const double eps = base.epsilon;
    if (!(eps > 0.0)) throw InvariantViolation(base.name() + " declares no null-section tube radius");
    if (base.fiber_box < eps) throw InvariantViolation("fiber box of " + base.name() + " is smaller than epsilon");
    BundleChart bundle = build_sasaki(base);
    const std::size_t n = base.dim();
    const TubeSpec spec{n, eps, std::vector<double>(n, 0.0)};
    TubeOptions unchecked = options;
    unchecked.verify_adapted = false;
    AdaptedTube tube = make_tube(bundle.total, spec, unchecked);
    // Vertical rays should be geodesics of ĝ; checked here to keep the numbers.
    FermiReport fermi;
    if (options.verify_adapted) {
        fermi = verify_fermi_chart(bundle.total, spec, options.fermi_samples, 1, options.fermi_tol);
        if (!fermi.adapted()) {
            throw InvariantViolation("vertical rays of " + bundle.total.name() + " deviate by " +
                                     std::to_string(fermi.max_deviation));
        }
    }
    const BundleStructures acs = build_bundle_acs(bundle);
    KaehlerTube out{bundle,
                    tube,
                    fermi,
                    deform_field(bundle.total.metric(), tube, {0, 2}),
                    deform_field(acs.j1, tube, {1, 1}),
                    std::nullopt,
                    std::nullopt};
    if (acs.j2) out.j2 = deform_field(*acs.j2, tube, {1, 1});
    if (acs.j3) out.j3 = deform_field(*acs.j3, tube, {1, 1});
    return out;
}

TubeCheck verify_parallel_J(const PiecewiseField& metric, const PiecewiseField& acs, RegionTag region,
                            std::size_t samples, std::uint64_t seed, double tol) {
    TubeCheck check{"parallel-structure", to_string(region), 0, 0.0, tol};
    for (const auto& x : sample_region(metric.tube(), region, samples, seed)) {
        for (const Matrix& m : deformed_nabla_acs(metric, acs, x)) {
            check.max_residual = std::max(check.max_residual, m.cwiseAbs().maxCoeff());
        }
        ++check.samples;
    }
    return check;
}

GHClassReport classify_tube(const KaehlerTube& k, int index, const GHOptions& options) {
    const PiecewiseField& acs = k.structure(index);
    std::vector<StructureJet> jets;
    for (const auto& x : sample_region(k.tube, RegionTag::InnerDisk, options.points, options.seed)) {
        jets.push_back(deformed_structure_jet(k.metric, acs, x));
    }
    return gh_classify(k.bundle.total.name() + "_J" + std::to_string(index) + "_inner", jets, options);
}

ChartManifold export_inner_tube(const KaehlerTube& k) {
    const AdaptedTube& tube = k.tube;
    const std::size_t n = tube.tangential;
    const double inner = 0.5 * tube.epsilon - 2.0 * tube.guard;
    if (!(inner > 0.0) || sample_region(tube, RegionTag::InnerDisk, 1, 1).empty()) {
        throw EmptyInnerTube("inner tube of " + k.bundle.total.name() + " is empty");
    }
    std::vector<std::optional<ScalarExpr>> at_null(2 * n);
    for (std::size_t a = n; a < 2 * n; ++a) at_null[a] = ScalarExpr::constant(0.0);
    const ExprMatrix metric = k.metric.source().substituted(at_null).simplified();
    const ExprMatrix acs = k.j1.source().substituted(at_null).simplified();

    // Fiber box: the bounding box of the inner ellipsoid over the base probes.
    std::vector<double> reach(n, 0.0);
    for (const auto& t : probe_points(k.bundle.base.domain(), 64, 3)) {
        const Matrix ginv = k.bundle.base.metric_at(t).inverse();
        for (std::size_t a = 0; a < n; ++a) {
            reach[a] = std::max(reach[a], 0.5 * tube.epsilon *
                                              std::sqrt(ginv(static_cast<Index>(a), static_cast<Index>(a))));
        }
    }
    std::vector<Interval> domain = k.bundle.base.domain();
    for (std::size_t a = 0; a < n; ++a) domain.push_back({-reach[a], reach[a]});
    ChartManifold out(k.bundle.base.name() + "_inner", k.bundle.total.coordinate_names(), domain, metric, acs);
    out.epsilon = tube.epsilon;
    out.fiber_box = k.bundle.base.fiber_box;
    return out;
}

HyperStageReport build_hyper_stage(const ChartManifold& base, const HyperStageOptions& options) {
    const KaehlerTube first = build_kaehler_tube(base, options.tube);
    ChartManifold stage1 = export_inner_tube(first);
    KaehlerTube second = build_kaehler_tube(stage1, options.tube);

    TubeCheck quaternion{"quaternion-identities", "inner", 0, 0.0, options.quaternion_tol};
    const auto points = sample_region(second.tube, RegionTag::InnerDisk, options.samples, options.seed);
    for (const auto& x : points) {
        const Matrix g = second.metric.evaluate(x).value;
        const Matrix j1 = second.j1.evaluate(x).value;
        const Matrix j2 = second.j2->evaluate(x).value;
        const Matrix j3 = second.j3->evaluate(x).value;
        const Matrix id = Matrix::Identity(g.rows(), g.cols());
        double r = 0.0;
        for (const Matrix* j : {&j1, &j2, &j3}) {
            r = std::max(r, (*j * *j + id).cwiseAbs().maxCoeff());
            r = std::max(r, (j->transpose() * g * *j - g).cwiseAbs().maxCoeff());
        }
        r = std::max(r, (j1 * j2 - j3).cwiseAbs().maxCoeff());
        r = std::max(r, (j2 * j1 + j3).cwiseAbs().maxCoeff());
        quaternion.max_residual = std::max(quaternion.max_residual, r);
        ++quaternion.samples;
    }
    std::array<TubeCheck, 3> parallel;
    for (int a = 1; a <= 3; ++a) {
        parallel[static_cast<std::size_t>(a - 1)] = verify_parallel_J(
            second.metric, second.structure(a), RegionTag::InnerDisk, options.samples, options.seed, options.parallel_tol);
        parallel[static_cast<std::size_t>(a - 1)].check = "parallel-structure-" + std::to_string(a);
    }
    return {std::move(stage1), std::move(second), quaternion, parallel};
}

}  // namespace tubekit
