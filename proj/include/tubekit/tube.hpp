#pragma once

// Piecewise deformation of tensor fields on an adapted tube around the
// submanifold {transverse = origin} and the checks run on the result.
//
// A point x splits into foot p (tangential part, transverse = origin) and
// transverse offset w with radius t = |w| in the foot metric. The deformed
// field at x is the source field at p + (ρ(t)/t)·w, where
//   ρ = 0 (t ≤ ε/2),  ρ = 2t − ε (ε/2 ≤ t ≤ ε),  ρ = t (t ≥ ε).

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tubekit/bundle.hpp"
#include "tubekit/chart.hpp"
#include "tubekit/geodesic.hpp"
#include "tubekit/hermitian.hpp"

namespace tubekit {

enum class RegionTag { InnerDisk, Annulus, Exterior, BoundaryGuard };
std::string to_string(RegionTag tag);

struct AdaptedTube {
    ChartManifold ambient;
    std::size_t tangential = 0;
    double epsilon = 0.0;
    Vector origin;          // transverse coordinates of the submanifold
    double guard = 0.0;     // half-width of the shells around t = ε/2 and t = ε

    std::size_t dim() const { return ambient.dim(); }
    std::size_t transverse() const { return dim() - tangential; }
    bool is_tangential(std::size_t i) const { return i < tangential; }
};

struct TubeOptions {
    double guard_fraction = 1e-3;    // guard = guard_fraction · ε
    bool verify_adapted = true;      // run verify_fermi_chart, throw if it fails
    double fermi_tol = 1e-5;
    std::size_t fermi_samples = 3;
    std::size_t containment_probes = 64;
};

// Throws InvariantViolation when 0 < k < n, ε > 0, tube-in-box or the
// adaptedness check fails.
AdaptedTube make_tube(const ChartManifold& ambient, const TubeSpec& spec, const TubeOptions& options = {});
// Uses the manifest's own tube line; throws InvariantViolation if absent.
AdaptedTube make_tube(const ChartManifold& ambient, const TubeOptions& options = {});

struct RadialPoint {
    Point foot;
    double t = 0.0;
    Vector xi;              // unit transverse direction, zero at t = 0
    RegionTag tag = RegionTag::InnerDisk;
    RegionTag region = RegionTag::InnerDisk;  // tag ignoring the guard shells
};

RadialPoint radial_decompose(const AdaptedTube& tube, const Point& x);
double radial_profile(double t, double epsilon);
RegionTag region_of(double t, double epsilon, double guard = 0.0);

// Point the deformation samples the source at, using the formula of
// `region` (extended smoothly past its own boundary).
Point retract(const AdaptedTube& tube, const Point& x, RegionTag region);

struct FieldValue {
    Matrix value;
    RegionTag tag = RegionTag::InnerDisk;
};

class PiecewiseField {
public:
    PiecewiseField(ExprMatrix source, AdaptedTube tube, std::array<int, 2> valence);

    const ExprMatrix& source() const { return source_; }
    const AdaptedTube& tube() const { return tube_; }
    std::array<int, 2> valence() const { return valence_; }

    // Throws OutsideDomain.
    FieldValue evaluate(const Point& x) const;
    // Value of the given region's branch at x; smooth in x.
    Matrix branch(const Point& x, RegionTag region) const;
    // ∂_l of the branch, central differences with step h.
    std::vector<Matrix> branch_gradient(const Point& x, RegionTag region, double h) const;

private:
    ExprMatrix source_;
    AdaptedTube tube_;
    std::array<int, 2> valence_;
};

PiecewiseField deform_field(const ExprMatrix& field, const AdaptedTube& tube, std::array<int, 2> valence);
PiecewiseField deform_metric(const AdaptedTube& tube);

// Largest jump across t = ε/2 and t = ε: values at t·(1 ∓ η) on `count`
// random rays.
double interface_jump(const PiecewiseField& f, std::size_t count, std::uint64_t seed, double eta = 1e-10);

// Finite-difference step 1e-4·ε. Derivatives use the branch of x's own
// region, so no stencil sees the kinks at the interfaces.
double fd_step(const AdaptedTube& tube);

// Throws BoundaryGuardViolation inside a guard shell.
MetricJet deformed_metric_jet(const PiecewiseField& metric, const Point& x);
Christoffel deformed_christoffel(const PiecewiseField& metric, const Point& x);
Riemann deformed_curvature(const PiecewiseField& metric, const Point& x);
StructureJet deformed_structure_jet(const PiecewiseField& metric, const PiecewiseField& acs, const Point& x);
// (∇̄_i J̄)^k_j
std::vector<Matrix> deformed_nabla_acs(const PiecewiseField& metric, const PiecewiseField& acs, const Point& x);

// Points of the tube with the requested region tag (never BoundaryGuard).
// Radii are uniform inside the region, exterior radii up to 2ε; points that
// leave the domain are dropped, so fewer than `count` may come back.
std::vector<Point> sample_region(const AdaptedTube& tube, RegionTag region, std::size_t count, std::uint64_t seed);
// Points on the submanifold itself.
std::vector<Point> sample_submanifold(const AdaptedTube& tube, std::size_t count, std::uint64_t seed);

struct TubeCheck {
    std::string check;
    std::string region;
    std::size_t samples = 0;
    double max_residual = 0.0;
    double tolerance = 0.0;
    bool pass() const { return samples > 0 && max_residual <= tolerance; }
};

struct TotallyGeodesicOptions {
    std::size_t samples = 50;
    std::uint64_t seed = 7;
    double tol = 1e-8;
    double drift_tol = 1e-5;
    std::size_t geodesics = 8;
    double duration = 1.0;
    int steps = 256;
};

// algebraic: max |ḡ(∇̄_i ∂_j, ∂_l)|, i, j tangential, l transverse, at
// submanifold points. drift: max transverse offset of ḡ-geodesics launched
// tangent to the submanifold.
struct TotallyGeodesicReport {
    TubeCheck algebraic;
    TubeCheck drift;
    std::size_t truncated = 0;
    bool pass() const { return algebraic.pass() && drift.pass(); }
};
TotallyGeodesicReport verify_totally_geodesic(const PiecewiseField& metric, const TotallyGeodesicOptions& options = {});

// Curvature of ḡ on InnerDisk samples, max |R̄^l_{kij}| per index block.
// Block keys spell each index as T (tangential) or N (transverse) in the
// order l k i j; "NNNN" is the all-transverse block.
struct FlatInnerReport {
    std::map<std::string, double> blocks;
    double transverse = 0.0;
    double full = 0.0;
    std::size_t samples = 0;
    double tolerance = 0.0;
    TubeCheck transverse_check() const;
    TubeCheck full_check() const;
};
FlatInnerReport verify_flat_inner(const PiecewiseField& metric, std::size_t samples, std::uint64_t seed = 11,
                                  double tol = 1e-6);

struct KaehlerTube {
    BundleChart bundle;
    AdaptedTube tube;
    FermiReport fermi;
    PiecewiseField metric;
    PiecewiseField j1;
    std::optional<PiecewiseField> j2;
    std::optional<PiecewiseField> j3;

    const PiecewiseField& structure(int index) const;
};

// Tube around the null section of the Sasaki tangent bundle, ε from the
// base manifest. Throws InvariantViolation when ε is unset or exceeds the
// fiber box.
KaehlerTube build_kaehler_tube(const ChartManifold& base, const TubeOptions& options = {});

// max |∇̄J̄| over region samples.
TubeCheck verify_parallel_J(const PiecewiseField& metric, const PiecewiseField& acs, RegionTag region,
                            std::size_t samples, std::uint64_t seed = 13, double tol = 1e-5);

// Class table of (J̄_index, ḡ) from deformed jets at InnerDisk samples;
// options.points samples, options.seed drives both sampling stages.
GHClassReport classify_tube(const KaehlerTube& k, int index, const GHOptions& options = {});

// Stage-1 inner tube as a smooth chart: ĝ and J₁ frozen at the null section,
// fiber coordinates bounded by the inner radius. Throws EmptyInnerTube.
ChartManifold export_inner_tube(const KaehlerTube& k);

struct HyperStageOptions {
    std::size_t samples = 20;
    std::uint64_t seed = 17;
    double quaternion_tol = 1e-8;
    double parallel_tol = 1e-4;
    TubeOptions tube;
};

struct HyperStageReport {
    ChartManifold stage1;
    KaehlerTube stage2;
    TubeCheck quaternion;
    std::array<TubeCheck, 3> parallel;
    bool pass() const {
        return quaternion.pass() && parallel[0].pass() && parallel[1].pass() && parallel[2].pass();
    }
};
HyperStageReport build_hyper_stage(const ChartManifold& base, const HyperStageOptions& options = {});

}  // namespace tubekit
