#include "tubekit/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tubekit/bundle.hpp"
#include "tubekit/errors.hpp"
#include "tubekit/hermitian.hpp"
#include "tubekit/manifest.hpp"
#include "tubekit/sampling.hpp"
#include "tubekit/tube.hpp"

namespace tubekit {

using nlohmann::json;

namespace {

using Index = Eigen::Index;

class Recorder {
public:
    Recorder(const SuiteConfig& cfg, RunReport& report) : cfg_(cfg), report_(report) {}

    void suite(std::string id) { suite_ = std::move(id); }

    void check(const std::string& name, const std::string& anchor, double residual, double tol,
               Bound bound = Bound::Max) {
        if (bound == Bound::Max && cfg_.tol) tol = *cfg_.tol;
        const bool pass = std::isfinite(residual) && (bound == Bound::Max ? residual <= tol : residual >= tol);
        report_.records.push_back({suite_, name, anchor, residual, tol, bound, pass});
    }
    void check(const TubeCheck& c, const std::string& name, const std::string& anchor) {
        check(name, anchor, c.samples > 0 ? c.max_residual : INFINITY, c.tolerance);
    }
    void note(const std::string& name, double value, const std::string& detail = {}) {
        report_.notes.push_back({suite_, name, value, detail});
    }
    void point(const SeriesPoint& p) { report_.series.push_back(p); }

private:
    const SuiteConfig& cfg_;
    RunReport& report_;
    std::string suite_;
};

struct Context {
    const SuiteConfig& cfg;
    ChartManifold m;
    json fixtures;  // null when no fixture file sits beside the manifest
};

std::filesystem::path manifest_path(const std::string& name_or_path) {
    const std::filesystem::path as_path(name_or_path);
    if (std::filesystem::is_regular_file(as_path)) return as_path;
    return catalog_dir() / (name_or_path + ".manifest");
}

json load_fixtures(const std::string& name_or_path) {
    auto path = manifest_path(name_or_path);
    path.replace_extension(".fixtures.json");
    if (!std::filesystem::is_regular_file(path)) return nullptr;
    std::ifstream in(path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ManifestError("malformed fixture file " + path.string() + ": " + e.what());
    }
}

Point to_point(const json& j) { return j.get<std::vector<double>>(); }

Vector to_vector(const json& j) {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size()));
}

ExprMatrix coordinate_field(std::size_t n, std::size_t a) {
    Matrix e = Matrix::Zero(static_cast<Index>(n), 1);
    e(static_cast<Index>(a), 0) = 1.0;
    return ExprMatrix::constant(e);
}

bool base_is_flat(const ChartManifold& m, std::uint64_t seed) {
    for (const auto& p : probe_points(m.domain(), 16, seed)) {
        if (curvature(m, p).max_abs() > 1e-9) return false;
    }
    return true;
}

void sasaki_suite(Context& c, Recorder& r) {
    const BundleChart b = build_sasaki(c.m);
    const std::size_t n = c.m.dim();
    Rng rng(c.cfg.seed);
    SasakiResiduals worst;
    for (const auto& u : probe_points(b.total.domain(), c.cfg.samples, c.cfg.seed)) {
        const SasakiResiduals s = sasaki_residuals(b, u, rng);
        worst.reconstruction = std::max(worst.reconstruction, s.reconstruction);
        worst.orthogonality = std::max(worst.orthogonality, s.orthogonality);
        worst.lift_norm = std::max(worst.lift_norm, s.lift_norm);
        worst.frame = std::max(worst.frame, s.frame);
    }
    r.check("sasaki-reconstruction", "sasaki metric splits as g(π_*·,π_*·) + g(K·,K·)", worst.reconstruction, 1e-9);
    r.check("horizontal-vertical-orthogonality", "horizontal and vertical lifts are orthogonal", worst.orthogonality,
            1e-9);
    r.check("lift-isometry", "lifts preserve lengths", worst.lift_norm, 1e-9);
    r.check("lift-frame-orthonormality", "lifted orthonormal frame is orthonormal", worst.frame, 1e-9);

    // Coordinate fields on the first (up to) three base coordinates.
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t a = 0; a < std::min<std::size_t>(n, 3); ++a) {
        for (std::size_t d = a + 1; d < std::min<std::size_t>(n, 3); ++d) pairs.emplace_back(a, d);
    }
    if (pairs.empty()) pairs.emplace_back(0, 0);
    BracketReport w;
    w.curvature_flipped = 0.0;
    const auto points = probe_points(b.total.domain(), std::min<std::size_t>(c.cfg.samples, 50), c.cfg.seed + 1);
    for (const auto& [a, d] : pairs) {
        for (const auto& u : points) {
            const BracketReport br = check_bracket_identities(b, coordinate_field(n, a), coordinate_field(n, d), u);
            w.vertical_vertical = std::max(w.vertical_vertical, br.vertical_vertical);
            w.horizontal_vertical = std::max(w.horizontal_vertical, br.horizontal_vertical);
            w.projected_horizontal = std::max(w.projected_horizontal, br.projected_horizontal);
            w.curvature = std::max(w.curvature, br.curvature);
            w.curvature_flipped = std::max(w.curvature_flipped, br.curvature_flipped);
        }
    }
    r.check("bracket-vertical-vertical", "[X^v, Y^v] = 0", w.vertical_vertical, 1e-6);
    r.check("bracket-horizontal-vertical", "[X^h, Y^v] = (∇_X Y)^v", w.horizontal_vertical, 1e-6);
    r.check("bracket-projected-horizontal", "π_*[X^h, Y^h] = [X, Y]", w.projected_horizontal, 1e-6);
    r.check("bracket-curvature", "K[X^h, Y^h] = R(X, Y)U", w.curvature, 1e-6);
    r.note("bracket-curvature-opposite-sign", w.curvature_flipped, "residual of K[X^h, Y^h] against −R(X, Y)U");
}

void h_cases_suite(Context& c, Recorder& r) {
    const BundleChart b = build_sasaki(c.m);
    const std::size_t n = c.m.dim();
    const std::size_t width = std::min<std::size_t>(n, 3);
    for (int a : {1, 2}) {
        if (a == 2 && !c.m.has_acs()) {
            r.note("h2-cases-skipped", 0.0, "base carries no almost complex structure");
            continue;
        }
        const ChartManifold bundle = bundle_with_structure(b, a);
        Rng rng(c.cfg.seed + static_cast<std::uint64_t>(a));
        for (int k = 1; k <= 8; ++k) {
            double printed = 0.0, derived = 0.0;
            for (const auto& u : probe_points(b.total.domain(), c.cfg.samples, c.cfg.seed + static_cast<std::uint64_t>(k))) {
                const Matrix f = random_orthonormal(rng, c.m.metric_at(b.foot(u)), width);
                const Vector x = f.col(0), y = f.col(static_cast<Index>(std::min<std::size_t>(1, width - 1)));
                const Vector z = f.col(static_cast<Index>(width == 3 ? 2 : rng() % width));
                const double direct = bundle_h_direct(b, bundle, k, u, x, y, z);
                auto closed = [&](HTable t) {
                    return a == 1 ? h1_closed_form(k, b, u, x, y, z, t) : h2_closed_form(k, b, u, x, y, z, t);
                };
                printed = std::max(printed, std::abs(direct - closed(HTable::Printed)));
                derived = std::max(derived, std::abs(direct - closed(HTable::Derived)));
            }
            const std::string name = "h" + std::to_string(a) + "-case-" + std::to_string(k);
            const auto lifts = case_lifts(k);
            std::string kinds;
            for (LiftKind l : lifts) kinds += l == LiftKind::Horizontal ? 'h' : 'v';
            r.check(name, "closed form of h" + std::to_string(a) + " on lifts (" + kinds + ")", printed, 1e-6);
            r.note(name + "-sign-corrected", derived, "same comparison against the sign-corrected table");
        }
    }
    if (c.fixtures.is_object() && c.fixtures.contains("h-cases")) {
        for (const auto& f : c.fixtures["h-cases"]) {
            const int a = f.at("structure").get<int>(), k = f.at("case").get<int>();
            const Point u = to_point(f.at("point"));
            const Vector x = to_vector(f.at("x")), y = to_vector(f.at("y")), z = to_vector(f.at("z"));
            const double expected = f.at("expected").get<double>(), tol = f.at("tolerance").get<double>();
            const double closed = a == 1 ? h1_closed_form(k, b, u, x, y, z) : h2_closed_form(k, b, u, x, y, z);
            const double direct = bundle_h_direct(b, bundle_with_structure(b, a), k, u, x, y, z);
            const std::string label = f.at("label").get<std::string>();
            r.check("fixture-closed-form", label, std::abs(closed - expected), tol);
            r.check("fixture-direct", label, std::abs(direct - expected), tol);
            r.note("fixture-direct-value", direct, label);
        }
    }
}

void tube_checks(Context& c, Recorder& r, const PiecewiseField& metric, bool bind_full) {
    TotallyGeodesicOptions o;
    o.samples = c.cfg.samples;
    o.seed = c.cfg.seed;
    const TotallyGeodesicReport tg = verify_totally_geodesic(metric, o);
    r.check(tg.algebraic, "totally-geodesic-algebraic", "ḡ(∇̄_{X_i} X_j, X_l) = 0 on the submanifold");
    r.check(tg.drift, "totally-geodesic-drift", "tangent geodesics of ḡ stay on the submanifold");
    if (tg.truncated > 0) r.note("geodesics-truncated", static_cast<double>(tg.truncated));

    const FlatInnerReport flat = verify_flat_inner(metric, std::min<std::size_t>(c.cfg.samples, 30), c.cfg.seed);
    r.check(flat.transverse_check(), "inner-curvature-transverse", "R̄ = 0 on the inner disk, transverse block");
    if (bind_full) {
        r.check(flat.full_check(), "inner-curvature-full", "R̄ = 0 on the inner disk, all components");
    }
    for (const auto& [key, value] : flat.blocks) r.note("inner-curvature-" + key, value, "max |R̄| in this block");
    r.check("interface-continuity", "deformed field is continuous at t = ε/2 and t = ε",
            interface_jump(metric, c.cfg.samples, c.cfg.seed), 1e-8);
}

void deformation_suite(Context& c, Recorder& r) {
    // Profile fixtures at ε = 0.4.
    const std::vector<std::pair<double, double>> profile = {{0.1, 0.0}, {0.3, 0.2}, {0.4, 0.4}, {0.5, 0.5}};
    double worst = 0.0;
    for (const auto& [t, rho] : profile) worst = std::max(worst, std::abs(radial_profile(t, 0.4) - rho));
    r.check("radial-profile", "ρ = 0, 2t − ε, t", worst, 1e-12);

    if (!c.m.tube) {
        if (c.m.epsilon > 0.0) {
            const KaehlerTube k = build_kaehler_tube(c.m);
            tube_checks(c, r, k.metric, false);
        } else {
            r.note("tube-skipped", 0.0, "manifest declares neither a tube nor a null-section radius");
        }
        return;
    }
    TubeOptions to;
    to.verify_adapted = false;
    const AdaptedTube tube = make_tube(c.m, to);
    const FermiReport fermi = verify_fermi_chart(c.m, *c.m.tube, 6, c.cfg.seed, 1e-5);
    r.check("adapted-chart", "transverse coordinate rays are unit-speed geodesics", fermi.max_deviation, 1e-5);
    if (!fermi.adapted()) return;
    const PiecewiseField metric = deform_metric(tube);

    if (c.fixtures.is_object() && c.fixtures.contains("deformation")) {
        for (const auto& f : c.fixtures["deformation"]) {
            const auto comp = f.at("component").get<std::vector<std::size_t>>();
            const FieldValue v = metric.evaluate(to_point(f.at("point")));
            const double got = v.value(static_cast<Index>(comp[0]), static_cast<Index>(comp[1]));
            r.check("fixture-deformed-metric-" + f.at("label").get<std::string>(), "deformed metric by hand",
                    std::abs(got - f.at("expected").get<double>()), f.at("tolerance").get<double>());
        }
    }
    double exterior = 0.0;
    const auto outside = sample_region(tube, RegionTag::Exterior, c.cfg.samples, c.cfg.seed);
    for (const auto& x : outside) {
        exterior = std::max(exterior, (metric.evaluate(x).value - c.m.metric_at(x)).cwiseAbs().maxCoeff());
    }
    r.check("exterior-identity", "ḡ = g outside the tube", outside.empty() ? INFINITY : exterior, 1e-12);
    double iso = 0.0;
    for (const auto& p : sample_submanifold(tube, c.cfg.samples, c.cfg.seed)) {
        iso = std::max(iso, (metric.evaluate(p).value - c.m.metric_at(p)).cwiseAbs().maxCoeff());
    }
    r.check("submanifold-isometry", "ḡ = g on the submanifold", iso, 1e-12);
    tube_checks(c, r, metric, true);

    // ḡ_00 along the first transverse axis from the centre of the submanifold.
    Point foot;
    for (std::size_t i = 0; i < tube.tangential; ++i) foot.push_back(0.5 * (c.m.domain()[i].lo + c.m.domain()[i].hi));
    for (Index a = 0; a < tube.origin.size(); ++a) foot.push_back(tube.origin(a));
    const double unit = 1.0 / std::sqrt(c.m.metric_at(foot)(static_cast<Index>(tube.tangential),
                                                             static_cast<Index>(tube.tangential)));
    for (int s = 1; s <= 12; ++s) {
        const double t = tube.epsilon * s / 8.0;
        Point x = foot;
        x[tube.tangential] += t * unit;
        if (!c.m.contains(x)) break;
        const FieldValue v = metric.evaluate(x);
        r.point({"deformed-metric-00", to_string(v.tag), t, v.value(0, 0), std::abs(v.value(0, 0) - c.m.metric_at(x)(0, 0))});
    }
}

void kaehler_tube_suite(Context& c, Recorder& r) {
    if (!(c.m.epsilon > 0.0)) {
        r.note("kaehler-tube-skipped", 0.0, "manifest declares no null-section radius");
        return;
    }
    const KaehlerTube k = build_kaehler_tube(c.m);
    r.check("vertical-rays-geodesic", "fibers are totally geodesic and flat", k.fermi.max_deviation, 1e-5);
    tube_checks(c, r, k.metric, false);
    r.check(verify_parallel_J(k.metric, k.j1, RegionTag::InnerDisk, c.cfg.samples, c.cfg.seed),
            "parallel-J1-inner", "∇̄J̄₁ = 0 on the inner tube");

    if (!base_is_flat(c.m, c.cfg.seed)) {
        const ChartManifold bundle = bundle_with_structure(k.bundle, 1);
        double largest = 0.0;
        const auto outside = sample_region(k.tube, RegionTag::Exterior, std::min<std::size_t>(c.cfg.samples, 10), c.cfg.seed);
        for (const auto& x : outside) {
            for (const Matrix& d : covariant_derivative_acs(bundle, x)) largest = std::max(largest, d.cwiseAbs().maxCoeff());
        }
        r.check("undeformed-exterior-not-kaehler", "∇̂J₁ ≠ 0 off the null section over a curved base", largest, 1e-3,
                Bound::Min);
    }
    if (!c.m.has_acs()) return;
    GHOptions go;
    go.seed = c.cfg.seed;
    const GHClassReport base = gh_classify(c.m, go);
    if (base.dimension_valid) {
        go.points = std::min<std::size_t>(c.cfg.samples, 10);
        const GHClassReport tube = classify_tube(k, 2, go);
        r.check("tube-class-matches-base", "(J̄₂, ḡ) has the class of (J, g): " + base.tightest() + " vs " +
                                               tube.tightest(),
                base.tightest() == tube.tightest() ? 0.0 : 1.0, 0.0);
    } else {
        r.note("tube-class-skipped", 0.0, "class table needs real dimension >= 6");
    }
    if (base.member("K")) {
        for (int a : {2, 3}) {
            r.check(verify_parallel_J(k.metric, k.structure(a), RegionTag::InnerDisk, std::min<std::size_t>(c.cfg.samples, 20),
                                      c.cfg.seed),
                    "parallel-J" + std::to_string(a) + "-inner", "∇̄J̄ₐ = 0 on the inner tube over a Kaehler base");
        }
    }
}

void hyper_suite(Context& c, Recorder& r) {
    if (!(c.m.epsilon > 0.0) || c.m.dim() > 2) {
        r.note("hyper-skipped", static_cast<double>(c.m.dim()), "needs a null-section radius and base dimension <= 2");
        return;
    }
    HyperStageOptions o;
    o.samples = std::min<std::size_t>(c.cfg.samples, 20);
    o.seed = c.cfg.seed;
    const HyperStageReport h = build_hyper_stage(c.m, o);
    r.check(h.quaternion, "quaternion-identities", "J̄₁′J̄₂′ = −J̄₂′J̄₁′ = J̄₃′, J̄ₐ′² = −I, ḡ′-orthogonal");
    for (std::size_t a = 0; a < 3; ++a) {
        r.check(h.parallel[a], "parallel-J" + std::to_string(a + 1) + "-stage2", "∇̄′J̄ₐ′ = 0 on the stage-2 inner tube");
    }
}

bool contained(const std::string& small, const std::string& large) {
    if (small == "K" || large == "U") return true;
    if (small == "U" || large == "K") return false;
    auto parts = [](const std::string& label) {
        std::vector<std::string> out;
        std::stringstream ss(label);
        for (std::string p; std::getline(ss, p, '+');) out.push_back(p);
        return out;
    };
    const auto big = parts(large);
    for (const auto& p : parts(small)) {
        if (std::find(big.begin(), big.end(), p) == big.end()) return false;
    }
    return true;
}

void classify_suite(Context& c, Recorder& r, RunReport& report) {
    if (!c.m.has_acs()) {
        r.note("classify-skipped", 0.0, "manifold carries no almost complex structure");
        return;
    }
    GHOptions o;
    o.seed = c.cfg.seed;
    if (c.cfg.tol) o.tol = *c.cfg.tol;
    const GHClassReport g = gh_classify(c.m, o);
    report.classification = to_json(g);
    // Membership must be monotone along inclusion of classes.
    double violations = 0.0;
    for (const auto& a : g.rows) {
        for (const auto& b : g.rows) {
            if (a.member && !b.member && contained(a.label, b.label)) violations += 1.0;
        }
    }
    r.check("class-lattice-monotone", "membership respects class inclusion", violations, 0.0);
    r.note("dimension-valid", g.dimension_valid ? 1.0 : 0.0, "class table is stated for real dimension >= 6");
}

json config_json(const SuiteConfig& c) {
    return {{"manifold", c.manifold},
            {"suite", c.suite},
            {"tol", c.tol ? json(*c.tol) : json(nullptr)},
            {"samples", c.samples},
            {"seed", c.seed},
            {"out", c.out ? json(*c.out) : json(nullptr)},
            {"format", c.format == ReportFormat::Json ? "json" : "csv"}};
}

SuiteConfig config_from_json(const json& j) {
    SuiteConfig c;
    c.manifold = j.at("manifold").get<std::string>();
    c.suite = j.at("suite").get<std::string>();
    if (!j.at("tol").is_null()) c.tol = j.at("tol").get<double>();
    c.samples = j.at("samples").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("out").is_null()) c.out = j.at("out").get<std::string>();
    c.format = parse_format(j.at("format").get<std::string>());
    return c;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

const std::vector<std::string>& suite_ids() {
    static const std::vector<std::string> ids = {"sasaki", "h-cases", "deformation", "kaehler-tube",
                                                 "hyper",  "classify", "all"};
    return ids;
}

void validate_suite(const std::string& id) {
    const auto& ids = suite_ids();
    if (std::find(ids.begin(), ids.end(), id) != ids.end()) return;
    std::string known;
    for (const auto& s : ids) known += (known.empty() ? "" : ", ") + s;
    throw UnknownSuite("unknown suite '" + id + "'; known suites: " + known);
}

bool RunReport::pass() const {
    return std::all_of(records.begin(), records.end(), [](const CheckRecord& r) { return r.pass; });
}

std::string engine_version() { return TUBEKIT_VERSION; }

RunReport run_suite(const SuiteConfig& cfg) {
    validate_suite(cfg.suite);
    if (cfg.samples == 0) throw InvariantViolation("sample count must be positive");
    const auto start = std::chrono::steady_clock::now();
    Context c{cfg, load_manifold(cfg.manifold), load_fixtures(cfg.manifold)};
    const InvariantReport inv = check_invariants(c.m, 32, cfg.seed);
    if (!inv.ok(1e-9)) throw InvariantViolation(c.m.name() + " violates its own type invariants");

    RunReport report;
    report.suite = cfg.suite;
    report.manifold = c.m.name();
    report.engine_version = engine_version();
    report.config = cfg;
    Recorder r(cfg, report);
    auto wants = [&](const char* id) { return cfg.suite == "all" || cfg.suite == id; };
    if (wants("sasaki")) { r.suite("sasaki"); sasaki_suite(c, r); }
    if (wants("h-cases")) { r.suite("h-cases"); h_cases_suite(c, r); }
    if (wants("deformation")) { r.suite("deformation"); deformation_suite(c, r); }
    if (wants("kaehler-tube")) { r.suite("kaehler-tube"); kaehler_tube_suite(c, r); }
    if (wants("hyper")) { r.suite("hyper"); hyper_suite(c, r); }
    if (wants("classify")) { r.suite("classify"); classify_suite(c, r, report); }
    report.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (cfg.out) export_table(report, cfg.format, *cfg.out);
    return report;
}

json to_json(const GHClassReport& g) {
    json rows = json::array();
    for (const auto& row : g.rows) {
        rows.push_back({{"label", row.label},
                        {"alias", row.alias},
                        {"member", row.member},
                        {"residual", row.residual},
                        {"samples", row.samples}});
    }
    return {{"manifold", g.manifold},   {"dimension_valid", g.dimension_valid},
            {"tolerance", g.tolerance}, {"coefficient", std::isfinite(g.coefficient) ? json(g.coefficient) : json(nullptr)},
            {"seed", g.seed},           {"points", g.points},
            {"vectors", g.vectors},     {"tightest", g.tightest()},
            {"members", g.members()},   {"rows", rows}};
}

json to_json(const RunReport& report) {
    json records = json::array();
    for (const auto& r : report.records) {
        records.push_back({{"suite", r.suite},
                           {"name", r.name},
                           {"anchor", r.anchor},
                           {"residual", r.residual},
                           {"tolerance", r.tolerance},
                           {"bound", r.bound == Bound::Max ? "max" : "min"},
                           {"pass", r.pass}});
    }
    json series = json::array();
    for (const auto& p : report.series) {
        series.push_back(
            {{"series", p.series}, {"region", p.region}, {"t", p.t}, {"value", p.value}, {"residual", p.residual}});
    }
    json notes = json::array();
    for (const auto& n : report.notes) {
        notes.push_back({{"suite", n.suite}, {"name", n.name}, {"value", n.value}, {"detail", n.detail}});
    }
    return {{"suite", report.suite},
            {"manifold", report.manifold},
            {"pass", report.pass()},
            {"wall_time", report.wall_time},
            {"engine_version", report.engine_version},
            {"config", config_json(report.config)},
            {"records", records},
            {"series", series},
            {"notes", notes},
            {"classification", report.classification}};
}

RunReport report_from_json(const json& j) {
    RunReport report;
    report.suite = j.at("suite").get<std::string>();
    report.manifold = j.at("manifold").get<std::string>();
    report.wall_time = j.at("wall_time").get<double>();
    report.engine_version = j.at("engine_version").get<std::string>();
    report.config = config_from_json(j.at("config"));
    for (const auto& r : j.at("records")) {
        // Residuals that were not finite serialise as null.
        const double residual = r.at("residual").is_null() ? INFINITY : r.at("residual").get<double>();
        report.records.push_back({r.at("suite").get<std::string>(), r.at("name").get<std::string>(),
                                  r.at("anchor").get<std::string>(), residual, r.at("tolerance").get<double>(),
                                  r.at("bound").get<std::string>() == "min" ? Bound::Min : Bound::Max,
                                  r.at("pass").get<bool>()});
    }
    for (const auto& p : j.at("series")) {
        report.series.push_back({p.at("series").get<std::string>(), p.at("region").get<std::string>(),
                                 p.at("t").get<double>(), p.at("value").get<double>(), p.at("residual").get<double>()});
    }
    for (const auto& n : j.at("notes")) {
        report.notes.push_back({n.at("suite").get<std::string>(), n.at("name").get<std::string>(),
                                n.at("value").get<double>(), n.at("detail").get<std::string>()});
    }
    report.classification = j.at("classification");
    return report;
}

std::string to_csv(const RunReport& report) {
    std::ostringstream os;
    os << "kind,suite,name,anchor,region,t,value,residual,tolerance,bound,pass\n";
    for (const auto& r : report.records) {
        os << "record," << csv_field(r.suite) << ',' << csv_field(r.name) << ',' << csv_field(r.anchor) << ",,,,"
           << number(r.residual) << ',' << number(r.tolerance) << ',' << (r.bound == Bound::Max ? "max" : "min") << ','
           << (r.pass ? 1 : 0) << '\n';
    }
    for (const auto& p : report.series) {
        os << "series,deformation," << csv_field(p.series) << ",," << p.region << ',' << number(p.t) << ','
           << number(p.value) << ',' << number(p.residual) << ",,,\n";
    }
    for (const auto& n : report.notes) {
        os << "note," << csv_field(n.suite) << ',' << csv_field(n.name) << ',' << csv_field(n.detail) << ",,,"
           << number(n.value) << ",,,,\n";
    }
    return os.str();
}

ReportFormat parse_format(const std::string& s) {
    if (s == "json") return ReportFormat::Json;
    if (s == "csv") return ReportFormat::Csv;
    throw InvariantViolation("unknown report format '" + s + "' (json or csv)");
}

void export_table(const RunReport& report, ReportFormat format, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IOError("cannot open " + path.string() + " for writing");
    if (format == ReportFormat::Json) {
        out << to_json(report).dump(2) << '\n';
    } else {
        out << to_csv(report);
    }
    if (!out) throw IOError("write to " + path.string() + " failed");
}

}  // namespace tubekit
