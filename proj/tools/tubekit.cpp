// tubekit: batch front end for the verification suites.
//
//   tubekit verify --manifold <name|path> --suite <id> [--tol T] [--samples N]
//                  [--seed S] [--out PATH] [--format json|csv]
//   tubekit manifolds list
//   tubekit classify --manifold <name|path> [--tol T] [--seed S]
//
// Exit status: 0 pass, 1 a check failed, 2 configuration or manifest error.
// TUBEKIT_CATALOG overrides the manifest directory.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "tubekit/errors.hpp"
#include "tubekit/hermitian.hpp"
#include "tubekit/manifest.hpp"
#include "tubekit/report.hpp"

namespace {

int verify(const tubekit::SuiteConfig& cfg) {
    const tubekit::RunReport report = tubekit::run_suite(cfg);
    if (!cfg.out) {
        std::cout << (cfg.format == tubekit::ReportFormat::Json ? tubekit::to_json(report).dump(2) + "\n"
                                                                  : tubekit::to_csv(report));
    }
    std::size_t failed = 0;
    for (const auto& r : report.records) {
        if (!r.pass) {
            ++failed;
            std::cerr << "FAIL " << r.suite << '/' << r.name << ": residual " << r.residual
                      << (r.bound == tubekit::Bound::Max ? " > " : " < ") << r.tolerance << '\n';
        }
    }
    std::cerr << report.manifold << ' ' << report.suite << ": " << report.records.size() - failed << '/'
              << report.records.size() << " checks passed in " << report.wall_time << " s\n";
    return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tube deformation and almost Hermitian structure verifier"};
    app.require_subcommand(1);

    tubekit::SuiteConfig cfg;
    std::string format = "json";
    double tol = 0.0;
    auto* verify_cmd = app.add_subcommand("verify", "run a verification suite");
    verify_cmd->add_option("--manifold", cfg.manifold, "catalog name or manifest path")->required();
    verify_cmd->add_option("--suite", cfg.suite, "sasaki|h-cases|deformation|kaehler-tube|hyper|classify|all")
        ->required();
    auto* tol_opt = verify_cmd->add_option("--tol", tol, "override every upper-bound tolerance");
    verify_cmd->add_option("--samples", cfg.samples, "sample points per check")->check(CLI::PositiveNumber);
    verify_cmd->add_option("--seed", cfg.seed, "sampling seed");
    auto* out_opt = verify_cmd->add_option("--out", "report path (stdout when absent)");
    verify_cmd->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* manifolds_cmd = app.add_subcommand("manifolds", "catalog operations");
    manifolds_cmd->require_subcommand(1);
    auto* list_cmd = manifolds_cmd->add_subcommand("list", "list the manifest catalog");

    std::string classify_manifold;
    tubekit::GHOptions gh;
    auto* classify_cmd = app.add_subcommand("classify", "sixteen-class membership of (J, g)");
    classify_cmd->add_option("--manifold", classify_manifold, "catalog name or manifest path")->required();
    classify_cmd->add_option("--tol", gh.tol, "membership tolerance");
    classify_cmd->add_option("--seed", gh.seed, "sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*verify_cmd) {
            tubekit::validate_suite(cfg.suite);
            if (*tol_opt) cfg.tol = tol;
            if (*out_opt) cfg.out = out_opt->as<std::string>();
            cfg.format = tubekit::parse_format(format);
            return verify(cfg);
        }
        if (*list_cmd) {
            std::printf("%-16s %4s %4s  %s\n", "name", "dim", "acs", "path");
            for (const auto& e : tubekit::list_manifolds()) {
                std::printf("%-16s %4zu %4s  %s\n", e.name.c_str(), e.dim, e.has_acs ? "yes" : "no",
                            e.path.string().c_str());
            }
            return 0;
        }
        if (*classify_cmd) {
            const auto report = tubekit::gh_classify(tubekit::load_manifold(classify_manifold), gh);
            std::cout << tubekit::to_json(report).dump(2) << '\n';
            return 0;
        }
    } catch (const tubekit::Error& e) {
        std::cerr << "tubekit: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
