#pragma once

// Plain-text manifold manifests.
//
//   name sphere_fermi
//   dim 2
//   coords phi s
//   domain -3.2 3.2          one line per coordinate, in order
//   domain -1.3 1.3
//   metric 1 1 cos(x2)^2     upper triangle, 1-based indices; absent entries are 0
//   metric 2 2 1
//   acs 1 2 -1               optional (1,1) field J^i_j, row i column j
//   tube 1 0.4 0             optional: tangential count, epsilon, transverse origin
//   epsilon 0.3              optional: null-section tube radius for bundle suites
//   fiber_box 1.5            optional: bundle fiber bound (default 1)
//
// Lines starting with '#' are comments. serialize_manifest writes the
// canonical form above, so a canonical file survives parse + serialize
// byte for byte.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tubekit/chart.hpp"

namespace tubekit {

ChartManifold parse_manifest(std::string_view text);
std::string serialize_manifest(const ChartManifold& m);

ChartManifold load_manifest(const std::filesystem::path& path);
void save_manifest(const ChartManifold& m, const std::filesystem::path& path);

struct CatalogEntry {
    std::string name;
    std::size_t dim = 0;
    bool has_acs = false;
    std::filesystem::path path;
};

// Directory holding the shipped manifests; TUBEKIT_CATALOG overrides it.
std::filesystem::path catalog_dir();
std::vector<CatalogEntry> list_manifolds();
// Accepts a catalog name or a path to a manifest file. Unknown names throw
// ManifestError listing the catalog.
ChartManifold load_manifold(const std::string& name_or_path);

}  // namespace tubekit
