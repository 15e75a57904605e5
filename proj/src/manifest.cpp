#include "tubekit/manifest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tubekit/errors.hpp"

#ifndef TUBEKIT_DEFAULT_CATALOG
#define TUBEKIT_DEFAULT_CATALOG "data/manifolds"
#endif

namespace tubekit {

namespace {

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view tok, std::size_t line) {
    double v = 0.0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size()) {
        throw ManifestError("line " + std::to_string(line) + ": bad number '" + std::string(tok) + "'");
    }
    return v;
}

std::size_t parse_index(std::string_view tok, std::size_t line, std::size_t dim) {
    std::size_t v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() || v == 0 || v > dim) {
        throw ManifestError("line " + std::to_string(line) + ": bad index '" + std::string(tok) + "'");
    }
    return v - 1;
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

// Remainder of the line after skipping `skip` whitespace-separated tokens.
std::string_view rest_after(std::string_view s, std::size_t skip) {
    std::size_t i = 0;
    for (std::size_t t = 0; t < skip; ++t) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    }
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    return s.substr(i);
}

}  // namespace

ChartManifold parse_manifest(std::string_view text) {
    std::string name;
    std::size_t dim = 0;
    std::vector<std::string> coords;
    std::vector<Interval> domain;
    struct Entry {
        std::size_t i, j;
        ScalarExpr e;
    };
    std::vector<Entry> metric_entries, acs_entries;
    std::optional<TubeSpec> tube;
    double epsilon = 0.0;
    double fiber_box = 1.0;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const auto toks = split(line);
        if (toks.empty() || toks[0].starts_with('#')) continue;
        const std::string_view key = toks[0];
        auto need = [&](std::size_t count) {
            if (toks.size() < count) {
                throw ManifestError("line " + std::to_string(line_no) + ": '" + std::string(key) +
                                    "' needs more fields");
            }
        };
        auto need_dim = [&] {
            if (dim == 0) throw ManifestError("line " + std::to_string(line_no) + ": 'dim' must come first");
        };
        if (key == "name") {
            need(2);
            name = std::string(toks[1]);
        } else if (key == "dim") {
            need(2);
            dim = static_cast<std::size_t>(parse_double(toks[1], line_no));
            if (dim == 0) throw ManifestError("dimension must be positive");
        } else if (key == "coords") {
            need_dim();
            for (std::size_t t = 1; t < toks.size(); ++t) coords.emplace_back(toks[t]);
        } else if (key == "domain") {
            need(3);
            domain.push_back({parse_double(toks[1], line_no), parse_double(toks[2], line_no)});
        } else if (key == "metric" || key == "acs") {
            need_dim();
            need(4);
            Entry e{parse_index(toks[1], line_no, dim), parse_index(toks[2], line_no, dim), ScalarExpr()};
            try {
                e.e = parse_expr(rest_after(line, 3));
            } catch (const ParseError& err) {
                throw ManifestError("line " + std::to_string(line_no) + ": " + err.what());
            }
            if (key == "metric") {
                if (e.i > e.j) std::swap(e.i, e.j);
                metric_entries.push_back(std::move(e));
            } else {
                acs_entries.push_back(std::move(e));
            }
        } else if (key == "tube") {
            need_dim();
            need(3);
            TubeSpec t;
            t.tangential = static_cast<std::size_t>(parse_double(toks[1], line_no));
            t.epsilon = parse_double(toks[2], line_no);
            for (std::size_t k = 3; k < toks.size(); ++k) t.origin.push_back(parse_double(toks[k], line_no));
            tube = std::move(t);
        } else if (key == "epsilon") {
            need(2);
            epsilon = parse_double(toks[1], line_no);
        } else if (key == "fiber_box") {
            need(2);
            fiber_box = parse_double(toks[1], line_no);
        } else {
            throw ManifestError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "'");
        }
    }

    if (dim == 0) throw ManifestError("manifest lacks 'dim'");
    if (name.empty()) throw ManifestError("manifest lacks 'name'");
    if (coords.empty()) {
        for (std::size_t i = 0; i < dim; ++i) coords.push_back("x" + std::to_string(i + 1));
    }
    if (coords.size() != dim) throw ManifestError("coordinate count does not match dim");
    if (domain.size() != dim) throw ManifestError("need one domain line per coordinate");

    ExprMatrix metric(dim, dim);
    for (auto& e : metric_entries) metric(e.i, e.j) = e.e;
    std::optional<ExprMatrix> acs;
    if (!acs_entries.empty()) {
        acs = ExprMatrix(dim, dim);
        for (auto& e : acs_entries) (*acs)(e.i, e.j) = e.e;
    }
    if (tube) {
        if (tube->tangential == 0 || tube->tangential >= dim) throw ManifestError("tube needs 0 < k < dim");
        if (tube->origin.empty()) tube->origin.assign(dim - tube->tangential, 0.0);
        if (tube->origin.size() != dim - tube->tangential) throw ManifestError("tube origin has wrong length");
    }
    try {
        ChartManifold m(name, std::move(coords), std::move(domain), std::move(metric), std::move(acs));
        m.tube = tube;
        m.epsilon = epsilon;
        m.fiber_box = fiber_box;
        return m;
    } catch (const InvariantViolation& err) {
        throw ManifestError(std::string("invalid manifold: ") + err.what());
    }
}

std::string serialize_manifest(const ChartManifold& m) {
    std::ostringstream out;
    const std::size_t n = m.dim();
    out << "name " << m.name() << '\n';
    out << "dim " << n << '\n';
    out << "coords";
    for (const auto& c : m.coordinate_names()) out << ' ' << c;
    out << '\n';
    for (const auto& iv : m.domain()) out << "domain " << fmt(iv.lo) << ' ' << fmt(iv.hi) << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (m.metric()(i, j).is_zero()) continue;
            out << "metric " << i + 1 << ' ' << j + 1 << ' ' << to_string(m.metric()(i, j)) << '\n';
        }
    }
    if (m.acs()) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if ((*m.acs())(i, j).is_zero()) continue;
                out << "acs " << i + 1 << ' ' << j + 1 << ' ' << to_string((*m.acs())(i, j)) << '\n';
            }
        }
    }
    if (m.tube) {
        out << "tube " << m.tube->tangential << ' ' << fmt(m.tube->epsilon);
        for (double o : m.tube->origin) out << ' ' << fmt(o);
        out << '\n';
    }
    if (m.epsilon > 0.0) out << "epsilon " << fmt(m.epsilon) << '\n';
    if (m.fiber_box != 1.0) out << "fiber_box " << fmt(m.fiber_box) << '\n';
    return out.str();
}

ChartManifold load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ManifestError("cannot open manifest '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_manifest(buf.str());
}

void save_manifest(const ChartManifold& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ManifestError("cannot write manifest '" + path.string() + "'");
    out << serialize_manifest(m);
}

std::filesystem::path catalog_dir() {
    if (const char* env = std::getenv("TUBEKIT_CATALOG"); env != nullptr && *env != '\0') return env;
    return TUBEKIT_DEFAULT_CATALOG;
}

std::vector<CatalogEntry> list_manifolds() {
    std::vector<CatalogEntry> out;
    const auto dir = catalog_dir();
    if (!std::filesystem::is_directory(dir)) return out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".manifest") continue;
        const ChartManifold m = load_manifest(entry.path());
        out.push_back({m.name(), m.dim(), m.has_acs(), entry.path()});
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
    return out;
}

ChartManifold load_manifold(const std::string& name_or_path) {
    const std::filesystem::path as_path(name_or_path);
    if (std::filesystem::is_regular_file(as_path)) return load_manifest(as_path);
    const auto candidate = catalog_dir() / (name_or_path + ".manifest");
    if (std::filesystem::is_regular_file(candidate)) return load_manifest(candidate);
    std::string names;
    for (const auto& e : list_manifolds()) names += (names.empty() ? "" : ", ") + e.name;
    throw ManifestError("unknown manifold '" + name_or_path + "'; catalog (" + catalog_dir().string() +
                        "): " + names);
}

}  // namespace tubekit
