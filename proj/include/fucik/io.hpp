#pragma once

// Artifact emission: CSV tables, JSON documents and SVG plots. Every artifact
// carries the schema version, the config hash, the seed and the library version.

#include "fucik/eigen_basis.hpp"
#include "fucik/fucik.hpp"
#include "fucik/oracle.hpp"
#include "fucik/semilinear.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fucik {

inline constexpr std::string_view library_version = "0.3.0";
inline constexpr int schema_version = 1;

struct ArtifactMeta {
    std::string schema; ///< e.g. "eigenvalues", "curve"
    std::string config_hash;
    std::uint64_t seed = 0;
};

/// Shortest decimal that reads back to the same double; "nan", "inf", "-inf" otherwise.
std::string format_double(double x);

/// 64-bit FNV-1a of the bytes, as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// "# schema=<name>/<version> config=<hash> seed=<n> version=<lib>" plus newline.
std::string csv_header(const ArtifactMeta& meta);
nlohmann::json meta_json(const ArtifactMeta& meta);

/// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& content);

std::string eigen_table_csv(const EigenBasis& basis, const ArtifactMeta& meta);
/// {meta, kernel:{variant,s,scale,lambda_K}, mesh:{a,b,n_elements}, k, eigenvalues, vectors (row-major)}.
nlohmann::json basis_json(const EigenBasis& basis, const ArtifactMeta& meta);

/// Columns alpha,beta,m_residual,iters,source. Failed samples carry beta = nan.
std::string curve_csv(const CurveBranch& branch, const ArtifactMeta& meta);
/// Shooting results in the curve schema; m_residual holds the boundary mismatch.
std::string oracle_curve_csv(const std::vector<ShootingResult>& curve, const ArtifactMeta& meta);
nlohmann::json curve_json(const CurveBranch& branch, const ArtifactMeta& meta);

struct CurveRow {
    double alpha = 0.0;
    double beta = 0.0;
    double m_residual = 0.0;
    int iters = 0;
    std::string source;
};
/// Reads a curve CSV; throws ConfigError on malformed content.
std::vector<CurveRow> read_curve_csv(const std::string& text);

nlohmann::json saddle_json(const SemilinearProblem& problem, const SaddleResult& result, const ArtifactMeta& meta);
/// Columns iter,phase,energy,residual.
std::string trace_csv(const SaddleResult& result, const ArtifactMeta& meta);

struct Series {
    std::string label;
    std::vector<std::pair<double, double>> points;
    bool dashed = false;
};

struct PlotAxes {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::optional<std::pair<double, double>> x_range; ///< data range with 5% padding when absent
    std::optional<std::pair<double, double>> y_range;
};

/// 800x600 SVG, coordinates with four decimals. A series with one point is drawn as
/// a single circle, longer series as one polyline. Throws EmptySeries when there is
/// no series or a series has no points.
std::string plot_svg(const std::vector<Series>& series, const PlotAxes& axes, const ArtifactMeta& meta);

} // namespace fucik
