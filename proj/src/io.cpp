#include "fucik/io.hpp"

#include "fucik/errors.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fucik {

using nlohmann::json;

std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0.0 ? "inf" : "-inf";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string csv_header(const ArtifactMeta& meta) {
    return "# schema=" + meta.schema + "/" + std::to_string(schema_version) + " config=" + meta.config_hash +
           " seed=" + std::to_string(meta.seed) + " version=" + std::string(library_version) + "\n";
}

json meta_json(const ArtifactMeta& meta) {
    return {{"schema", meta.schema},
            {"schema_version", schema_version},
            {"config_hash", meta.config_hash},
            {"seed", meta.seed},
            {"library_version", std::string(library_version)}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open " + tmp.string() + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            out.close();
            std::filesystem::remove(tmp);
            throw Error("failed writing " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

} // namespace

std::string eigen_table_csv(const EigenBasis& basis, const ArtifactMeta& meta) {
    std::string out = csv_header(meta) + "j,lambda\n";
    for (int j = 1; j <= basis.dim(); ++j) out += std::to_string(j) + "," + format_double(basis.lambda(j)) + "\n";
    return out;
}

json basis_json(const EigenBasis& basis, const ArtifactMeta& meta) {
    const Kernel& kn = basis.op().kernel();
    const Mesh1D& mesh = basis.mesh();
    json vectors = json::array();
    for (Eigen::Index i = 0; i < basis.vectors().rows(); ++i)
        for (Eigen::Index j = 0; j < basis.vectors().cols(); ++j) vectors.push_back(basis.vectors()(i, j));
    return {{"meta", meta_json(meta)},
            {"version", schema_version},
            {"kernel",
             {{"variant", to_string(kn.variant())}, {"s", kn.order()}, {"scale", kn.scale()}, {"lambda_K", kn.lambda_K()}}},
            {"mesh", {{"a", mesh.a()}, {"b", mesh.b()}, {"n_elements", mesh.n_elements()}}},
            {"k", basis.k()},
            {"eigenvalues", vector_json(basis.eigenvalues())},
            {"rows", basis.vectors().rows()},
            {"cols", basis.vectors().cols()},
            {"vectors", std::move(vectors)}};
}

std::string curve_csv(const CurveBranch& branch, const ArtifactMeta& meta) {
    std::string out = csv_header(meta) + "alpha,beta,m_residual,iters,source\n";
    for (const CurveSample& s : branch.samples) {
        out += format_double(s.alpha) + "," + format_double(s.ok ? s.beta : std::nan("")) + "," +
               format_double(s.m_residual) + "," + std::to_string(s.iterations) + ",solver\n";
    }
    return out;
}

std::string oracle_curve_csv(const std::vector<ShootingResult>& curve, const ArtifactMeta& meta) {
    std::string out = csv_header(meta) + "alpha,beta,m_residual,iters,source\n";
    for (const ShootingResult& s : curve)
        out += format_double(s.alpha) + "," + format_double(s.beta) + "," + format_double(s.boundary_mismatch) + ",0,oracle\n";
    return out;
}

json curve_json(const CurveBranch& branch, const ArtifactMeta& meta) {
    json samples = json::array();
    for (const CurveSample& s : branch.samples) {
        json j = {{"alpha", s.alpha},
                  {"beta", s.ok ? json(s.beta) : json(nullptr)},
                  {"m_residual", s.m_residual},
                  {"iters", s.iterations},
                  {"ok", s.ok},
                  {"failure", s.failure}};
        if (s.point) {
            j["minimizer"] = vector_json(s.point->minimizer.coeffs());
            j["tangent_grad"] = s.point->tangent_grad;
        }
        samples.push_back(std::move(j));
    }
    return {{"meta", meta_json(meta)},
            {"k", branch.k},
            {"swapped", branch.swapped},
            {"lipschitz", branch.lipschitz},
            {"tol", {{"grad", branch.tol.grad}, {"m", branch.tol.m}, {"beta", branch.tol.beta}}},
            {"samples", std::move(samples)}};
}

std::vector<CurveRow> read_curve_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    bool header = false;
    std::vector<CurveRow> rows;
    const auto number = [](const std::string& s) {
        if (s == "nan") return std::nan("");
        double v = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError("bad number in curve CSV: " + s);
        return v;
    };
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "alpha,beta,m_residual,iters,source") throw ConfigError("unexpected curve CSV header: " + line);
            header = true;
            continue;
        }
        std::vector<std::string> cells;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
        if (cells.size() != 5) throw ConfigError("curve CSV row needs 5 cells: " + line);
        rows.push_back({number(cells[0]), number(cells[1]), number(cells[2]), static_cast<int>(number(cells[3])), cells[4]});
    }
    if (!header) throw ConfigError("curve CSV has no header");
    return rows;
}

json saddle_json(const SemilinearProblem& problem, const SaddleResult& result, const ArtifactMeta& meta) {
    const Nonlinearity& f = problem.nonlinearity;
    json trace = json::array();
    for (const TraceEntry& t : result.trace)
        trace.push_back({{"phase", t.phase}, {"energy", t.energy}, {"residual", t.residual}});
    json prob = {{"alpha", problem.params.alpha()},
                 {"beta", problem.params.beta()},
                 {"k", problem.params.k()},
                 {"f", {{"name", f.name()}, {"parameters", f.parameters()}, {"bound", f.bound()}}},
                 {"f_limits", {optional_json(f.f_left()), optional_json(f.f_right())}},
                 {"h", vector_json(problem.h.coeffs())}};
    if (problem.classification) {
        prob["regime"] = to_string(problem.classification->regime);
        prob["beta_curve"] = std::isfinite(problem.classification->beta_curve) ? json(problem.classification->beta_curve)
                                                                               : json(nullptr);
    }
    return {{"meta", meta_json(meta)},
            {"problem", std::move(prob)},
            {"status", to_string(result.status)},
            {"iterations", result.iterations},
            {"residual", result.residual},
            {"energy", result.energy},
            {"weak_form_residual", result.weak_form_residual},
            {"tol_res", result.tol_res},
            {"delta_eff", result.delta_eff},
            {"geometry",
             {{"certified", result.geometry.certified},
              {"radius", result.geometry.radius},
              {"sphere_max", result.geometry.sphere_max},
              {"manifold_min", result.geometry.manifold_min}}},
            {"ray", result.ray ? vector_json(result.ray->coeffs()) : json(nullptr)},
            {"u_star", vector_json(result.u_star.coeffs())},
            {"u_star_nodal", vector_json(result.u_star.nodal())},
            {"trace", std::move(trace)}};
}

std::string trace_csv(const SaddleResult& result, const ArtifactMeta& meta) {
    std::string out = csv_header(meta) + "iter,phase,energy,residual\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const TraceEntry& t = result.trace[i];
        out += std::to_string(i) + "," + std::to_string(t.phase) + "," + format_double(t.energy) + "," +
               format_double(t.residual) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

constexpr double canvas_w = 800.0, canvas_h = 600.0;
constexpr double margin_l = 80.0, margin_r = 30.0, margin_t = 50.0, margin_b = 60.0;
constexpr std::array<const char*, 6> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#7f7f7f"};

std::string fixed4(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    std::string s = buf;
    if (s == "-0.0000") s = "0.0000";
    return s;
}

std::string tick_label(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(x) < 1e-12 ? 0.0 : x);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

std::pair<double, double> padded(double lo, double hi) {
    if (hi == lo) {
        const double d = lo == 0.0 ? 1.0 : 0.5 * std::abs(lo);
        return {lo - d, hi + d};
    }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

} // namespace

std::string plot_svg(const std::vector<Series>& series, const PlotAxes& axes, const ArtifactMeta& meta) {
    if (series.empty()) throw EmptySeries("plot has no series");
    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    for (const Series& s : series) {
        if (s.points.empty()) throw EmptySeries("series '" + s.label + "' has no points");
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y)) throw InvalidArgument("plot coordinates must be finite");
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    }
    const auto [x0, x1] = axes.x_range ? *axes.x_range : padded(xmin, xmax);
    const auto [y0, y1] = axes.y_range ? *axes.y_range : padded(ymin, ymax);
    if (!(x1 > x0) || !(y1 > y0)) throw InvalidArgument("plot ranges must be nonempty");
    const double pw = canvas_w - margin_l - margin_r, ph = canvas_h - margin_t - margin_b;
    const auto px = [&](double x) { return margin_l + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return margin_t + (y1 - y) / (y1 - y0) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" viewBox=\"0 0 800 600\">\n";
    o << "<!-- schema=" << meta.schema << "/" << schema_version << " config=" << meta.config_hash
      << " seed=" << meta.seed << " version=" << library_version << " -->\n";
    o << "<defs><clipPath id=\"plot\"><rect x=\"" << fixed4(margin_l) << "\" y=\"" << fixed4(margin_t) << "\" width=\""
      << fixed4(pw) << "\" height=\"" << fixed4(ph) << "\"/></clipPath></defs>\n";
    o << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    o << "<rect x=\"" << fixed4(margin_l) << "\" y=\"" << fixed4(margin_t) << "\" width=\"" << fixed4(pw)
      << "\" height=\"" << fixed4(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4.0, yv = y0 + (y1 - y0) * i / 4.0;
        o << "<text x=\"" << fixed4(px(xv)) << "\" y=\"" << fixed4(canvas_h - margin_b + 18.0)
          << "\" font-size=\"12\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
        o << "<text x=\"" << fixed4(margin_l - 6.0) << "\" y=\"" << fixed4(py(yv) + 4.0)
          << "\" font-size=\"12\" text-anchor=\"end\">" << tick_label(yv) << "</text>\n";
    }
    o << "<text x=\"400.0000\" y=\"28.0000\" font-size=\"16\" text-anchor=\"middle\">" << escape(axes.title) << "</text>\n";
    o << "<text x=\"" << fixed4(margin_l + 0.5 * pw) << "\" y=\"" << fixed4(canvas_h - 16.0)
      << "\" font-size=\"14\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n";
    o << "<text x=\"18.0000\" y=\"" << fixed4(margin_t + 0.5 * ph) << "\" font-size=\"14\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 18.0000 " << fixed4(margin_t + 0.5 * ph) << ")\">" << escape(axes.y_label) << "</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const Series& s = series[i];
        const char* color = palette[i % palette.size()];
        if (s.points.size() == 1) {
            o << "<circle cx=\"" << fixed4(px(s.points[0].first)) << "\" cy=\"" << fixed4(py(s.points[0].second))
              << "\" r=\"4\" fill=\"" << color << "\" clip-path=\"url(#plot)\"/>\n";
        } else {
            o << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
              << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " clip-path=\"url(#plot)\" points=\"";
            for (std::size_t p = 0; p < s.points.size(); ++p)
                o << (p ? " " : "") << fixed4(px(s.points[p].first)) << "," << fixed4(py(s.points[p].second));
            o << "\"/>\n";
        }
        const double ly = margin_t + 16.0 + 16.0 * static_cast<double>(i);
        o << "<text x=\"" << fixed4(canvas_w - margin_r - 8.0) << "\" y=\"" << fixed4(ly)
          << "\" font-size=\"12\" text-anchor=\"end\" fill=\"" << color << "\">" << escape(s.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace fucik
