#include "fucik/cli.hpp"

#include "fucik/errors.hpp"
#include "fucik/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace fucik {

using nlohmann::json;

std::string to_string(Mode m) {
    switch (m) {
    case Mode::Eigen: return "eigen";
    case Mode::Curve: return "curve";
    case Mode::Solve: return "solve";
    case Mode::Validate: return "validate";
    }
    return "unknown";
}

Mode parse_mode(const std::string& s) {
    for (Mode m : {Mode::Eigen, Mode::Curve, Mode::Solve, Mode::Validate})
        if (to_string(m) == s) return m;
    throw ConfigError("unknown mode '" + s + "' (expected eigen, curve, solve or validate)");
}

namespace {

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot read " + what + " from '" + s + "'");
    }
    if (used != s.size()) throw ConfigError("cannot read " + what + " from '" + s + "'");
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

json parse_json(const std::string& text, const std::string& what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError("malformed " + what + ": " + e.what());
    }
}

} // namespace

KernelSpec KernelSpec::parse(const std::string& text) {
    KernelSpec k;
    if (text == "local") {
        k.variant = KernelVariant::Local;
        k.s = 1.0;
        return k;
    }
    const std::string prefix = "fractional:";
    if (text.rfind(prefix, 0) != 0) throw ConfigError("kernel must be 'local' or 'fractional:s=<s>[,scale=<c>]'");
    bool have_s = false;
    std::istringstream in(text.substr(prefix.size()));
    for (std::string item; std::getline(in, item, ',');) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("kernel parameter '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq);
        const double v = parse_number(item.substr(eq + 1), "kernel parameter " + key);
        if (key == "s") {
            k.s = v;
            have_s = true;
        } else if (key == "scale") {
            k.scale = v;
        } else {
            throw ConfigError("unknown kernel parameter '" + key + "'");
        }
    }
    if (!have_s) throw ConfigError("fractional kernel needs s");
    return k;
}

std::string KernelSpec::to_string() const {
    if (variant == KernelVariant::Local) return "local";
    std::string out = "fractional:s=" + format_double(s);
    if (scale != 1.0) out += ",scale=" + format_double(scale);
    return out;
}

Kernel KernelSpec::kernel() const {
    return variant == KernelVariant::Local ? Kernel::local() : Kernel::fractional(s, scale);
}

// ---------------------------------------------------------------------------
// RunConfig

json RunConfig::to_json() const {
    const auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
    return {{"mode", fucik::to_string(mode)},
            {"kernel", kernel.to_string()},
            {"domain", {a, b}},
            {"elements", elements},
            {"k", k},
            {"alpha_samples", alpha_samples},
            {"window", {window_lo, window_hi}},
            {"problem", problem},
            {"out", out},
            {"seed", seed},
            {"starts", starts},
            {"tol_grad", opt(tol_grad)},
            {"tol_m", opt(tol_m)},
            {"tol_beta", opt(tol_beta)},
            {"tol_validate", tol_validate}};
}

RunConfig RunConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    RunConfig c;
    const auto number = [](const json& v, const std::string& key) {
        if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
        return v.get<double>();
    };
    const auto integer = [](const json& v, const std::string& key) {
        if (!v.is_number_integer()) throw ConfigError("config key '" + key + "' must be an integer");
        return v.get<long long>();
    };
    const auto string = [](const json& v, const std::string& key) {
        if (!v.is_string()) throw ConfigError("config key '" + key + "' must be a string");
        return v.get<std::string>();
    };
    const auto pair = [&](const json& v, const std::string& key) {
        if (!v.is_array() || v.size() != 2) throw ConfigError("config key '" + key + "' must be a two-element array");
        return std::make_pair(number(v[0], key), number(v[1], key));
    };
    const auto optional = [&](const json& v, const std::string& key) -> std::optional<double> {
        if (v.is_null()) return std::nullopt;
        return number(v, key);
    };
    for (const auto& [key, v] : j.items()) {
        if (key == "mode") c.mode = parse_mode(string(v, key));
        else if (key == "kernel") c.kernel = KernelSpec::parse(string(v, key));
        else if (key == "domain") std::tie(c.a, c.b) = pair(v, key);
        else if (key == "elements") c.elements = static_cast<int>(integer(v, key));
        else if (key == "k") c.k = static_cast<int>(integer(v, key));
        else if (key == "alpha_samples") c.alpha_samples = static_cast<int>(integer(v, key));
        else if (key == "window") std::tie(c.window_lo, c.window_hi) = pair(v, key);
        else if (key == "problem") c.problem = string(v, key);
        else if (key == "out") c.out = string(v, key);
        else if (key == "seed") {
            if (!v.is_number_unsigned()) throw ConfigError("config key 'seed' must be a nonnegative integer");
            c.seed = v.get<std::uint64_t>();
        } else if (key == "starts") c.starts = static_cast<int>(integer(v, key));
        else if (key == "tol_grad") c.tol_grad = optional(v, key);
        else if (key == "tol_m") c.tol_m = optional(v, key);
        else if (key == "tol_beta") c.tol_beta = optional(v, key);
        else if (key == "tol_validate") c.tol_validate = number(v, key);
        else throw ConfigError("unknown config key '" + key + "'");
    }
    c.validate();
    return c;
}

void RunConfig::validate() const {
    if (kernel.variant == KernelVariant::Tabulated) throw ConfigError("tabulated kernels cannot be assembled");
    if (kernel.variant == KernelVariant::Fractional && !(kernel.s > 0.0 && kernel.s < 1.0))
        throw ConfigError("fractional order s must lie in (0, 1)");
    if (!(kernel.scale > 0.0) || !std::isfinite(kernel.scale)) throw ConfigError("kernel scale must be positive");
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) throw ConfigError("domain needs finite a < b");
    if (elements < 4 || elements > 2048) throw ConfigError("elements must lie in [4, 2048]");
    if (k < 1 || k > elements - 3) throw ConfigError("k must lie in [1, elements - 3]");
    if (alpha_samples < 3) throw ConfigError("alpha-samples must be at least 3");
    if (!(window_lo >= 0.0 && window_lo < window_hi && window_hi <= 1.0))
        throw ConfigError("window must satisfy 0 <= lo < hi <= 1");
    if (starts < 1) throw ConfigError("starts must be positive");
    for (const auto& [name, t] : {std::pair{"tol-grad", tol_grad}, std::pair{"tol-m", tol_m}, std::pair{"tol-beta", tol_beta}})
        if (t && !(*t > 0.0 && std::isfinite(*t))) throw ConfigError(std::string(name) + " must be positive");
    if (!(tol_validate > 0.0) || !std::isfinite(tol_validate)) throw ConfigError("tol-validate must be positive");
    if (mode == Mode::Solve && problem.empty()) throw ConfigError("solve mode needs --problem");
    if (out.empty()) throw ConfigError("output directory must not be empty");
}

std::string config_hash(const RunConfig& config, const std::string& problem_text) {
    json j = config.to_json();
    j.erase("mode");
    j.erase("out");
    j.erase("problem");
    return fnv1a_hex(j.dump() + "\n" + problem_text);
}

BasisPtr build_basis(const RunConfig& config, int k) {
    auto op = std::make_shared<const GalerkinOperator>(assemble(config.kernel.kernel(), Mesh1D(config.a, config.b, config.elements)));
    return eigenpairs(op, k);
}

namespace {

SphereOptions sphere_options(const RunConfig& config, const EigenBasis& basis) {
    SphereOptions o;
    o.starts = config.starts;
    o.seed = config.seed;
    Tolerances t = Tolerances::defaults(basis);
    if (config.tol_grad) t.grad = *config.tol_grad;
    if (config.tol_m) t.m = *config.tol_m;
    if (config.tol_beta) t.beta = *config.tol_beta;
    o.tol = t;
    return o;
}

Nonlinearity load_nonlinearity(const json& f) {
    if (!f.is_object()) throw ConfigError("problem key 'f' must be an object");
    const auto num = [&](const char* key, double fallback) {
        if (!f.contains(key)) return fallback;
        if (!f[key].is_number()) throw ConfigError(std::string("f.") + key + " must be a number");
        return f[key].get<double>();
    };
    const auto numbers = [](const json& v, const std::string& what) {
        if (!v.is_array()) throw ConfigError(what + " must be an array of numbers");
        std::vector<double> out;
        for (const json& x : v) {
            if (!x.is_number()) throw ConfigError(what + " must be an array of numbers");
            out.push_back(x.get<double>());
        }
        return out;
    };
    if (f.contains("table")) {
        const json& t = f["table"];
        if (!t.is_object() || !t.contains("t") || !t.contains("f")) throw ConfigError("f.table needs t and f arrays");
        return Nonlinearity::table(numbers(t["t"], "f.table.t"), numbers(t["f"], "f.table.f"));
    }
    if (!f.contains("name") || !f["name"].is_string()) throw ConfigError("f needs a name or a table");
    const std::string name = f["name"].get<std::string>();
    if (name == "zero") return Nonlinearity::zero();
    if (name == "tanh") return Nonlinearity::tanh();
    if (name == "atan_scaled") return Nonlinearity::atan_scaled(num("amplitude", 1.0), num("rate", 1.0));
    if (name == "bounded_poly_clip") {
        if (!f.contains("coeffs")) throw ConfigError("bounded_poly_clip needs coeffs");
        return Nonlinearity::bounded_poly_clip(numbers(f["coeffs"], "f.coeffs"), num("clip", 1.0));
    }
    throw ConfigError("unknown nonlinearity '" + name + "'");
}

Field load_forcing(const json& h, const BasisPtr& basis) {
    if (h.is_null()) return Field::zero(basis);
    if (!h.is_object()) throw ConfigError("problem key 'h' must be an object");
    const auto vec = [&](const json& v, const std::string& what) {
        if (!v.is_array() || static_cast<int>(v.size()) != basis->dim())
            throw ConfigError(what + " must hold " + std::to_string(basis->dim()) + " numbers");
        Eigen::VectorXd out(basis->dim());
        for (int i = 0; i < basis->dim(); ++i) {
            if (!v[static_cast<std::size_t>(i)].is_number()) throw ConfigError(what + " must hold numbers");
            out(i) = v[static_cast<std::size_t>(i)].get<double>();
        }
        return out;
    };
    double scale = 1.0;
    if (h.contains("scale")) {
        if (!h["scale"].is_number()) throw ConfigError("h.scale must be a number");
        scale = h["scale"].get<double>();
    }
    if (h.contains("coeffs")) return Field(basis, Coeffs{scale * vec(h["coeffs"], "h.coeffs")});
    if (h.contains("nodal")) return Field(basis, Nodal{scale * vec(h["nodal"], "h.nodal")});
    if (h.contains("named")) {
        const std::string name = h["named"].is_string() ? h["named"].get<std::string>() : "";
        if (name.rfind("phi_", 0) != 0) throw ConfigError("h.named must look like phi_<j>");
        const double j = parse_number(name.substr(4), "eigenfunction index");
        if (j != std::floor(j) || j < 1 || j > basis->dim()) throw ConfigError("h.named index out of range");
        return scale * Field::eigenfunction(basis, static_cast<int>(j));
    }
    throw ConfigError("h needs coeffs, nodal or named");
}

} // namespace

SemilinearProblem load_problem(const json& j, const RunConfig& config) {
    if (!j.is_object()) throw ConfigError("problem must be a JSON object");
    static const std::set<std::string> known{"alpha", "beta", "k", "f", "f_limits", "h"};
    for (const auto& [key, v] : j.items())
        if (!known.count(key)) throw ConfigError("unknown problem key '" + key + "'");
    if (!j.contains("alpha") || !j["alpha"].is_number()) throw ConfigError("problem needs a numeric alpha");
    if (!j.contains("beta")) throw ConfigError("problem needs beta");
    if (!j.contains("f")) throw ConfigError("problem needs f");
    int k = config.k;
    if (j.contains("k")) {
        if (!j["k"].is_number_integer() || j["k"].get<int>() < 1) throw ConfigError("problem k must be a positive integer");
        k = j["k"].get<int>();
    }
    const BasisPtr basis = build_basis(config, k);
    const double alpha = j["alpha"].get<double>();
    std::optional<Classification> on_curve;
    double beta = 0.0;
    if (j["beta"].is_string()) {
        if (j["beta"].get<std::string>() != "on-curve") throw ConfigError("beta must be a number or \"on-curve\"");
        const BetaResult r = beta_of_alpha(alpha, basis, sphere_options(config, *basis));
        if (r.status != BetaStatus::Found) throw ConfigError("no curve point above alpha = " + format_double(alpha));
        beta = r.point.beta;
        on_curve = Classification{Regime::Resonance, beta, r.point};
    } else if (j["beta"].is_number()) {
        beta = j["beta"].get<double>();
    } else {
        throw ConfigError("beta must be a number or \"on-curve\"");
    }
    Nonlinearity f = load_nonlinearity(j["f"]);
    if (j.contains("f_limits")) {
        const json& l = j["f_limits"];
        if (!l.is_array() || l.size() != 2 || !l[0].is_number() || !l[1].is_number())
            throw ConfigError("f_limits must be [f_l, f_r]");
        f = f.with_limits(l[0].get<double>(), l[1].get<double>());
    }
    SemilinearProblem p(FucikParams(basis, alpha, beta), std::move(f),
                        load_forcing(j.contains("h") ? j["h"] : json(nullptr), basis));
    if (on_curve) p.classification = std::move(on_curve);
    return p;
}

// ---------------------------------------------------------------------------
// Modes

namespace {

using Artifacts = std::vector<std::pair<std::string, std::string>>;

void add_check(RunReport& rep, std::string name, double value, double tolerance, bool pass) {
    rep.checks.push_back({std::move(name), value, tolerance, pass});
}

void eigen_mode(const RunConfig& c, const std::string& hash, Artifacts& files) {
    const BasisPtr b = build_basis(c, c.k);
    files.emplace_back("eigenvalues.csv", eigen_table_csv(*b, {"eigenvalues", hash, c.seed}));
    files.emplace_back("basis.json", basis_json(*b, {"basis", hash, c.seed}).dump(1) + "\n");
}

CurveBranch trace(const RunConfig& c, const BasisPtr& b, bool keep_points) {
    TraceOptions o;
    o.n_samples = c.alpha_samples;
    o.window_lo = c.window_lo;
    o.window_hi = c.window_hi;
    o.sphere = sphere_options(c, *b);
    o.keep_points = keep_points;
    return trace_curve(b, o);
}

void curve_mode(const RunConfig& c, const std::string& hash, Artifacts& files, RunReport& rep) {
    const BasisPtr b = build_basis(c, c.k);
    const CurveBranch branch = trace(c, b, true);
    std::vector<std::pair<double, double>> pts;
    double prev = INFINITY;
    bool decreasing = true;
    for (const CurveSample& s : branch.samples) {
        add_check(rep, "sample alpha=" + format_double(s.alpha), s.m_residual, branch.tol.m, s.ok);
        if (!s.ok) continue;
        pts.emplace_back(s.alpha, s.beta);
        decreasing = decreasing && s.beta < prev;
        prev = s.beta;
    }
    add_check(rep, "beta strictly decreasing", static_cast<double>(pts.size()), 0.0, decreasing);
    files.emplace_back("curve.csv", curve_csv(branch, {"curve", hash, c.seed}));
    files.emplace_back("curve.json", curve_json(branch, {"curve", hash, c.seed}).dump(1) + "\n");
    if (pts.empty()) return;

    const double l1 = b->lambda(1);
    double x0 = l1, x1 = l1, y0 = l1, y1 = l1;
    for (const auto& [x, y] : pts) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    const double px = 0.05 * (x1 - x0 + 1e-12), py = 0.05 * (y1 - y0 + 1e-12);
    x0 -= px;
    x1 += px;
    y0 -= py;
    y1 += py;
    const double d0 = std::max(x0, y0), d1 = std::min(x1, y1);
    std::vector<Series> series{{"beta(alpha), k=" + std::to_string(c.k), pts, false},
                               {"lambda_1 x R", {{l1, y0}, {l1, y1}}, true},
                               {"R x lambda_1", {{x0, l1}, {x1, l1}}, true}};
    if (d1 > d0) series.push_back({"diagonal", {{d0, d0}, {d1, d1}}, true});
    const PlotAxes axes{"Fucik curve, " + c.kernel.to_string(), "alpha", "beta", std::pair{x0, x1}, std::pair{y0, y1}};
    files.emplace_back("curve.svg", plot_svg(series, axes, {"curve-plot", hash, c.seed}));
}

void solve_mode(const RunConfig& c, const json& problem_json, const std::string& hash, Artifacts& files,
                RunReport& rep) {
    SemilinearProblem p = load_problem(problem_json, c);
    const SphereOptions so = sphere_options(c, p.params.eigen());
    if (!p.classification) p.classification = classify(p, so);
    SolveOptions o;
    o.seed = c.seed;
    o.sphere = so;
    json gll_json = nullptr;
    if (p.classification->regime == Regime::Resonance && p.nonlinearity.has_limits() && p.classification->curve_point) {
        const GLLReport g = check_gll(p, fucik_eigenset(*p.classification->curve_point));
        json rays = json::array();
        for (const GLLEntry& e : g.entries) rays.push_back(e.ray);
        gll_json = {{"satisfied", g.satisfied}, {"slopes_consistent", g.slopes_consistent}, {"rays", rays}};
        if (g.diagonal)
            gll_json["diagonal"] = {{"lower", g.diagonal->lower}, {"upper", g.diagonal->upper},
                                    {"value", g.diagonal->value}, {"inside", g.diagonal->inside}};
        o.gll = g;
    }
    const SaddleResult r = solve(p, o);
    add_check(rep, "saddle " + to_string(r.status), r.residual, r.tol_res, r.status == SaddleStatus::Converged);
    json doc = saddle_json(p, r, {"saddle", hash, c.seed});
    doc["gll"] = gll_json;
    files.emplace_back("saddle.json", doc.dump(1) + "\n");
    files.emplace_back("trace.csv", trace_csv(r, {"trace", hash, c.seed}));

    const Mesh1D& mesh = p.params.eigen().mesh();
    std::vector<std::pair<double, double>> pts{{mesh.a(), 0.0}};
    for (int i = 0; i < r.u_star.nodal().size(); ++i) pts.emplace_back(mesh.node(i + 1), r.u_star.nodal()(i));
    pts.emplace_back(mesh.b(), 0.0);
    const PlotAxes axes{"saddle point (" + to_string(r.status) + ")", "x", "u", std::nullopt, std::nullopt};
    files.emplace_back("solution.svg", plot_svg({{"u*", pts, false}}, axes, {"solution-plot", hash, c.seed}));
}

std::optional<std::string> csv_config_hash(const std::string& text) {
    const auto pos = text.find(" config=");
    if (text.rfind("# ", 0) != 0 || pos == std::string::npos) return std::nullopt;
    const auto end = text.find(' ', pos + 8);
    return text.substr(pos + 8, end - pos - 8);
}

void validate_mode(const RunConfig& c, const std::string& hash, Artifacts& files, RunReport& rep) {
    const BasisPtr b = build_basis(c, c.k);
    const SphereOptions so = sphere_options(c, *b);
    const Tolerances tol = *so.tol;
    const double mid = b->lambda_k() + 0.5 * b->gap();

    {
        const double m = minimize_sphere(FucikParams(b, mid, mid), so).m_value;
        const double want = 0.5 * (b->lambda_k1() - mid);
        const double rel = std::abs(m - want) / want;
        add_check(rep, "diagonal identity", rel, 1e-6, rel <= 1e-6);
    }
    if (c.k <= 2 && b->dim() >= c.k + 2) {
        std::mt19937_64 rng(c.seed);
        std::normal_distribution<double> nd(0.0, 1.0);
        const FucikParams p(b, mid, 1.5 * b->lambda_k1());
        for (int i = 0; i < 5; ++i) {
            Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(b->dim());
            for (int j = c.k; j < b->dim(); ++j) coeffs(j) = nd(rng) * b->lambda_k1() / b->eigenvalues()(j);
            const Field v(b, Coeffs{coeffs / coeffs.norm()});
            const Field solver = maximize_X1(p, v);
            double radius = 2.0;
            Field oracle;
            for (;;) {
                try {
                    oracle = brute_force_max_X1(p, v, radius, radius / 40.0);
                    break;
                } catch (const RadiusTooSmall&) {
                    radius *= 2.0;
                }
            }
            const double diff = (oracle.coeffs() - solver.coeffs()).cwiseAbs().maxCoeff();
            add_check(rep, "X1 maximiser vs grid search #" + std::to_string(i), diff, 1e-6, diff <= 1e-6);
        }
        const double m = minimize_sphere(p, so).m_value;
        const double est = brute_force_sphere_min(p, 64).m_estimate;
        add_check(rep, "sphere minimum below two-mode search", est - m, tol.m, est >= m - tol.m);
    }
    if (c.kernel.variant == KernelVariant::Local) {
        std::vector<std::pair<double, double>> solver;
        const std::filesystem::path existing = std::filesystem::path(c.out) / "curve.csv";
        std::string text;
        if (std::filesystem::exists(existing)) text = read_file(existing.string());
        if (!text.empty() && csv_config_hash(text) == hash) {
            for (const CurveRow& row : read_curve_csv(text))
                if (std::isfinite(row.beta)) solver.emplace_back(row.alpha, row.beta);
        } else {
            for (const CurveSample& s : trace(c, b, false).samples)
                if (s.ok) solver.emplace_back(s.alpha, s.beta);
        }
        add_check(rep, "curve samples available", static_cast<double>(solver.size()), 0.0, !solver.empty());
        std::vector<double> alphas;
        for (const auto& s : solver) alphas.push_back(s.first);
        const auto exact = classical_curve(c.k, alphas, ShootingStart::Lower, c.b - c.a);
        for (std::size_t i = 0; i < solver.size(); ++i) {
            const double rel = std::abs(solver[i].second - exact[i].beta) / exact[i].beta;
            add_check(rep, "classical curve alpha=" + format_double(alphas[i]), rel, c.tol_validate, rel <= c.tol_validate);
        }
        files.emplace_back("oracle_curve.csv", oracle_curve_csv(exact, {"curve", hash, c.seed}));
    }
    std::string csv = csv_header({"validation", hash, c.seed}) + "check,value,tolerance,pass\n";
    json checks = json::array();
    for (const CheckResult& ch : rep.checks) {
        csv += "\"" + ch.name + "\"," + format_double(ch.value) + "," + format_double(ch.tolerance) + "," +
               (ch.pass ? "true" : "false") + "\n";
        checks.push_back({{"name", ch.name}, {"value", ch.value}, {"tolerance", ch.tolerance}, {"pass", ch.pass}});
    }
    const bool all = std::all_of(rep.checks.begin(), rep.checks.end(), [](const CheckResult& x) { return x.pass; });
    files.emplace_back("validation.csv", csv);
    files.emplace_back("validation.json",
                       json{{"meta", meta_json({"validation", hash, c.seed})}, {"pass", all}, {"checks", checks}}.dump(1) + "\n");
}

} // namespace

RunReport run(const RunConfig& config, std::ostream& log) {
    RunReport rep;
    try {
        config.validate();
        std::string problem_text;
        json problem_json;
        if (config.mode == Mode::Solve) {
            problem_text = read_file(config.problem);
            problem_json = parse_json(problem_text, "problem JSON");
        }
        const std::string hash = config_hash(config, problem_text);
        Artifacts files;
        switch (config.mode) {
        case Mode::Eigen: eigen_mode(config, hash, files); break;
        case Mode::Curve: curve_mode(config, hash, files, rep); break;
        case Mode::Solve: solve_mode(config, problem_json, hash, files, rep); break;
        case Mode::Validate: validate_mode(config, hash, files, rep); break;
        }
        std::filesystem::create_directories(config.out);
        for (const auto& [name, content] : files) {
            const std::filesystem::path path = std::filesystem::path(config.out) / name;
            write_atomic(path, content);
            rep.files.push_back(path.string());
        }
        for (const CheckResult& ch : rep.checks)
            if (!ch.pass) {
                log << "check failed: " << ch.name << " (value " << format_double(ch.value) << ", tolerance "
                    << format_double(ch.tolerance) << ")\n";
                rep.exit_code = 1;
            }
    } catch (const ConfigError& e) {
        rep = RunReport{2, {}, {}, e.what()};
        log << "config error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        rep = RunReport{2, {}, {}, e.what()};
        log << "error: " << e.what() << "\n";
    }
    return rep;
}

} // namespace fucik
