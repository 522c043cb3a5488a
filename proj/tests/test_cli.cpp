#include "support.hpp"

#include "fucik/cli.hpp"
#include "fucik/errors.hpp"
#include "fucik/io.hpp"

#include <doctest.h>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace fucik;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("fucik_cli_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

RunConfig local_config(Mode mode, const fs::path& out) {
    RunConfig c;
    c.mode = mode;
    c.kernel = KernelSpec::parse("local");
    c.a = 0.0;
    c.b = std::numbers::pi;
    c.elements = 128;
    c.out = out.string();
    return c;
}

int count(const std::string& text, const std::string& needle) {
    int n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

std::string null_stream_run(const RunConfig& c, RunReport& rep) {
    std::ostringstream log;
    rep = run(c, log);
    return log.str();
}

} // namespace

// ---------------------------------------------------------------------------
// Formatting and files

TEST_CASE("format_double: shortest round trip") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> ex(-300.0, 300.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, ex(rng));
        const std::string s = format_double(x);
        double back = 0.0;
        std::from_chars(s.data(), s.data() + s.size(), back);
        CHECK(back == x);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(std::nan("")) == "nan");
    CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("fnv1a_hex: reference vectors") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
    CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("write_atomic: replaces the target and leaves no temporary") {
    const fs::path dir = scratch("atomic");
    fs::create_directories(dir);
    write_atomic(dir / "x.txt", "first");
    write_atomic(dir / "x.txt", "second");
    CHECK(slurp(dir / "x.txt") == "second");
    CHECK(!fs::exists(dir / "x.txt.tmp"));
    CHECK_THROWS(write_atomic(dir / "missing" / "x.txt", "y"));
    fs::remove_all(dir);
}

TEST_CASE("curve CSV: written rows read back") {
    CurveBranch br;
    br.k = 1;
    br.samples.push_back({1.25, 33.5, 1e-9, 12, true, "", std::nullopt});
    br.samples.push_back({2.0, 0.0, 0.5, 300, false, "no root", std::nullopt});
    const std::string text = curve_csv(br, {"curve", "abc", 7});
    CHECK(text.rfind("# schema=curve/1 config=abc seed=7 version=", 0) == 0);
    const std::vector<CurveRow> rows = read_curve_csv(text);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].alpha == 1.25);
    CHECK(rows[0].beta == 33.5);
    CHECK(rows[0].m_residual == 1e-9);
    CHECK(rows[0].iters == 12);
    CHECK(rows[0].source == "solver");
    CHECK(std::isnan(rows[1].beta));
    CHECK_THROWS_AS(read_curve_csv("alpha,beta\n1,2\n"), ConfigError);
    CHECK_THROWS_AS(read_curve_csv("alpha,beta,m_residual,iters,source\n1,x,0,0,solver\n"), ConfigError);

    const std::string oracle = oracle_curve_csv(classical_curve(1, {2.0, 3.0}), {"curve", "abc", 7});
    const std::vector<CurveRow> orows = read_curve_csv(oracle);
    REQUIRE(orows.size() == 2);
    CHECK(orows[1].source == "oracle");
    CHECK(orows[1].alpha == 3.0);
}

// ---------------------------------------------------------------------------
// SVG

TEST_CASE("plot_svg: markers, vertices and byte stability") {
    const ArtifactMeta meta{"plot", "0123", 3};
    const std::string one = plot_svg({{"p", {{1.0, 2.0}}, false}}, {"t", "x", "y"}, meta);
    CHECK(count(one, "<circle") == 1);
    CHECK(count(one, "<polyline") == 0);
    CHECK(one.find("width=\"800\" height=\"600\"") != std::string::npos);

    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < 33; ++i) pts.emplace_back(0.1 * i, std::sin(0.1 * i));
    const std::string curve = plot_svg({{"c", pts, false}}, {"t", "x", "y"}, meta);
    const auto start = curve.find("points=\"");
    REQUIRE(start != std::string::npos);
    const auto end = curve.find('"', start + 8);
    std::istringstream vertices(curve.substr(start + 8, end - start - 8));
    int n = 0;
    for (std::string v; vertices >> v;) {
        const auto comma = v.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(comma - v.find('.') == 5);
        CHECK(v.size() - v.rfind('.') == 5);
        ++n;
    }
    CHECK(n == 33);
    CHECK(plot_svg({{"c", pts, false}}, {"t", "x", "y"}, meta) == curve);
    CHECK(curve.find("config=0123 seed=3") != std::string::npos);

    CHECK_THROWS_AS(plot_svg({}, {"t", "x", "y"}, meta), EmptySeries);
    CHECK_THROWS_AS(plot_svg({{"e", {}, false}}, {"t", "x", "y"}, meta), EmptySeries);
    CHECK_THROWS_AS(plot_svg({{"n", {{0.0, std::nan("")}}, false}}, {"t", "x", "y"}, meta), InvalidArgument);
    const std::string escaped = plot_svg({{"a<b", {{0.0, 0.0}}, false}}, {"x & y", "x", "y"}, meta);
    CHECK(escaped.find("a&lt;b") != std::string::npos);
    CHECK(escaped.find("x &amp; y") != std::string::npos);
}

// ---------------------------------------------------------------------------
// Configuration

TEST_CASE("RunConfig: JSON round trip") {
    RunConfig c;
    CHECK(RunConfig::from_json(c.to_json()).to_json() == c.to_json());
    c.mode = Mode::Curve;
    c.kernel = KernelSpec::parse("fractional:s=0.3,scale=2.5");
    c.a = -2.0;
    c.b = 3.5;
    c.elements = 64;
    c.k = 2;
    c.alpha_samples = 5;
    c.window_lo = 0.2;
    c.window_hi = 0.9;
    c.seed = 99;
    c.starts = 7;
    c.tol_m = 1e-7;
    c.tol_validate = 0.02;
    const json j = c.to_json();
    const RunConfig d = RunConfig::from_json(j);
    CHECK(d.to_json() == j);
    CHECK(d.to_json().dump() == j.dump());
    CHECK(d.kernel.s == 0.3);
    CHECK(d.kernel.scale == 2.5);
    CHECK(!d.tol_grad);
    CHECK(*d.tol_m == 1e-7);
    CHECK(KernelSpec::parse(d.kernel.to_string()).to_string() == "fractional:s=0.3,scale=2.5");
    CHECK(KernelSpec::parse("local").to_string() == "local");
}

TEST_CASE("RunConfig: rejects malformed values") {
    const json base = RunConfig{}.to_json();
    const auto with = [&](const std::string& key, const json& v) {
        json j = base;
        j[key] = v;
        return j;
    };
    CHECK_THROWS_AS(RunConfig::from_json(with("elemnts", 5)), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("elements", "many")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("elements", 2)), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("mode", "plot")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("kernel", "fractional:t=0.5")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("kernel", "fractional:s=1.5")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("kernel", "gaussian")), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("domain", json::array({1.0, 0.0}))), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("tol_m", -1.0)), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("tol_validate", 0.0)), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("seed", -3)), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("window", json::array({0.5, 0.2}))), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json(with("mode", "solve")), ConfigError); // needs a problem
    CHECK_THROWS_AS(RunConfig::from_json(json::array()), ConfigError);
}

TEST_CASE("config_hash: covers numbers, not mode or output") {
    RunConfig a;
    RunConfig b = a;
    b.mode = Mode::Validate;
    b.out = "elsewhere";
    CHECK(config_hash(a) == config_hash(b));
    b.seed = 1;
    CHECK(config_hash(a) != config_hash(b));
    CHECK(config_hash(a, "{}") != config_hash(a, "{ }"));
}

// ---------------------------------------------------------------------------
// Problems

TEST_CASE("load_problem: forcing, nonlinearity and limits") {
    RunConfig c;
    c.elements = 64;
    const json p = json::parse(R"({"alpha": 10.0, "beta": 25.0, "k": 1,
        "f": {"name": "atan_scaled", "amplitude": 2.0, "rate": 0.5}, "f_limits": [1.0, -1.0],
        "h": {"named": "phi_3", "scale": 0.25}})");
    const SemilinearProblem pr = load_problem(p, c);
    CHECK(pr.params.alpha() == 10.0);
    CHECK(pr.params.beta() == 25.0);
    CHECK(pr.nonlinearity.name() == "atan_scaled");
    CHECK(*pr.nonlinearity.f_left() == 1.0);
    CHECK(*pr.nonlinearity.f_right() == -1.0);
    CHECK(pr.nonlinearity.f(1e6) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(pr.h.coeffs()(2) == doctest::Approx(0.25));
    CHECK(pr.h.coeffs().norm() == doctest::Approx(0.25));

    json t = p;
    t["f"] = json::parse(R"({"table": {"t": [-1, 1], "f": [1, -1]}})");
    t.erase("f_limits");
    t["h"] = json{{"coeffs", std::vector<double>(63, 0.5)}};
    const SemilinearProblem tp = load_problem(t, c);
    CHECK(tp.nonlinearity.f(0.5) == doctest::Approx(-0.5));
    CHECK(tp.h.coeffs()(10) == 0.5);

    json bad = p;
    bad["h"] = json{{"coeffs", {1.0, 2.0}}};
    CHECK_THROWS_AS(load_problem(bad, c), ConfigError);
    bad = p;
    bad["h"] = json{{"named", "phi_0"}};
    CHECK_THROWS_AS(load_problem(bad, c), ConfigError);
    bad = p;
    bad["f"] = json{{"name", "sinh"}};
    CHECK_THROWS_AS(load_problem(bad, c), ConfigError);
    bad = p;
    bad["extra"] = 1;
    CHECK_THROWS_AS(load_problem(bad, c), ConfigError);
    bad = p;
    bad["beta"] = "somewhere";
    CHECK_THROWS_AS(load_problem(bad, c), ConfigError);
    bad = p;
    bad["alpha"] = 3.0; // below lambda_1
    CHECK_THROWS_AS(load_problem(bad, c), InvalidArgument);
}

TEST_CASE("load_problem: on-curve beta is classified as resonance") {
    RunConfig c;
    c.elements = 64;
    const json p = json::parse(R"({"alpha": 12.0, "beta": "on-curve", "f": {"name": "zero"}})");
    const SemilinearProblem pr = load_problem(p, c);
    REQUIRE(pr.classification);
    CHECK(pr.classification->regime == Regime::Resonance);
    CHECK(pr.classification->beta_curve == pr.params.beta());
    const BetaResult r = beta_of_alpha(12.0, pr.basis());
    CHECK(r.point.beta == pr.params.beta());
    CHECK(pr.h.coeffs().norm() == 0.0);
}

// ---------------------------------------------------------------------------
// Runs

TEST_CASE("run eigen: classical spectrum of the local operator") {
    const fs::path out = scratch("eigen");
    RunConfig c = local_config(Mode::Eigen, out);
    c.elements = 200;
    RunReport rep;
    null_stream_run(c, rep);
    REQUIRE(rep.exit_code == 0);
    std::istringstream csv(slurp(out / "eigenvalues.csv"));
    std::string line;
    std::getline(csv, line);
    CHECK(line.find("config=" + config_hash(c)) != std::string::npos);
    std::getline(csv, line);
    CHECK(line == "j,lambda");
    for (int j = 1; j <= 4; ++j) {
        std::getline(csv, line);
        const double lambda = std::stod(line.substr(line.find(',') + 1));
        CHECK(std::abs(lambda - j * j) <= 0.005 * j * j);
    }
    const json basis = json::parse(slurp(out / "basis.json"));
    CHECK(basis["kernel"]["variant"] == "local");
    CHECK(basis["mesh"]["n_elements"] == 200);
    CHECK(basis["vectors"].size() == 199u * 199u);
    CHECK(basis["meta"]["seed"] == 0);
    fs::remove_all(out);
}

TEST_CASE("run curve then validate: oracle comparison passes") {
    const fs::path out = scratch("curve");
    RunConfig c = local_config(Mode::Curve, out);
    RunReport rep;
    null_stream_run(c, rep);
    REQUIRE(rep.exit_code == 0);
    for (const char* f : {"curve.csv", "curve.json", "curve.svg"}) CHECK(fs::exists(out / f));
    const std::string svg = slurp(out / "curve.svg");
    CHECK(count(svg, "<polyline") == 4); // curve, two lambda_1 lines, diagonal
    const json cj = json::parse(slurp(out / "curve.json"));
    CHECK(cj["samples"].size() == 9u);
    CHECK(cj["samples"][0]["minimizer"].size() == 127u);

    c.mode = Mode::Validate;
    null_stream_run(c, rep);
    CHECK(rep.exit_code == 0);
    int curve_checks = 0;
    for (const CheckResult& ch : rep.checks) {
        CHECK(ch.pass);
        if (ch.name.rfind("classical curve", 0) == 0) ++curve_checks;
    }
    CHECK(curve_checks == 9);
    const json v = json::parse(slurp(out / "validation.json"));
    CHECK(v["pass"] == true);
    CHECK(read_curve_csv(slurp(out / "oracle_curve.csv")).size() == 9u);

    // A tolerance nobody can meet makes validation fail with exit status 1.
    c.tol_validate = 1e-12;
    null_stream_run(c, rep);
    CHECK(rep.exit_code == 1);
    fs::remove_all(out);
}

TEST_CASE("run solve: artifacts and byte-identical rerun") {
    const fs::path dir = scratch("solve");
    fs::create_directories(dir);
    spit(dir / "problem.json", R"({"alpha": 10.0, "beta": 20.0, "f": {"name": "tanh"}, "h": {"named": "phi_1", "scale": 0.1}})");
    RunConfig c;
    c.mode = Mode::Solve;
    c.elements = 64;
    c.problem = (dir / "problem.json").string();
    c.out = (dir / "out").string();
    RunReport rep;
    null_stream_run(c, rep);
    REQUIRE(rep.exit_code == 0);
    const json s = json::parse(slurp(dir / "out" / "saddle.json"));
    CHECK(s["status"] == "converged");
    CHECK(s["problem"]["regime"] == "nonresonance");
    CHECK(s["meta"]["config_hash"] == config_hash(c, slurp(dir / "problem.json")));
    CHECK(s["residual"].get<double>() <= s["tol_res"].get<double>());
    std::map<std::string, std::string> first;
    for (const std::string& f : rep.files) first[f] = slurp(f);
    CHECK(first.size() == 3u);
    for (const auto& [name, text] : first) {
        CHECK(text.find(config_hash(c, slurp(dir / "problem.json"))) != std::string::npos);
        CHECK(text.find(std::string(library_version)) != std::string::npos);
    }
    null_stream_run(c, rep);
    for (const std::string& f : rep.files) CHECK(slurp(f) == first[f]);
    fs::remove_all(dir);
}

TEST_CASE("run: failures leave no output") {
    const fs::path dir = scratch("fail");
    fs::create_directories(dir);
    spit(dir / "broken.json", R"({"alpha": 10.0, "beta": )");
    RunConfig c;
    c.mode = Mode::Solve;
    c.elements = 64;
    c.problem = (dir / "broken.json").string();
    c.out = (dir / "out").string();
    RunReport rep;
    const std::string log = null_stream_run(c, rep);
    CHECK(rep.exit_code == 2);
    CHECK(log.find("config error") != std::string::npos);
    CHECK(!fs::exists(dir / "out"));

    // Out-of-scope parameters surface the solver's refusal.
    spit(dir / "far.json", R"({"alpha": 10.0, "beta": 200.0, "f": {"name": "tanh"}})");
    c.problem = (dir / "far.json").string();
    null_stream_run(c, rep);
    CHECK(rep.exit_code == 2);
    CHECK(!fs::exists(dir / "out"));
    fs::remove_all(dir);
}

TEST_CASE("executable: malformed JSON config") {
    const fs::path dir = scratch("exe");
    fs::create_directories(dir);
    spit(dir / "bad.json", "{\"mode\": \"eigen\", \"elements\": ");
    const std::string cmd = std::string(FUCIK_CLI_PATH) + " --config " + (dir / "bad.json").string() + " --out " +
                            (dir / "out").string() + " > " + (dir / "log.txt").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(status != 0);
    CHECK(!fs::exists(dir / "out"));
    CHECK(slurp(dir / "log.txt").find("malformed config JSON") != std::string::npos);

    spit(dir / "good.json", R"({"mode": "eigen", "kernel": "local", "elements": 16, "domain": [0, 1]})");
    const std::string ok = std::string(FUCIK_CLI_PATH) + " --config " + (dir / "good.json").string() + " --elements 20 --out " +
                           (dir / "out").string() + " > " + (dir / "log.txt").string() + " 2>&1";
    CHECK(std::system(ok.c_str()) == 0);
    const json basis = json::parse(slurp(dir / "out" / "basis.json"));
    CHECK(basis["mesh"]["n_elements"] == 20);
    CHECK(basis["mesh"]["b"] == 1.0);
    fs::remove_all(dir);
}
