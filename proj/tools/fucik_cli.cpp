#include "fucik/cli.hpp"
#include "fucik/errors.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

std::pair<double, double> parse_pair(const std::string& text, const std::string& what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw fucik::ConfigError(what + " must be given as lo,hi");
    try {
        std::size_t u1 = 0, u2 = 0;
        const std::string l = text.substr(0, comma), r = text.substr(comma + 1);
        const double lo = std::stod(l, &u1), hi = std::stod(r, &u2);
        if (u1 != l.size() || u2 != r.size()) throw std::invalid_argument(text);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw fucik::ConfigError("cannot read " + what + " from '" + text + "'");
    }
}

} // namespace

int main(int argc, char** argv) {
    using fucik::RunConfig;
    const RunConfig defaults;
    CLI::App app{"Fucik spectrum of the nonlocal Dirichlet operator on an interval, and saddle-point solver for "
                 "the jumping semilinear problem."};
    app.get_formatter()->column_width(36);

    std::string config_path, mode = "eigen", kernel = defaults.kernel.to_string(), domain = "-1,1", window = "0.1,1";
    RunConfig flags;
    double tol_grad = 0.0, tol_m = 0.0, tol_beta = 0.0;
    app.add_option("--config", config_path, "JSON run configuration; flags given explicitly override its keys");
    auto* o_mode = app.add_option("--mode", mode, "eigen | curve | solve | validate")->capture_default_str();
    auto* o_kernel = app.add_option("--kernel", kernel, "fractional:s=<s>[,scale=<c>] or local")->capture_default_str();
    auto* o_domain = app.add_option("--domain", domain, "interval endpoints a,b")->capture_default_str();
    auto* o_el = app.add_option("--elements", flags.elements, "number of mesh elements")->capture_default_str();
    auto* o_k = app.add_option("--k", flags.k, "splitting index: X1 = span(phi_1..phi_k)")->capture_default_str();
    auto* o_as = app.add_option("--alpha-samples", flags.alpha_samples, "Chebyshev alpha samples per curve")
                     ->capture_default_str();
    auto* o_win = app.add_option("--alpha-window", window,
                                 "alpha window lo,hi as fractions of the gap above lambda_k")
                      ->capture_default_str();
    auto* o_prob = app.add_option("--problem", flags.problem, "problem JSON for solve mode");
    auto* o_out = app.add_option("--out", flags.out, "output directory")->capture_default_str();
    auto* o_seed = app.add_option("--seed", flags.seed, "seed for random multistarts and test fields")
                       ->capture_default_str();
    auto* o_starts = app.add_option("--starts", flags.starts, "multistart count on the X2 sphere")->capture_default_str();
    auto* o_tg = app.add_option("--tol-grad", tol_grad, "stationarity tolerance (default 1e-9 (1 + lambda_{k+1}))");
    auto* o_tm = app.add_option("--tol-m", tol_m, "root tolerance on m (default 1e-8 lambda_{k+1})");
    auto* o_tb = app.add_option("--tol-beta", tol_beta, "beta bracket width (default 1e-6 lambda_{k+1})");
    auto* o_tv = app.add_option("--tol-validate", flags.tol_validate, "relative tolerance against the classical curve")
                     ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    RunConfig config;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw fucik::ConfigError("cannot read " + config_path);
            std::stringstream text;
            text << in.rdbuf();
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(text.str());
            } catch (const nlohmann::json::exception& e) {
                throw fucik::ConfigError(std::string("malformed config JSON: ") + e.what());
            }
            config = RunConfig::from_json(j);
        }
        const auto given = [](CLI::Option* o) { return o->count() > 0; };
        const bool from_file = !config_path.empty();
        const auto take = [&](CLI::Option* o, const std::function<void()>& apply) {
            if (!from_file || given(o)) apply();
        };
        take(o_mode, [&] { config.mode = fucik::parse_mode(mode); });
        take(o_kernel, [&] { config.kernel = fucik::KernelSpec::parse(kernel); });
        take(o_domain, [&] { std::tie(config.a, config.b) = parse_pair(domain, "domain"); });
        take(o_el, [&] { config.elements = flags.elements; });
        take(o_k, [&] { config.k = flags.k; });
        take(o_as, [&] { config.alpha_samples = flags.alpha_samples; });
        take(o_win, [&] { std::tie(config.window_lo, config.window_hi) = parse_pair(window, "alpha window"); });
        take(o_prob, [&] { config.problem = flags.problem; });
        take(o_out, [&] { config.out = flags.out; });
        take(o_seed, [&] { config.seed = flags.seed; });
        take(o_starts, [&] { config.starts = flags.starts; });
        take(o_tv, [&] { config.tol_validate = flags.tol_validate; });
        if (given(o_tg)) config.tol_grad = tol_grad;
        if (given(o_tm)) config.tol_m = tol_m;
        if (given(o_tb)) config.tol_beta = tol_beta;
    } catch (const fucik::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    const fucik::RunReport report = fucik::run(config, std::cerr);
    for (const std::string& f : report.files) std::cout << f << "\n";
    for (const fucik::CheckResult& c : report.checks)
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "\n";
    return report.exit_code;
}
