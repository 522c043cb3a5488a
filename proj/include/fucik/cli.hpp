#pragma once

#include "fucik/io.hpp"
#include "fucik/kernel.hpp"
#include "fucik/semilinear.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fucik {

enum class Mode { Eigen, Curve, Solve, Validate };
std::string to_string(Mode m);
Mode parse_mode(const std::string& s);

/// "fractional:s=0.5", "fractional:s=0.5,scale=2" or "local".
struct KernelSpec {
    KernelVariant variant = KernelVariant::Fractional;
    double s = 0.5;
    double scale = 1.0;

    static KernelSpec parse(const std::string& text);
    std::string to_string() const;
    Kernel kernel() const;
};

struct RunConfig {
    Mode mode = Mode::Eigen;
    KernelSpec kernel;
    double a = -1.0;
    double b = 1.0;
    int elements = 128;
    int k = 1;
    int alpha_samples = 9;
    double window_lo = 0.1; ///< curve window [lambda_k + lo gap, lambda_k + hi gap]
    double window_hi = 1.0;
    std::string problem; ///< path of the problem JSON, solve mode
    std::string out = "out";
    std::uint64_t seed = 0;
    int starts = 5;
    std::optional<double> tol_grad;
    std::optional<double> tol_m;
    std::optional<double> tol_beta;
    double tol_validate = 0.01; ///< relative agreement with the classical curve

    nlohmann::json to_json() const;
    /// Strict: unknown keys, wrong types and invalid values raise ConfigError.
    static RunConfig from_json(const nlohmann::json& j);
    /// Throws ConfigError when a value is out of range.
    void validate() const;
};

/// Hash of everything that determines the numbers: the config without mode and
/// output directory, plus the problem file contents.
std::string config_hash(const RunConfig& config, const std::string& problem_text = "");

BasisPtr build_basis(const RunConfig& config, int k);

/// Builds a problem from its JSON description:
/// {alpha, beta | "on-curve", k, f: {name, ...} | {table: {t, f}}, f_limits: [f_l, f_r]?,
///  h: {coeffs} | {nodal} | {named: "phi_j", scale?}}.
SemilinearProblem load_problem(const nlohmann::json& j, const RunConfig& config);

struct CheckResult {
    std::string name;
    double value = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct RunReport {
    int exit_code = 0; ///< 0 all checks pass, 1 a check failed, 2 configuration or library error
    std::vector<std::string> files;
    std::vector<CheckResult> checks;
    std::string error;
};

/// Computes every artifact in memory and writes them atomically at the end, so a
/// failed run leaves no output files.
RunReport run(const RunConfig& config, std::ostream& log);

} // namespace fucik
