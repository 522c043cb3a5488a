#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace fucik {

enum class KernelVariant { Fractional, Local, Tabulated };

std::string to_string(KernelVariant v);

/// Interaction kernel K of the nonlocal operator.
///
/// Fractional kernels are K(x) = scale * |x|^-(1+2s) with lower-bound constant
/// lambda_K = scale. The Local variant stands for the classical s -> 1 limit
/// (the operator -u''); it has no pointwise kernel. Tabulated kernels wrap an
/// arbitrary callable together with the (s, lambda_K) metadata they claim to
/// satisfy; they can be validated but not assembled.
class Kernel {
public:
    static Kernel fractional(double s, double scale = 1.0);
    static Kernel local();
    static Kernel tabulated(std::function<double(double)> k, double s, double lambda_k,
                            std::string label = "tabulated");

    KernelVariant variant() const { return variant_; }
    double order() const { return s_; }
    double scale() const { return scale_; }
    double lambda_K() const { return lambda_k_; }
    const std::string& label() const { return label_; }

    /// Pointwise value K(x), x != 0. Throws UnsupportedKernel for Local.
    double operator()(double x) const;

    /// Same kernel with every value multiplied by factor.
    Kernel scaled(double factor) const;

private:
    Kernel() = default;

    KernelVariant variant_ = KernelVariant::Local;
    double s_ = 1.0;
    double scale_ = 1.0;
    double lambda_k_ = 1.0;
    std::string label_;
    std::function<double(double)> fn_;
};

struct ConditionCheck {
    std::string name; // "K1", "K2", "K3"
    bool applicable = true;
    bool pass = false;
    std::vector<std::pair<std::string, double>> witness;
};

struct ValidationReport {
    std::vector<ConditionCheck> checks;

    bool all_pass() const;
    const ConditionCheck& get(const std::string& name) const;
};

/// Numeric checks of the integrability (K1), lower-bound (K2) and evenness (K3)
/// conditions on sample_count log-spaced abscissae of each sign.
ValidationReport validate_kernel(const Kernel& kernel, int sample_count);

/// Truncated integral of min(x^2,1) K(x) over [-R, R], computed numerically.
double truncated_moment(const Kernel& kernel, double range);

} // namespace fucik
