#include "fucik/kernel.hpp"

#include "fucik/errors.hpp"
#include "fucik/gauss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fucik {

std::string to_string(KernelVariant v) {
    switch (v) {
    case KernelVariant::Fractional: return "fractional";
    case KernelVariant::Local: return "local";
    case KernelVariant::Tabulated: return "tabulated";
    }
    return "unknown";
}

Kernel Kernel::fractional(double s, double scale) {
    if (!(s > 0.0 && s < 1.0)) throw OrderOutOfRange(s);
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw InvalidArgument("kernel scale must be positive and finite");
    Kernel k;
    k.variant_ = KernelVariant::Fractional;
    k.s_ = s;
    k.scale_ = scale;
    k.lambda_k_ = scale;
    k.label_ = "fractional";
    return k;
}

Kernel Kernel::local() {
    Kernel k;
    k.variant_ = KernelVariant::Local;
    k.label_ = "local";
    return k;
}

Kernel Kernel::tabulated(std::function<double(double)> fn, double s, double lambda_k,
                         std::string label) {
    if (!fn) throw InvalidArgument("tabulated kernel needs a callable");
    Kernel k;
    k.variant_ = KernelVariant::Tabulated;
    k.s_ = s;
    k.lambda_k_ = lambda_k;
    k.label_ = std::move(label);
    k.fn_ = std::move(fn);
    return k;
}

double Kernel::operator()(double x) const {
    switch (variant_) {
    case KernelVariant::Fractional: return scale_ * std::pow(std::abs(x), -1.0 - 2.0 * s_);
    case KernelVariant::Tabulated: return scale_ * fn_(x);
    case KernelVariant::Local: break;
    }
    throw UnsupportedKernel("the local kernel has no pointwise values");
}

Kernel Kernel::scaled(double factor) const {
    if (!(factor > 0.0)) throw InvalidArgument("kernel scaling factor must be positive");
    Kernel k = *this;
    k.scale_ *= factor;
    k.lambda_k_ *= factor;
    return k;
}

bool ValidationReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const ConditionCheck& c) { return c.pass; });
}

const ConditionCheck& ValidationReport::get(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return c;
    throw InvalidArgument("no condition named " + name);
}

namespace {

// Integral of x^2 g over (0, 1] via x = exp(-y) and of g over [1, R] via x = exp(y),
// on unit-width Gauss panels in y. The inner range stops before g overflows; the
// remainder near 0 is closed with the power-law model g ~ x^-(1+2s).
double half_line_moment(const std::function<double(double)>& g, double range, double s) {
    const auto& rule = gauss_legendre<8>();
    const int inner_panels = std::min(400, static_cast<int>(600.0 / (1.0 + 2.0 * s)));
    double inner = 0.0;
    for (int panel = 0; panel < inner_panels; ++panel) {
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double y = panel + 0.5 * (rule.nodes[q] + 1.0);
            const double x = std::exp(-y);
            inner += 0.5 * rule.weights[q] * (g(x) * x) * x * x;
        }
    }
    const double x0 = std::exp(-static_cast<double>(inner_panels));
    inner += (g(x0) * x0) * x0 * x0 / (2.0 - 2.0 * s);
    double outer = 0.0;
    const double ymax = std::log(range);
    const int panels = std::max(1, static_cast<int>(std::ceil(ymax * 4.0)));
    const double width = ymax / panels;
    for (int panel = 0; panel < panels; ++panel) {
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double y = width * (panel + 0.5 * (rule.nodes[q] + 1.0));
            const double x = std::exp(y);
            outer += 0.5 * width * rule.weights[q] * g(x) * x;
        }
    }
    return inner + outer;
}

} // namespace

double truncated_moment(const Kernel& kernel, double range) {
    if (kernel.variant() == KernelVariant::Local)
        throw UnsupportedKernel("the local kernel has no pointwise values");
    const auto pos = [&](double x) { return kernel(x); };
    const auto neg = [&](double x) { return kernel(-x); };
    return half_line_moment(pos, range, kernel.order()) + half_line_moment(neg, range, kernel.order());
}

ValidationReport validate_kernel(const Kernel& kernel, int sample_count) {
    if (sample_count < 16) throw InvalidArgument("validate_kernel needs at least 16 samples");

    ValidationReport report;
    if (kernel.variant() == KernelVariant::Local) {
        for (const char* name : {"K1", "K2", "K3"}) {
            ConditionCheck c;
            c.name = name;
            c.applicable = false;
            c.pass = true;
            report.checks.push_back(c);
        }
        return report;
    }

    const double s = kernel.order();
    if (!(s > 0.0 && s < 1.0)) throw OrderOutOfRange(s);

    // Log-spaced magnitudes in [1e-6, 1e6].
    std::vector<double> xs(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i)
        xs[static_cast<std::size_t>(i)] = std::pow(10.0, -6.0 + 12.0 * i / (sample_count - 1));

    for (double x : xs) {
        for (double sx : {x, -x}) {
            const double kv = kernel(sx);
            if (!(kv > 0.0)) throw NonPositiveKernel(sx, kv);
        }
    }

    // (K1): finiteness and geometric convergence of the truncated moment.
    {
        ConditionCheck c;
        c.name = "K1";
        const std::vector<double> ranges = {1e1, 1e2, 1e3, 1e4};
        std::vector<double> values;
        for (double r : ranges) values.push_back(truncated_moment(kernel, r));
        bool finite = std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
        bool contracting = true;
        for (std::size_t i = 0; i + 2 < values.size(); ++i) {
            const double d0 = std::abs(values[i + 1] - values[i]);
            const double d1 = std::abs(values[i + 2] - values[i + 1]);
            if (!(d1 < (1.0 - 1e-3) * d0 || d1 <= 1e-14 * std::abs(values.back()))) contracting = false;
        }
        for (std::size_t i = 0; i < ranges.size(); ++i)
            c.witness.emplace_back("I(R=" + std::to_string(static_cast<long>(ranges[i])) + ")", values[i]);
        const double rel_last = std::abs(values[3] - values[2]) / std::abs(values[3]);
        c.witness.emplace_back("relative_change_1e3_1e4", rel_last);
        c.pass = finite && contracting;
        report.checks.push_back(c);
    }

    // (K2): K(x) |x|^(1+2s) >= lambda_K.
    {
        ConditionCheck c;
        c.name = "K2";
        double min_ratio = std::numeric_limits<double>::infinity();
        double at = 0.0;
        for (double x : xs) {
            for (double sx : {x, -x}) {
                const double r = kernel(sx) * std::pow(x, 1.0 + 2.0 * s);
                if (r < min_ratio) {
                    min_ratio = r;
                    at = sx;
                }
            }
        }
        c.witness.emplace_back("min_K_times_power", min_ratio);
        c.witness.emplace_back("lambda_K", kernel.lambda_K());
        c.witness.emplace_back("x", at);
        c.pass = min_ratio >= kernel.lambda_K() * (1.0 - 1e-12);
        report.checks.push_back(c);
    }

    // (K3): K(x) == K(-x).
    {
        ConditionCheck c;
        c.name = "K3";
        double max_diff = 0.0;
        double max_rel = 0.0;
        double at = 0.0;
        for (double x : xs) {
            const double kp = kernel(x);
            const double km = kernel(-x);
            const double d = std::abs(kp - km);
            if (d > max_diff) {
                max_diff = d;
                max_rel = d / std::max(std::abs(kp), std::abs(km));
                at = x;
            }
        }
        c.witness.emplace_back("max_abs_difference", max_diff);
        c.witness.emplace_back("relative_difference", max_rel);
        c.witness.emplace_back("x", at);
        c.pass = max_rel <= 1e-12;
        report.checks.push_back(c);
    }
    return report;
}

} // namespace fucik
