#pragma once

#include <array>
#include <cmath>
#include <numbers>

namespace fucik {

template <std::size_t N>
struct GaussRule {
    std::array<double, N> nodes{};
    std::array<double, N> weights{};
};

/// N-point Gauss-Legendre rule on [-1, 1] (nodes by Newton iteration on P_N).
template <std::size_t N>
const GaussRule<N>& gauss_legendre() {
    static const GaussRule<N> rule = [] {
        GaussRule<N> r;
        for (std::size_t i = 0; i < N; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (N + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (std::size_t n = 2; n <= N; ++n) {
                    const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
                    p0 = p1;
                    p1 = p2;
                }
                dp = N * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            r.nodes[i] = x;
            r.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

} // namespace fucik
