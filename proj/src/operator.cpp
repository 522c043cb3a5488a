#include "fucik/operator.hpp"

#include "fucik/errors.hpp"
#include "fucik/gauss.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace fucik {

Mesh1D::Mesh1D(double a, double b, int n_elements) : a_(a), b_(b), n_(n_elements) {
    if (!(std::isfinite(a) && std::isfinite(b) && a < b))
        throw InvalidArgument("mesh interval must satisfy a < b");
    if (n_elements < 1) throw InvalidArgument("mesh needs at least one element");
}

Eigen::VectorXd Mesh1D::interior_nodes() const {
    Eigen::VectorXd x(interior_dim());
    for (int i = 1; i < n_; ++i) x(i - 1) = node(i);
    return x;
}

GalerkinOperator::GalerkinOperator(Kernel kernel, Mesh1D mesh, Eigen::MatrixXd stiffness,
                                   Eigen::MatrixXd mass)
    : kernel_(std::move(kernel)), mesh_(mesh), stiffness_(std::move(stiffness)), mass_(std::move(mass)) {
    if (stiffness_.rows() != mesh_.interior_dim() || stiffness_.cols() != mesh_.interior_dim())
        throw DimensionMismatch(mesh_.interior_dim(), stiffness_.rows());
    if (mass_.rows() != stiffness_.rows() || mass_.cols() != stiffness_.cols())
        throw DimensionMismatch(stiffness_.rows(), mass_.rows());
}

namespace detail {

namespace {

// int_1^2 z^e dz, stable through e = -1.
double power_integral_1_2(double e) {
    const double c = (e + 1.0) * std::numbers::ln2;
    if (std::abs(c) < 1e-8) return std::numbers::ln2 * (1.0 + 0.5 * c);
    return std::expm1(c) / (e + 1.0);
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double beta_int(int a, int b) {
    // B(a+1, b+1) = a! b! / (a+b+1)!
    double r = 1.0;
    for (int i = 1; i <= a; ++i) r *= i;
    for (int i = 1; i <= b; ++i) r *= i;
    for (int i = 1; i <= a + b + 1; ++i) r /= i;
    return r;
}

// int_0^1 r^n (2 - r)^gamma dr for integer n >= 0.
double shifted_radial(int n, double gamma) {
    double sum = 0.0;
    for (int l = 0; l <= n; ++l) {
        const double sign = (l % 2 == 0) ? 1.0 : -1.0;
        sum += binomial(n, l) * std::pow(2.0, n - l) * sign * power_integral_1_2(gamma + l);
    }
    return sum;
}

} // namespace

double square_moment(int a, int b, double gamma) {
    if (a + b + gamma + 2.0 <= 0.0) throw InvalidArgument("square_moment diverges");
    // Triangle p + q <= 1 in polar-like coordinates p = r t, q = r (1 - t).
    double total = beta_int(a, b) / (a + b + gamma + 2.0);
    // Triangle p + q > 1, reflected through (1, 1).
    for (int i = 0; i <= a; ++i) {
        for (int j = 0; j <= b; ++j) {
            const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
            total += binomial(a, i) * binomial(b, j) * sign * beta_int(i, j) * shifted_radial(i + j + 1, gamma);
        }
    }
    return total;
}

Eigen::MatrixXd element_pair_matrix(double s, int offset) {
    const double gamma = -1.0 - 2.0 * s;
    if (offset == 0) {
        const double c = 2.0 / ((gamma + 3.0) * (gamma + 4.0));
        Eigen::MatrixXd m(2, 2);
        m << c, -c, -c, c;
        return m;
    }
    if (offset == 1) {
        const double i20 = square_moment(2, 0, gamma);
        const double i11 = square_moment(1, 1, gamma);
        const Eigen::Vector3d a(1.0, -1.0, 0.0);
        const Eigen::Vector3d b(0.0, -1.0, 1.0);
        Eigen::MatrixXd m = i20 * (a * a.transpose() + b * b.transpose()) -
                            i11 * (a * b.transpose() + b * a.transpose());
        return 2.0 * m;
    }
    const auto& rule = gauss_legendre<8>();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(4, 4);
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double xi = 0.5 * (rule.nodes[i] + 1.0);
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
            const double eta = 0.5 * (rule.nodes[j] + 1.0);
            const double w = 0.25 * rule.weights[i] * rule.weights[j] *
                             std::pow(offset + eta - xi, gamma);
            const Eigen::Vector4d psi(1.0 - xi, xi, -(1.0 - eta), -eta);
            m.noalias() += w * psi * psi.transpose();
        }
    }
    return 2.0 * m;
}

Eigen::Matrix2d exterior_matrix(double s, int m) {
    const double e = -2.0 * s;
    // moments[j] = int_0^1 t^j (m + t)^e dt
    std::array<double, 3> moments{};
    if (m == 0) {
        for (int j = 0; j < 3; ++j) moments[j] = 1.0 / (j + 1.0 + e);
    } else if (m == 1) {
        for (int j = 0; j < 3; ++j) {
            double sum = 0.0;
            for (int l = 0; l <= j; ++l) {
                const double sign = ((j - l) % 2 == 0) ? 1.0 : -1.0;
                sum += binomial(j, l) * sign * power_integral_1_2(e + l);
            }
            moments[j] = sum;
        }
    } else {
        const auto& rule = gauss_legendre<8>();
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double t = 0.5 * (rule.nodes[q] + 1.0);
            const double w = 0.5 * rule.weights[q] * std::pow(m + t, e);
            moments[0] += w;
            moments[1] += w * t;
            moments[2] += w * t * t;
        }
    }
    Eigen::Matrix2d out;
    // N0 = 1 - t, N1 = t
    out(0, 0) = moments[0] - 2.0 * moments[1] + moments[2];
    out(0, 1) = moments[1] - moments[2];
    out(1, 0) = out(0, 1);
    out(1, 1) = moments[2];
    return out / s;
}

} // namespace detail

namespace {

Eigen::MatrixXd mass_matrix(const Mesh1D& mesh) {
    const int n = mesh.interior_dim();
    const double h = mesh.h();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 4.0 * h / 6.0;
        if (i + 1 < n) {
            m(i, i + 1) = h / 6.0;
            m(i + 1, i) = h / 6.0;
        }
    }
    return m;
}

Eigen::MatrixXd local_stiffness(const Mesh1D& mesh) {
    const int n = mesh.interior_dim();
    const double h = mesh.h();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        a(i, i) = 2.0 / h;
        if (i + 1 < n) {
            a(i, i + 1) = -1.0 / h;
            a(i + 1, i) = -1.0 / h;
        }
    }
    return a;
}

Eigen::MatrixXd fractional_stiffness(const Kernel& kernel, const Mesh1D& mesh) {
    const int n_el = mesh.n_elements();
    const int dim = mesh.interior_dim();
    const double s = kernel.order();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(dim, dim);

    // Node i (0..n_el) -> unknown index i-1, or -1 for the pinned end nodes.
    const auto dof = [n_el](int node) { return (node >= 1 && node < n_el) ? node - 1 : -1; };
    const auto scatter = [&](const Eigen::MatrixXd& local, const std::vector<int>& nodes) {
        for (std::size_t r = 0; r < nodes.size(); ++r) {
            const int gr = dof(nodes[r]);
            if (gr < 0) continue;
            for (std::size_t c = 0; c < nodes.size(); ++c) {
                const int gc = dof(nodes[c]);
                if (gc < gr) continue;
                a(gr, gc) += local(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
            }
        }
    };

    std::vector<Eigen::MatrixXd> pair_tables(static_cast<std::size_t>(n_el));
    for (int d = 0; d < n_el; ++d) pair_tables[static_cast<std::size_t>(d)] = detail::element_pair_matrix(s, d);

    for (int e1 = 0; e1 < n_el; ++e1) {
        scatter(pair_tables[0], {e1, e1 + 1});
        if (e1 + 1 < n_el) scatter(pair_tables[1], {e1, e1 + 1, e1 + 2});
        for (int e2 = e1 + 2; e2 < n_el; ++e2)
            scatter(pair_tables[static_cast<std::size_t>(e2 - e1)], {e1, e1 + 1, e2, e2 + 1});
    }

    // Interaction with the exterior on both sides of the interval.
    for (int e = 0; e < n_el; ++e) {
        const Eigen::Matrix2d left = detail::exterior_matrix(s, e);
        Eigen::Matrix2d right = detail::exterior_matrix(s, n_el - 1 - e);
        std::swap(right(0, 0), right(1, 1));
        scatter(left + right, {e, e + 1});
    }

    a = a.selfadjointView<Eigen::Upper>();
    return kernel.scale() * std::pow(mesh.h(), 1.0 - 2.0 * s) * a;
}

} // namespace

GalerkinOperator assemble(const Kernel& kernel, const Mesh1D& mesh) {
    if (mesh.interior_dim() < 3) throw MeshTooCoarse(mesh.interior_dim());
    switch (kernel.variant()) {
    case KernelVariant::Local:
        return GalerkinOperator(kernel, mesh, kernel.scale() * local_stiffness(mesh), mass_matrix(mesh));
    case KernelVariant::Fractional:
        return GalerkinOperator(kernel, mesh, fractional_stiffness(kernel, mesh), mass_matrix(mesh));
    case KernelVariant::Tabulated:
        break;
    }
    throw UnsupportedKernel("tabulated kernels can be validated but not assembled");
}

} // namespace fucik
