#ifndef JGCF_POLYBASIS_HPP
#define JGCF_POLYBASIS_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace jgcf {

enum class Basis { jacobi, chebyshev, legendre, monomial, bernstein };

inline Basis parse_basis(const std::string& s) {
    if (s == "jacobi") return Basis::jacobi;
    if (s == "chebyshev") return Basis::chebyshev;
    if (s == "legendre") return Basis::legendre;
    if (s == "monomial") return Basis::monomial;
    if (s == "bernstein") return Basis::bernstein;
    throw std::invalid_argument("unknown basis: " + s);
}

inline const char* basis_name(Basis b) {
    switch (b) {
        case Basis::jacobi: return "jacobi";
        case Basis::chebyshev: return "chebyshev";
        case Basis::legendre: return "legendre";
        case Basis::monomial: return "monomial";
        case Basis::bernstein: return "bernstein";
    }
    return "?";
}

inline constexpr int kMaxOrder = 16;

struct FilterParams {
    Basis basis = Basis::jacobi;
    int order = 3;                       // polynomial order K
    double a = 1.0;                      // Jacobi exponent, > -1
    double b = 1.0;                      // Jacobi exponent, > -1
    double alpha = 0.1;                  // band-pass coefficient
    std::vector<double> order_weights;   // empty -> uniform 1/(K+1)
    double discount = 1.0;               // per-order discount gamma in (0, 1]

    void validate() const {
        if (order < 0 || order > kMaxOrder)
            throw std::invalid_argument("order must be in [0, " + std::to_string(kMaxOrder) + "]");
        if (basis == Basis::jacobi && (a <= -1.0 || b <= -1.0))
            throw std::invalid_argument("jacobi exponents require a > -1 and b > -1");
        if (!order_weights.empty() &&
            order_weights.size() != static_cast<std::size_t>(order) + 1)
            throw std::invalid_argument("order_weights must have K+1 entries");
        if (discount <= 0.0 || discount > 1.0)
            throw std::invalid_argument("discount must lie in (0, 1]");
    }

    double weight(int k) const {
        return order_weights.empty() ? 1.0 / (order + 1) : order_weights[k];
    }

    bool uniform_weights() const {
        if (order_weights.empty()) return true;
        double w0 = order_weights[0];
        for (double w : order_weights)
            if (std::abs(w - w0) > 1e-15) return false;
        return true;
    }
};

struct JacobiCoeffs {
    double theta;         // multiplies x * P_{k-1}
    double theta_prime;   // multiplies P_{k-1}
    double theta_pprime;  // multiplies P_{k-2}
};

/// Three-term recurrence coefficients for P_k^{a,b}, k >= 2:
///   P_k = (theta*x + theta') P_{k-1} - theta'' P_{k-2}
inline JacobiCoeffs jacobi_coeffs(int k, double a, double b) {
    if (k < 2) throw std::invalid_argument("jacobi_coeffs defined for k >= 2");
    if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("require a > -1, b > -1");
    double s = a + b;
    double d1 = 2.0 * k * (k + s);
    double d2 = 2.0 * k + s - 2.0;
    if (std::abs(d1) < 1e-14 || std::abs(d2) < 1e-14)
        throw std::domain_error("jacobi recurrence denominator vanishes (a+b near -2)");
    JacobiCoeffs c;
    c.theta = (2.0 * k + s) * (2.0 * k + s - 1.0) / d1;
    c.theta_prime = (2.0 * k + s - 1.0) * (a * a - b * b) / (d1 * d2);
    c.theta_pprime = (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + s) / (k * (k + s) * d2);
    return c;
}

namespace detail {

inline double binom(int n, int k) {
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r *= static_cast<double>(n - k + j) / j;
    return r;
}

}  // namespace detail

/// Value of the k-th basis polynomial at x. For Bernstein the family is
/// indexed within a fixed top order K = params.order.
inline double eval_basis_scalar(const FilterParams& params, int k, double x) {
    if (k < 0 || k > params.order) throw std::invalid_argument("basis index out of range");
    switch (params.basis) {
        case Basis::monomial:
            return std::pow(x, k);
        case Basis::bernstein: {
            double t = 0.5 * (1.0 + x);
            return detail::binom(params.order, k) * std::pow(1.0 - t, params.order - k) *
                   std::pow(t, k);
        }
        case Basis::chebyshev: {
            if (k == 0) return 1.0;
            double pm2 = 1.0, pm1 = x;
            for (int q = 2; q <= k; ++q) {
                double p = 2.0 * x * pm1 - pm2;
                pm2 = pm1;
                pm1 = p;
            }
            return pm1;
        }
        case Basis::legendre: {
            if (k == 0) return 1.0;
            double pm2 = 1.0, pm1 = x;
            for (int q = 2; q <= k; ++q) {
                double p = ((2.0 * q - 1.0) * x * pm1 - (q - 1.0) * pm2) / q;
                pm2 = pm1;
                pm1 = p;
            }
            return pm1;
        }
        case Basis::jacobi: {
            if (k == 0) return 1.0;
            double pm2 = 1.0;
            double pm1 = 0.5 * (params.a - params.b) + 0.5 * (params.a + params.b + 2.0) * x;
            for (int q = 2; q <= k; ++q) {
                auto c = jacobi_coeffs(q, params.a, params.b);
                double p = (c.theta * x + c.theta_prime) * pm1 - c.theta_pprime * pm2;
                pm2 = pm1;
                pm1 = p;
            }
            return pm1;
        }
    }
    throw std::logic_error("unreachable");
}

/// Scalar band-stop response g_K(x) = sum_k w_k gamma^k P_k(x).
inline double band_stop_response(const FilterParams& params, double x) {
    double g = 0.0;
    double disc = 1.0;
    for (int k = 0; k <= params.order; ++k) {
        g += params.weight(k) * disc * eval_basis_scalar(params, k, x);
        disc *= params.discount;
    }
    return g;
}

enum class ResponseMode { band_stop, band_pass };

/// Response curve over a grid of eigenvalue points. Monomial band-stop curves
/// are normalized to their value at x = 1 (ratio to the maximum).
inline std::vector<std::pair<double, double>> filter_response(
    const FilterParams& params, ResponseMode mode, const std::vector<double>& grid) {
    params.validate();
    std::vector<std::pair<double, double>> out;
    out.reserve(grid.size());
    double norm = 1.0;
    if (mode == ResponseMode::band_stop && params.basis == Basis::monomial)
        norm = band_stop_response(params, 1.0);
    for (double x : grid) {
        if (x < -1.0 - 1e-12 || x > 1.0 + 1e-12)
            throw std::invalid_argument("response grid point outside [-1, 1]");
        double g = band_stop_response(params, x);
        double r = (mode == ResponseMode::band_stop) ? g / norm : std::tanh(params.alpha - g);
        out.emplace_back(x, r);
    }
    return out;
}

}  // namespace jgcf

#endif
