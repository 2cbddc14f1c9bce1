#pragma once

// Self-contained numerical oracles for the test suite. Everything here is
// computed independently of the library under test: plain quadrature, closed
// forms, and boost.math special functions only.

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include <boost/math/distributions/normal.hpp>

namespace oracle {

inline double norm_pdf(double z) {
    static const boost::math::normal_distribution<double> n01;
    return boost::math::pdf(n01, z);
}
inline double norm_cdf(double z) {
    static const boost::math::normal_distribution<double> n01;
    return boost::math::cdf(n01, z);
}
inline double norm_quantile(double p) {
    static const boost::math::normal_distribution<double> n01;
    return boost::math::quantile(n01, p);
}

/// Composite Simpson's rule on [a,b] with 2k panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const int n = panels % 2 == 0 ? panels : panels + 1;
    const double h = (b - a) / n;
    double acc = f(a) + f(b);
    for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Gauss-Legendre 16-point rule mapped to [a,b]; smooth integrands converge
/// to near machine precision.
inline double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
    // Abscissae/weights for n=16 on [-1,1], symmetric halves.
    static const std::array<double, 8> x{0.0950125098376374, 0.2816035507792589,
                                         0.4580167776572274, 0.6178762444026438,
                                         0.7554044083550030, 0.8656312023878318,
                                         0.9445750230732326, 0.9894009349916499};
    static const std::array<double, 8> w{0.1894506104550685, 0.1826034150449236,
                                         0.1691565193950025, 0.1495959888165767,
                                         0.1246289712555339, 0.0951585116824928,
                                         0.0622535239386479, 0.0271524594117541};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        acc += w[i] * (f(mid + half * x[i]) + f(mid - half * x[i]));
    return acc * half;
}

/// P(U(b) - U(a) > t) for independent U(a), U(b) ~ Uniform(0,1): the
/// difference has the triangular law on [-1,1].
inline double triangular_tail(double t) {
    if (t <= -1.0) return 1.0;
    if (t >= 1.0) return 0.0;
    if (t >= 0.0) return 0.5 * (1.0 - t) * (1.0 - t);
    return 1.0 - 0.5 * (1.0 + t) * (1.0 + t);
}

/// Running example, m = 2, independent uniform opponent, equal weights:
/// alternative b wins iff v(b) - v(a) > U_j(a) - U_j(b), i.e. with
/// probability P(U_j(b) - U_j(a) > -(v(b) - v(a))) = triangular_tail(-(gap)).
inline double prob_b_wins_equal_weights(double v_a, double v_b) {
    return triangular_tail(-(v_b - v_a));
}

/// Bivariate gaussian copula density in closed form.
inline double copula2_density(double u, double v, double rho) {
    const double z1 = norm_quantile(u);
    const double z2 = norm_quantile(v);
    const double d = 1.0 - rho * rho;
    return std::exp(-(rho * rho * (z1 * z1 + z2 * z2) - 2.0 * rho * z1 * z2) / (2.0 * d)) /
           std::sqrt(d);
}

/// Criterion-3 oracle: n=2, m=2, uniform marginals, cross-agent correlation
/// rho on matching alternatives only (within-agent block = identity). Given
/// agent 0's type (u_a, u_b) the opponent's latent coordinates are
/// independent normals N(rho * z_x, 1 - rho^2). The weighted utilitarian rule
/// with equal weights picks b iff v_b - v_a > W_a - W_b where W_x =
/// Phi(latent_x). Returns P(select b | own type, report (v_a, v_b)).
inline double prob_b_wins_copula(double u_a, double u_b, double v_a, double v_b, double rho,
                                 int panels = 4000) {
    const double za = norm_quantile(u_a);
    const double zb = norm_quantile(u_b);
    const double mu_a = rho * za;
    const double mu_b = rho * zb;
    const double sd = std::sqrt(1.0 - rho * rho);
    const double gap = v_b - v_a;  // select b iff W_a - W_b < gap
    // Integrate over W_a = Phi(mu_a + sd * t): P(W_b > W_a - gap | W_a).
    auto inner = [&](double t) {
        const double wa = norm_cdf(mu_a + sd * t);
        const double threshold = wa - gap;
        double p;
        if (threshold <= 0.0)
            p = 1.0;
        else if (threshold >= 1.0)
            p = 0.0;
        else
            p = 1.0 - norm_cdf((norm_quantile(threshold) - mu_b) / sd);
        return p * norm_pdf(t);
    };
    return simpson(inner, -8.0, 8.0, panels);
}

/// Exact ex ante payoff of the equal-weight utilitarian rule with n=2, m=2
/// i.i.d. uniform coordinates: E[max(A, B)] where A, B are independent means
/// of two uniforms (Irwin-Hall / 2). Closed form 37/60.
inline constexpr double utilitarian_ex_ante_n2() { return 37.0 / 60.0; }

/// Same quantity for n=3 agents (means of three uniforms): computed once by
/// symbolic integration of the order statistic; kept as the exact rational.
inline constexpr double utilitarian_ex_ante_n3() { return 1499.0 / 2520.0; }

/// Plurality with n=3, m=2, i.i.d. uniform coordinates: the majority
/// alternative wins; a voter's payoff is its own max with probability 3/4
/// (votes with majority) and its own min with probability 1/4, so
/// (3/4) E[max(U,V)] + (1/4) E[min(U,V)] = (3/4)(2/3) + (1/4)(1/3) = 7/12.
inline constexpr double plurality_ex_ante_n3_m2() { return 7.0 / 12.0; }

/// Density of the mean of two independent uniforms at s in [0,1].
inline double mean2_uniform_pdf(double s) {
    if (s < 0.0 || s > 1.0) return 0.0;
    return s <= 0.5 ? 4.0 * s : 4.0 * (1.0 - s);
}

/// CDF of the mean of two independent uniforms.
inline double mean2_uniform_cdf(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    return s <= 0.5 ? 2.0 * s * s : 1.0 - 2.0 * (1.0 - s) * (1.0 - s);
}

}  // namespace oracle
