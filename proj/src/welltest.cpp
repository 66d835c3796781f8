#include "fracflood/welltest.hpp"

#include "fracflood/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>

namespace fracflood {

namespace {

/// K1(x)/K0(x); large arguments use the asymptotic expansions, whose
/// exponential factors cancel.
double bessel_ratio(double x)
{
    if (x < 500.0) return std::cyl_bessel_k(1.0, x) / std::cyl_bessel_k(0.0, x);
    auto series = [x](double nu) {
        const double mu = 4.0 * nu * nu;
        double term = 1.0, sum = 1.0;
        for (int k = 1; k <= 8; ++k) {
            const double odd = 2.0 * k - 1.0;
            term *= (mu - odd * odd) / (k * 8.0 * x);
            sum += term;
        }
        return sum;
    };
    return series(1.0) / series(0.0);
}

double wellbore(double p_bar, double s, double cd, double skin)
{
    const double a = s * p_bar + skin;
    return a / (s * (1.0 + cd * s * a));
}

double dual_porosity(double s, const DimensionlessParams& q)
{
    const double om = 1.0 - q.omega_f;
    const double f = (q.omega_f * om * s + q.lambda) / (om * s + q.lambda);
    const double x = std::sqrt(s * f);
    const double p = 1.0 / (s * x * bessel_ratio(x));
    return wellbore(p, s, q.cd, q.skin);
}

double dual_permeability(double s, const DimensionlessParams& q)
{
    const double m11 = (q.omega_f * s + q.lambda) / q.kf0;
    const double m12 = -q.lambda / q.kf0;
    const double m21 = -q.lambda / q.km0;
    const double m22 = (q.omega_m * s + q.lambda) / q.km0;
    const double tr = m11 + m22;
    const double det = m11 * m22 - m12 * m21;
    const double disc = std::sqrt((m11 - m22) * (m11 - m22) + 4.0 * m12 * m21);
    const double big = 0.5 * (tr + disc);
    const double small = det / big;
    if (!(small > 0.0) || !std::isfinite(big))
        throw ParameterError("lambda", "eigen decomposition produced a non-positive mode");

    Eigen::Matrix3d a;
    Eigen::Vector3d b(0.0, 0.0, 1.0 / s);
    a.setZero();
    a(0, 0) = 1.0;
    a(1, 0) = 1.0;
    a(2, 0) = q.cd * s;
    const double sig[2] = {small, big};
    for (int j = 0; j < 2; ++j) {
        // Eigenvector from whichever row of (M - sigma I) is better conditioned.
        double vf = -m12, vm = m11 - sig[j];
        const double wf = m22 - sig[j], wm = -m21;
        if (std::hypot(wf, wm) > std::hypot(vf, vm)) {
            vf = wf;
            vm = wm;
        }
        const double norm = std::hypot(vf, vm);
        vf /= norm;
        vm /= norm;
        const double rj = std::sqrt(sig[j]) * bessel_ratio(std::sqrt(sig[j]));
        a(0, 1 + j) = -vf * (1.0 + q.skin * rj);
        a(1, 1 + j) = -vm * (1.0 + q.skin * rj);
        a(2, 1 + j) = (q.kf0 * vf + q.km0 * vm) * rj;
    }
    const Eigen::Vector3d x = a.fullPivLu().solve(b);
    if (!x.allFinite()) throw ParameterError("lambda", "degenerate dual-permeability system");
    return x[0];
}

} // namespace

DimensionlessParams DimensionlessParams::make(double omega_f, double lambda, double km0,
                                              double cd, double skin)
{
    DimensionlessParams p;
    p.omega_f = omega_f;
    p.omega_m = 1.0 - omega_f;
    p.lambda = lambda;
    p.km0 = km0;
    p.kf0 = 1.0 - km0;
    p.cd = cd;
    p.skin = skin;
    p.validate();
    return p;
}

void DimensionlessParams::validate() const
{
    auto in_open_closed = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_open_closed(omega_f)) throw ParameterError("omega_f", "must lie in (0,1]");
    if (!in_open_closed(omega_m)) throw ParameterError("omega_m", "must lie in (0,1]");
    if (std::abs(omega_f + omega_m - 1.0) > 1e-12)
        throw ParameterError("omega_m", "omega_f + omega_m must equal 1");
    if (!in_open_closed(kf0)) throw ParameterError("kf0", "must lie in (0,1]");
    if (!(km0 >= 0.0 && km0 < 1.0)) throw ParameterError("km0", "must lie in [0,1)");
    if (std::abs(kf0 + km0 - 1.0) > 1e-12) throw ParameterError("km0", "kf0 + km0 must equal 1");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("lambda", "must be positive");
    if (!(cd >= 0.0)) throw ParameterError("cd", "must be non-negative");
    if (!std::isfinite(skin)) throw ParameterError("skin", "must be finite");
}

double laplace_homogeneous(double s)
{
    const double x = std::sqrt(s);
    return 1.0 / (s * x * bessel_ratio(x));
}

double laplace_pwd(double s, const DimensionlessParams& params)
{
    if (!(s > 0.0)) throw ParameterError("s", "Laplace variable must be positive");
    if (params.km0 == 0.0) return dual_porosity(s, params);
    return dual_permeability(s, params);
}

namespace {

// Weights in extended precision; they alternate in sign and reach ~1e10 at N = 20.
std::vector<long double> stehfest_weights(int n)
{
    if (n < 4 || n > 20 || n % 2 != 0)
        throw ParameterError("n_terms", "must be even and within [4, 20], got " + std::to_string(n));
    auto fact = [](int k) {
        long double f = 1.0L;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    const int half = n / 2;
    std::vector<long double> v(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        long double sum = 0.0L;
        for (int k = (i + 1) / 2; k <= std::min(i, half); ++k) {
            sum += std::pow(static_cast<long double>(k), half) * fact(2 * k) /
                   (fact(half - k) * fact(k) * fact(k - 1) * fact(i - k) * fact(2 * k - i));
        }
        const long double sign = ((half + i) % 2 == 0) ? 1.0L : -1.0L;
        v[static_cast<std::size_t>(i - 1)] = sign * sum;
    }
    return v;
}

} // namespace

std::vector<double> stehfest_coefficients(int n)
{
    const auto w = stehfest_weights(n);
    return {w.begin(), w.end()};
}

double stehfest_invert(const std::function<double(double)>& transform, double t, int n_terms)
{
    if (!(t > 0.0)) throw ParameterError("t", "must be positive");
    const auto v = stehfest_weights(n_terms);
    const long double a = std::numbers::ln2_v<long double> / t;
    long double sum = 0.0L;
    for (int i = 1; i <= n_terms; ++i)
        sum += v[static_cast<std::size_t>(i - 1)] * transform(static_cast<double>(i * a));
    return static_cast<double>(a * sum);
}

std::vector<TypeCurvePoint> type_curve(const DimensionlessParams& params,
                                       std::span<const double> t_d, int n_terms)
{
    params.validate();
    const auto f = [&params](double s) { return laplace_pwd(s, params); };
    constexpr double h = 0.05;
    std::vector<TypeCurvePoint> out;
    out.reserve(t_d.size());
    double prev = 0.0;
    for (double t : t_d) {
        if (!(t > 0.0)) throw ParameterError("t_d", "times must be positive");
        if (t <= prev) throw ParameterError("t_d", "times must be ascending");
        prev = t;
        const double p = stehfest_invert(f, t, n_terms);
        const double up = stehfest_invert(f, t * std::exp(h), n_terms);
        const double dn = stehfest_invert(f, t * std::exp(-h), n_terms);
        out.push_back({t, p, (up - dn) / (2.0 * h)});
    }
    return out;
}

} // namespace fracflood
