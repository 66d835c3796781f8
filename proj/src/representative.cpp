#include "fracflood/representative.hpp"

#include "fracflood/error.hpp"

#include <cmath>
#include <string>

namespace fracflood {

std::array<double, kRepresentativeDim> to_array(const RepresentativeParams& t)
{
    return {t.c_w,       t.k_vo,      t.p_b,       t.lambda_mmin, t.d_lambda1, t.d_lambda2,
            t.psi_xmmin, t.d_psi_xm1, t.d_psi_xm2, t.psi_xfmax,   t.k_xy};
}

RepresentativeParams from_array(const std::array<double, kRepresentativeDim>& v)
{
    RepresentativeParams t;
    t.c_w = v[0];
    t.k_vo = v[1];
    t.p_b = v[2];
    t.lambda_mmin = v[3];
    t.d_lambda1 = v[4];
    t.d_lambda2 = v[5];
    t.psi_xmmin = v[6];
    t.d_psi_xm1 = v[7];
    t.d_psi_xm2 = v[8];
    t.psi_xfmax = v[9];
    t.k_xy = v[10];
    return t;
}

ParamBounds ParamBounds::defaults(double p_min, double p_max)
{
    ParamBounds b;
    b.box = {Interval{1e-6, 1e-4}, Interval{0.8, 1.5},    Interval{p_min, p_max},
             Interval{0.9, 0.99},  Interval{0.001, 0.05}, Interval{0.001, 0.05},
             Interval{0.9, 0.99},  Interval{0.001, 0.05}, Interval{0.001, 0.05},
             Interval{100.0, 2000.0}, Interval{0.1, 0.6}};
    return b;
}

void check_bounds(const RepresentativeParams& theta, const ParamBounds& bounds)
{
    const auto v = to_array(theta);
    for (std::size_t i = 0; i < kRepresentativeDim; ++i) {
        const auto& iv = bounds.box[i];
        if (!std::isfinite(v[i]) || v[i] < iv.lower || v[i] > iv.upper) {
            throw ParameterError(std::string(kRepresentativeNames[i]),
                                 "value " + std::to_string(v[i]) + " outside [" +
                                     std::to_string(iv.lower) + ", " + std::to_string(iv.upper) +
                                     "]");
        }
    }
}

void check_valid(const ParamBounds& bounds)
{
    for (std::size_t i = 0; i < kRepresentativeDim; ++i) {
        const auto& iv = bounds.box[i];
        if (!(iv.lower < iv.upper))
            throw ConfigError("bounds for " + std::string(kRepresentativeNames[i]) +
                              " need lower < upper");
    }
}

std::size_t representative_index(std::string_view name)
{
    for (std::size_t i = 0; i < kRepresentativeDim; ++i)
        if (kRepresentativeNames[i] == name) return i;
    throw ParameterError(std::string(name), "unknown representative parameter");
}

} // namespace fracflood
