#pragma once

// The 11-entry representative parameter vector from which the rock multiplier
// tables, the scaled oil FVF curve and the water compressibility are generated.

#include <array>
#include <cstddef>
#include <string_view>

namespace fracflood {

struct RepresentativeParams {
    double c_w = 1e-5;          // water compressibility, 1/MPa
    double k_vo = 1.0;          // oil FVF curve multiplier
    double p_b = 0.0;           // fracture pressure point, MPa
    double lambda_mmin = 0.95;  // pore-volume multiplier at p_min
    double d_lambda1 = 0.01;    // pv increment p_min -> p_b
    double d_lambda2 = 0.01;    // pv increment p_b -> p_max
    double psi_xmmin = 0.95;    // matrix X transmissibility multiplier at p_min
    double d_psi_xm1 = 0.01;
    double d_psi_xm2 = 0.01;
    double psi_xfmax = 500.0;   // fracture X transmissibility multiplier at p_max
    double k_xy = 0.5;          // anisotropy: Y (and Z) over X at p_max

    bool operator==(const RepresentativeParams&) const = default;
};

inline constexpr std::size_t kRepresentativeDim = 11;

inline constexpr std::array<std::string_view, kRepresentativeDim> kRepresentativeNames = {
    "c_w",       "k_vo",      "p_b",       "lambda_mmin", "d_lambda1", "d_lambda2",
    "psi_xmmin", "d_psi_xm1", "d_psi_xm2", "psi_xfmax",   "k_xy"};

std::array<double, kRepresentativeDim> to_array(const RepresentativeParams& theta);
RepresentativeParams from_array(const std::array<double, kRepresentativeDim>& values);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
    bool operator==(const Interval&) const = default;
};

/// Box constraints on the representative vector, indexed like kRepresentativeNames.
struct ParamBounds {
    std::array<Interval, kRepresentativeDim> box{};

    /// Reference ranges for low-permeability fracturing-flooding blocks; the
    /// fracture pressure point spans [p_min, p_max].
    static ParamBounds defaults(double p_min, double p_max);

    bool operator==(const ParamBounds&) const = default;
};

/// Throws ParameterError naming the first field outside `bounds` (or non-finite).
void check_bounds(const RepresentativeParams& theta, const ParamBounds& bounds);

/// Throws ConfigError unless every interval has lower < upper.
void check_valid(const ParamBounds& bounds);

/// Index of a named field; throws ParameterError for unknown names.
std::size_t representative_index(std::string_view name);

} // namespace fracflood
