#pragma once

// Dimensionless radial dual-media well test: Laplace-space solution with
// wellbore storage and skin, inverted to the time domain with Stehfest's method.

#include <functional>
#include <span>
#include <vector>

namespace fracflood {

struct DimensionlessParams {
    double omega_f = 0.1; // fracture storage coefficient
    double omega_m = 0.9; // matrix storage, 1 - omega_f
    double lambda = 1e-5; // interporosity flow coefficient
    double kf0 = 1.0;     // fracture mobility fraction
    double km0 = 0.0;     // matrix mobility fraction, 1 - kf0; 0 means dual porosity
    double cd = 0.0;      // wellbore storage C_D
    double skin = 0.0;

    /// Fills omega_m and km0 from their complements.
    static DimensionlessParams make(double omega_f, double lambda, double km0 = 0.0,
                                    double cd = 0.0, double skin = 0.0);

    /// Throws ParameterError naming the field on any broken invariant.
    void validate() const;
};

/// Transform of the dimensionless wellbore pressure at real s > 0.
double laplace_pwd(double s, const DimensionlessParams& params);

/// Line-source well in a homogeneous reservoir, no storage or skin.
double laplace_homogeneous(double s);

/// Stehfest weights V_1..V_N for even N in [4, 20]. Throws ParameterError otherwise.
std::vector<double> stehfest_coefficients(int n_terms);

double stehfest_invert(const std::function<double(double)>& transform, double t, int n_terms = 12);

struct TypeCurvePoint {
    double t_d = 0.0;
    double p_wd = 0.0;
    double derivative = 0.0; // t_D dp_wD/dt_D
};

/// p_wD and its log-time derivative at each t_D (ascending, positive). The
/// derivative is a central difference in ln t_D with half-step 0.05.
std::vector<TypeCurvePoint> type_curve(const DimensionlessParams& params,
                                       std::span<const double> t_d, int n_terms = 12);

} // namespace fracflood
