#pragma once

// Pressure- and saturation-dependent property tables and the liquid/rock state
// equations. All table lookups are piecewise linear and clamp to the end rows.

#include "fracflood/representative.hpp"
#include "fracflood/table.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fracflood {

enum class Axis { X = 0, Y = 1, Z = 2 };
enum class Phase { Oil, Water };

// ---------------------------------------------------------------------------
// Rock stress-sensitivity tables
// ---------------------------------------------------------------------------

struct RockRow {
    double pressure = 0.0; // MPa
    double pv_mult = 1.0;
    double tx_mult = 1.0;
    double ty_mult = 1.0;
    double tz_mult = 1.0;
    bool operator==(const RockRow&) const = default;
};

struct RockMultipliers {
    double pv = 1.0;
    double tx = 1.0;
    double ty = 1.0;
    double tz = 1.0;
};

struct MonotoneViolation {
    std::size_t row = 0;  // 1-based row where strict increase first fails
    std::string column;   // "pressure", "pv_mult", "tx_mult", "ty_mult" or "tz_mult"
};

/// First place where a pressure or multiplier column fails to strictly increase,
/// or where a multiplier is not positive. Never throws.
std::optional<MonotoneViolation> validate_monotone(std::span<const RockRow> rows);

class RockTable {
public:
    /// Throws ParameterError on fewer than two rows or any monotonicity violation.
    explicit RockTable(std::vector<RockRow> rows);

    const std::vector<RockRow>& rows() const noexcept { return rows_; }
    std::span<const double> pressures() const noexcept { return cols_[0]; }

    template <class T> T pv_mult(const T& p) const { return interpolate(cols_[0], cols_[1], p); }
    template <class T> T trans_mult(Axis axis, const T& p) const
    {
        return interpolate(cols_[0], cols_[2 + static_cast<int>(axis)], p);
    }

    bool operator==(const RockTable& o) const { return rows_ == o.rows_; }

private:
    std::vector<RockRow> rows_;
    std::array<std::vector<double>, 5> cols_;
};

struct RockTablePair {
    RockTable matrix;
    RockTable fracture;
    bool operator==(const RockTablePair&) const = default;
};

RockMultipliers interp_rock(const RockTable& table, double p);

/// Highest pressure node up to which the two tables agree row for row. For
/// tables generated from representative parameters this is the fracture
/// pressure point. Falls back to the fracture table's first node.
double shared_reference_pressure(const RockTablePair& pair);

// ---------------------------------------------------------------------------
// Oil formation volume factor
// ---------------------------------------------------------------------------

struct FvfRow {
    double pressure = 0.0;
    double fvf = 1.0;
    bool operator==(const FvfRow&) const = default;
};

class FvfTable {
public:
    /// Pressures strictly increasing, fvf positive and non-increasing with pressure.
    explicit FvfTable(std::vector<FvfRow> rows);

    const std::vector<FvfRow>& rows() const noexcept { return rows_; }
    template <class T> T at(const T& p) const { return interpolate(p_, b_, p); }

    FvfTable scaled(double factor) const;

    /// Default dead-oil curve: linear from 1.15 at p_min to 1.10 at p_max.
    static FvfTable linear_default(double p_min, double p_max);

    bool operator==(const FvfTable& o) const { return rows_ == o.rows_; }

private:
    std::vector<FvfRow> rows_;
    std::vector<double> p_, b_;
};

double fvf_at(const FvfTable& table, double p);

// ---------------------------------------------------------------------------
// Fluids
// ---------------------------------------------------------------------------

struct FluidSpec {
    double rho_o0 = 850.0;  // kg/m3 at p_ref
    double rho_w0 = 1000.0; // kg/m3 at p_ref
    double c_oil = 1e-3;    // 1/MPa, density law only (oil volume uses the FVF table)
    double c_water = 4.5e-5;
    double mu_o = 5.0;      // cP
    double mu_w = 0.5;      // cP
    double p_ref = 20.0;    // MPa

    /// Throws ParameterError naming the first non-positive field.
    void validate() const;
    bool operator==(const FluidSpec&) const = default;
};

/// rho = rho0 * (1 + C_l (p - p0)).
template <class T>
T liquid_density(const FluidSpec& f, Phase phase, const T& p)
{
    const double rho0 = phase == Phase::Oil ? f.rho_o0 : f.rho_w0;
    const double c = phase == Phase::Oil ? f.c_oil : f.c_water;
    return rho0 * (1.0 + c * (p - f.p_ref));
}

/// Reciprocal water FVF, 1/B_w = 1 + C_w (p - p0); linear so surface volumes
/// follow the same compressibility law as density.
template <class T>
T water_inv_fvf(const FluidSpec& f, const T& p)
{
    return 1.0 + f.c_water * (p - f.p_ref);
}

double water_fvf(const FluidSpec& f, double p);

// ---------------------------------------------------------------------------
// Relative permeability
// ---------------------------------------------------------------------------

struct RelPermRow {
    double sw = 0.0;
    double krw = 0.0;
    double kro = 1.0;
    double pcow = 0.0; // MPa
    bool operator==(const RelPermRow&) const = default;
};

struct RelPermPoint {
    double krw = 0.0;
    double kro = 0.0;
    double pcow = 0.0;
};

class RelPermTable {
public:
    /// sw strictly increasing in [0,1], krw non-decreasing from 0, kro
    /// non-increasing to 0, all relative permeabilities in [0,1].
    RelPermTable(std::vector<RelPermRow> rows, bool has_pcow);

    const std::vector<RelPermRow>& rows() const noexcept { return rows_; }
    bool has_pcow() const noexcept { return has_pcow_; }

    template <class T> T krw(const T& sw) const { return interpolate(sw_, krw_, sw); }
    template <class T> T kro(const T& sw) const { return interpolate(sw_, kro_, sw); }
    template <class T> T pcow(const T& sw) const { return interpolate(sw_, pc_, sw); }

    bool operator==(const RelPermTable& o) const
    {
        return rows_ == o.rows_ && has_pcow_ == o.has_pcow_;
    }

private:
    std::vector<RelPermRow> rows_;
    bool has_pcow_ = false;
    std::vector<double> sw_, krw_, kro_, pc_;
};

RelPermPoint relperm_at(const RelPermTable& table, double sw);

// ---------------------------------------------------------------------------
// Rock compaction
// ---------------------------------------------------------------------------

struct RockCompaction {
    double phi0 = 0.2;
    double c_f = 0.0;   // 1/MPa
    double p_ref = 0.0; // MPa
};

/// phi = phi0 + C_f (p - p0). Throws StateError if the result leaves (0,1).
double porosity_at(const RockCompaction& rc, double p);

// ---------------------------------------------------------------------------
// Tables from representative parameters
// ---------------------------------------------------------------------------

struct GeneratedTables {
    RockTablePair rock;
    FvfTable fvf;
    double c_water = 0.0;
};

/// Builds the three-node matrix/fracture multiplier tables at (p_min, p_b, p_max),
/// scales the baseline FVF curve by k_vo and passes c_w through. Throws
/// ParameterError naming the field when theta is outside the reference bounds or
/// p_b is not strictly inside (p_min, p_max).
GeneratedTables tables_from_representative(const RepresentativeParams& theta, double p_min,
                                           double p_max, const FvfTable& fvf_baseline);

} // namespace fracflood
