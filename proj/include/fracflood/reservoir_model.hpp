#pragma once

// Dual-continuum grid, static cell properties, wells, staged schedule and the
// deck that ties them together. Cell numbering: matrix cells occupy [0, N),
// their fracture partners [N, 2N), where N = nx*ny*nz geometric cells.

#include "fracflood/property_model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fracflood {

/// Darcy unit constant for mD, m, MPa, cP and m3/d.
inline constexpr double kDarcyUnit = 0.08527;
inline constexpr double kGravity = 9.80665; // m/s2

struct Spacing {
    std::vector<double> dx, dy, dz; // each of size 1 (uniform) or N
};

class Grid {
public:
    Grid(int nx, int ny, int nz, std::vector<double> dx, std::vector<double> dy,
         std::vector<double> dz, std::vector<double> depth);

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    int nz() const noexcept { return nz_; }
    std::size_t geo_cells() const noexcept { return n_; }
    std::size_t cells() const noexcept { return 2 * n_; }

    /// Geometric index of (i, j, k), all 0-based.
    std::size_t index(int i, int j, int k) const noexcept
    {
        return static_cast<std::size_t>(i) +
               static_cast<std::size_t>(nx_) *
                   (static_cast<std::size_t>(j) + static_cast<std::size_t>(ny_) * k);
    }
    std::array<int, 3> ijk(std::size_t cell) const noexcept;

    bool is_fracture(std::size_t cell) const noexcept { return cell >= n_; }
    std::size_t geo(std::size_t cell) const noexcept { return cell % n_; }
    /// Matrix cell c pairs with fracture cell N + c and vice versa.
    std::size_t partner(std::size_t cell) const noexcept { return cell < n_ ? cell + n_ : cell - n_; }
    /// 1 for the matrix zone, 2 for the fracture zone.
    int region(std::size_t cell) const noexcept { return is_fracture(cell) ? 2 : 1; }

    double dx(std::size_t cell) const noexcept { return dx_[geo(cell)]; }
    double dy(std::size_t cell) const noexcept { return dy_[geo(cell)]; }
    double dz(std::size_t cell) const noexcept { return dz_[geo(cell)]; }
    double depth(std::size_t cell) const noexcept { return depth_[geo(cell)]; }
    double volume(std::size_t cell) const noexcept { return dx(cell) * dy(cell) * dz(cell); }

    const std::vector<double>& dx_values() const noexcept { return dx_; }
    const std::vector<double>& dy_values() const noexcept { return dy_; }
    const std::vector<double>& dz_values() const noexcept { return dz_; }
    const std::vector<double>& depth_values() const noexcept { return depth_; }

    bool operator==(const Grid&) const = default;

private:
    int nx_, ny_, nz_;
    std::size_t n_;
    std::vector<double> dx_, dy_, dz_, depth_;
};

/// Builds the doubled grid. Spacing and depth vectors may hold one value
/// (uniform) or one per geometric cell. Throws ParameterError on bad sizes.
Grid build_dual_grid(int nx, int ny, int nz, const Spacing& spacing,
                     const std::vector<double>& depths);

/// Cell-centre depths for a layered grid whose first layer top sits at `top`.
std::vector<double> depths_from_top(double top, int nx, int ny, int nz,
                                    const std::vector<double>& dz);

/// Per geometric cell; both continua start with these values.
struct CellProps {
    std::vector<double> permx, permy, permz; // mD
    std::vector<double> poro;
    std::vector<double> ntg;
    bool operator==(const CellProps&) const = default;
};

enum class WellKind { Injector, Producer };

struct WellSpec {
    std::string name;
    WellKind kind = WellKind::Producer;
    int i = 0, j = 0, k = 0; // 0-based location
    double rw = 0.1;         // m
    double skin = 0.0;
    bool operator==(const WellSpec&) const = default;
};

struct WellControl {
    enum class Mode { Shut, Rate, Bhp };
    Mode mode = Mode::Shut;
    /// Rate mode: surface rate target (water for injectors, liquid for producers), m3/d.
    /// Bhp mode: bottom-hole pressure target, MPa.
    double target = 0.0;
    /// Rate mode only: maximum BHP for injectors, minimum for producers.
    double bhp_limit = 0.0;
    bool operator==(const WellControl&) const = default;
};

struct Stage {
    std::string name; // injection | soak | production | any custom label
    double duration = 0.0; // days
    std::vector<std::pair<std::string, WellControl>> controls; // unlisted wells are shut

    WellControl control_for(const std::string& well) const;
    bool operator==(const Stage&) const = default;
};

struct InitSpec {
    double pressure = 20.0;              // MPa at datum
    std::optional<double> datum_depth;   // gravity equilibration when set
    double sw = 0.2;
    bool operator==(const InitSpec&) const = default;
};

struct NumericsConfig {
    double newton_tol = 1e-4;   // max |residual| / pore volume, per cell
    double mb_tol = 1e-8;       // |sum of residuals| / total pore volume, per phase
    int max_newton = 15;
    double dt_init = 0.05;      // days
    double dt_max = 5.0;
    double dt_min = 1e-6;
    double dt_growth = 2.0;
    double dt_chop = 0.5;
    double report_interval = 5.0;
    double dp_max = 5.0;        // MPa per Newton update
    double ds_max = 0.2;        // saturation per Newton update
    double extent_threshold = 10.0;
    double tmult_hysteresis = 0.0; // retained fraction of peak multiplier on unloading

    /// Throws ParameterError naming the offending field.
    void validate() const;
    bool operator==(const NumericsConfig&) const = default;
};

struct RepresentativeSpec {
    RepresentativeParams theta;
    double p_min = 0.0;
    double p_max = 0.0;
    bool operator==(const RepresentativeSpec&) const = default;
};

struct Deck {
    Grid grid;
    CellProps props;
    FluidSpec fluid;
    RelPermTable relperm;
    std::optional<RockTablePair> rock;
    std::optional<RepresentativeSpec> representative;
    std::optional<FvfTable> fvf;
    std::vector<WellSpec> wells;
    std::vector<Stage> schedule;
    InitSpec init;
    NumericsConfig numerics;

    bool operator==(const Deck&) const = default;

    /// Index of the named well; throws ParameterError if absent.
    std::size_t well_index(const std::string& name) const;
};

/// Cross-section checks shared by the parser and by programmatic construction:
/// array sizes, well locations and unique names, stage invariants, presence of
/// rock tables (explicit or representative). Throws DeckError.
void validate_deck(const Deck& deck);

/// Default characteristic pressure range: initial pressure minus 5 MPa up to
/// the largest injector BHP bound plus 2 MPa.
std::pair<double, double> default_pressure_range(const Deck& deck);

/// Deck with explicit rock tables, FVF table and water compressibility, either
/// copied through or generated from the REPRESENTATIVE section.
struct ResolvedTables {
    RockTablePair rock;
    FvfTable fvf;
    double c_water;
};
ResolvedTables resolve_tables(const Deck& deck);

// ---------------------------------------------------------------------------
// State
// ---------------------------------------------------------------------------

struct SimState {
    std::vector<double> p;      // oil-phase pressure per cell, MPa
    std::vector<double> sw;     // water saturation per cell
    std::vector<double> p_peak; // highest accepted pressure per cell
    std::vector<double> bhp;    // per well, MPa
    double time = 0.0;          // days

    bool operator==(const SimState&) const = default;
};

/// Equivalent-zone initial state: both continua identical, uniform Sw, and
/// either uniform pressure or hydrostatic about the datum depth.
SimState init_state(const Deck& deck);

/// Peaceman well index for a rectangular cell with anisotropic permeability,
/// in m3/(d MPa) per unit mobility (1/cP). Throws ParameterError when the
/// equivalent radius does not exceed rw.
double peaceman_wi(double dx, double dy, double dz, double kx, double ky, double rw, double skin);

/// Peaceman equivalent radius (m).
double peaceman_radius(double dx, double dy, double kx, double ky);

} // namespace fracflood
