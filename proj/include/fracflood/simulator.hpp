#pragma once

// Fully implicit two-phase (oil/water) dual-permeability finite-volume solver.
//
// Unknowns per cell: oil pressure p (MPa) and water saturation sw; one BHP
// unknown per well. Each half-transmissibility carries its own cell's
// directional multiplier from the matrix or fracture rock table evaluated at
// that cell's pressure. Conservation is written in surface volumes (m3) over
// a backward-Euler step and solved by Newton with a direct sparse solve.

#include "fracflood/reservoir_model.hpp"

#include <Eigen/Sparse>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fracflood {

enum class Quantity { Bhp, Wir, Lpr, Opr, Wpr, Wct, Dx, Dy };

struct WellReport {
    double bhp = 0.0; // MPa
    double wir = 0.0; // water injection, surface m3/d
    double lpr = 0.0; // liquid production, surface m3/d
    double opr = 0.0;
    double wpr = 0.0;
    double wct = 0.0; // wpr / lpr, 0 when not producing
    double dx = 0.0;  // fracture extent along X, m (injectors)
    double dy = 0.0;
    double get(Quantity q) const;
};

struct ReportRow {
    double time = 0.0;
    std::vector<WellReport> wells;
    double field_avg_p = 0.0;   // pore-volume weighted, MPa
    double field_p_coeff = 0.0; // field_avg_p / hydrostatic pressure at mean depth
};

struct TimeSeries {
    std::vector<std::string> well_names;
    std::vector<WellKind> well_kinds;
    std::vector<ReportRow> rows;

    std::vector<double> times() const;
    std::vector<double> column(std::size_t well, Quantity q) const;
};

struct FractureExtent {
    double dx = 0.0;
    double dy = 0.0;
};

/// Controls in force for one well during a step. `limited` marks a rate
/// well that has switched to its BHP limit.
struct ActiveControl {
    WellControl::Mode mode = WellControl::Mode::Shut;
    double target = 0.0;
    double bhp_limit = 0.0;
    bool limited = false;
};

struct StepResult {
    bool converged = false;
    SimState state;
    std::vector<WellReport> rates; // bhp and rates at the end of the step
    std::vector<ActiveControl> controls; // after any limit switching
    int newton_iterations = 0;
    std::string failure;
};

struct PhaseVolumes {
    double oil = 0.0;   // surface m3
    double water = 0.0;
};

struct MaterialBalance {
    PhaseVolumes injected;
    PhaseVolumes produced;
    PhaseVolumes initial_in_place;
    PhaseVolumes final_in_place;
    double oil_error = 0.0;   // see balance_error
    double water_error = 0.0;
};

struct RunStats {
    long newton_iterations = 0;
    long accepted_steps = 0;
    long chops = 0;
    bool completed = true;
    std::string failure; // stage and time context when !completed
    double wall_seconds = 0.0;
};

struct StageMark {
    std::string name;
    double start = 0.0;
    double end = 0.0;
    std::size_t end_row = 0; // index into TimeSeries::rows
};

struct RunResult {
    TimeSeries series;
    RunStats stats;
    MaterialBalance balance;
    std::vector<StageMark> stages;
    std::vector<PhaseVolumes> well_produced; // cumulative per well
    std::vector<double> well_injected;
    SimState final_state;
};

/// Half-cell series combination: C / (1/(k_i psi_i A_i / L_i) + 1/(k_j psi_j A_j / L_j)),
/// L being the half-cell lengths.
double series_transmissibility(double k_i, double psi_i, double area_i, double half_len_i,
                               double k_j, double psi_j, double area_j, double half_len_j);

/// Kazemi shape factor 4 (1/dx^2 + 1/dy^2 + 1/dz^2), 1/m2.
double kazemi_shape_factor(double dx, double dy, double dz);

using Jacobian = Eigen::SparseMatrix<double, Eigen::RowMajor>;

class Simulator {
public:
    struct Face {
        std::size_t a = 0, b = 0; // same continuum, b is the +axis neighbour
        Axis axis = Axis::X;
        double half_a = 0.0;      // k A / L_half, mD m
        double half_b = 0.0;
    };
    struct Connection {
        std::size_t cell = 0;
        double wi = 0.0; // Peaceman index, m3/(d MPa cP)
    };

    /// Resolves the rock/FVF tables and precomputes connectivity. Throws
    /// DeckError or ParameterError for invalid decks.
    explicit Simulator(Deck deck);

    const Deck& deck() const noexcept { return deck_; }
    const RockTablePair& rock() const noexcept { return tables_.rock; }
    const FvfTable& fvf() const noexcept { return tables_.fvf; }
    const FluidSpec& fluid() const noexcept { return fluid_; }
    const std::vector<Face>& faces() const noexcept { return faces_; }
    std::size_t unknowns() const noexcept { return 2 * cells_ + deck_.wells.size(); }

    SimState initial_state() const;

    /// Face transmissibility per unit mobility, m3/(d MPa cP), with each side's
    /// directional multiplier evaluated at its own pressure.
    double face_transmissibility(const Face& face, const SimState& state) const;
    /// Matrix-fracture transfer coefficient of geometric cell `geo`.
    double transfer_coefficient(std::size_t geo, const SimState& state) const;
    /// Effective directional multiplier of a cell (hysteresis included).
    double trans_mult(std::size_t cell, Axis axis, const SimState& state) const;
    double pore_volume(std::size_t cell, double p) const;

    /// Residual of the discrete conservation and well equations in surface
    /// m3 per step. Rows are blocked by geometric cell g: 4g, 4g+1 hold the
    /// matrix oil and water equations, 4g+2, 4g+3 the fracture ones; well
    /// equations follow at 4N + w. Unknown columns use the same layout
    /// (pressure, then water saturation; BHP for wells).
    Eigen::VectorXd residual(const SimState& next, const SimState& prev, double dt,
                             std::span<const ActiveControl> controls) const;

    /// Same residual together with its exact Jacobian.
    void linearize(const SimState& next, const SimState& prev, double dt,
                   std::span<const ActiveControl> controls, Eigen::VectorXd& r,
                   Jacobian& jac) const;

    /// Nominal controls for a stage, before any limit switching.
    std::vector<ActiveControl> stage_controls(const Stage& stage) const;

    /// One backward-Euler step solved by Newton. Never throws for solver
    /// trouble; inspect StepResult::converged.
    StepResult advance(const SimState& state, double dt, std::vector<ActiveControl> controls) const;

    /// Runs every stage of the deck schedule with adaptive stepping. Solver
    /// failure stops the run and is reported in stats (partial series kept).
    RunResult run() const;

    FractureExtent fracture_extent(const SimState& state, std::size_t well) const;

    PhaseVolumes in_place(const SimState& state) const;
    double field_average_pressure(const SimState& state) const;
    double hydrostatic_pressure() const noexcept { return p_hydro_; }
    double extent_reference_pressure() const noexcept { return p_extent_ref_; }

    /// Per-well rates and BHP for a converged state.
    std::vector<WellReport> well_rates(const SimState& state,
                                       std::span<const ActiveControl> controls) const;

private:
    void assemble(const SimState& next, const SimState& prev, double dt,
                  std::span<const ActiveControl> controls, Eigen::VectorXd& r,
                  Jacobian* jac) const;
    template <class T>
    T effective_mult(const RockTable& table, Axis axis, const T& p, double peak) const;
    const RockTable& table_for(std::size_t cell) const noexcept;
    double limit_pressure(double from, double to, std::size_t cell) const;
    std::size_t eq(std::size_t cell) const noexcept { return 4 * (cell % n_) + (cell >= n_ ? 2 : 0); }
    std::size_t cell_of(std::size_t row) const noexcept { return row / 4 + ((row % 4) >= 2 ? n_ : 0); }

    void build_pattern();
    ReportRow report(const SimState& state, const std::vector<WellReport>& rates) const;

    Deck deck_;
    ResolvedTables tables_;
    FluidSpec fluid_;
    std::size_t n_ = 0;     // geometric cells
    std::size_t cells_ = 0; // 2n
    std::vector<double> pv0_;   // V * phi * ntg per cell
    std::vector<double> depth_; // per cell
    std::vector<Face> faces_;
    std::vector<double> transfer_base_; // C sigma k V per geometric cell
    std::vector<std::vector<Connection>> wells_;
    double p_hydro_ = 0.0;
    double p_extent_ref_ = 0.0;
    Jacobian pattern_;
};

/// Relative material-balance error of a phase: |inj - prod - (final - initial)|
/// over the largest of the four terms.
double balance_error(double injected, double produced, double initial, double final_);

} // namespace fracflood
