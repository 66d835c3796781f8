#pragma once

// Observation model, deviation objectives and the CMA-ES matching loop over
// the 11 representative parameters.

#include "fracflood/cmaes.hpp"
#include "fracflood/representative.hpp"
#include "fracflood/simulator.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fracflood {

enum class SeriesKind { Bhp = 0, Wir = 1, Wct = 2, Dx = 3, Dy = 4 };
inline constexpr std::size_t kSeriesKinds = 5;
inline constexpr std::array<const char*, kSeriesKinds> kSeriesNames = {"bhp", "wir", "wct", "dx", "dy"};

Quantity quantity_of(SeriesKind kind);

struct ObsPoint {
    double time = 0.0;
    double value = 0.0;
    bool operator==(const ObsPoint&) const = default;
};

struct WellObservations {
    std::string well;
    std::array<std::vector<ObsPoint>, kSeriesKinds> series;
    bool operator==(const WellObservations&) const = default;
};

struct ObservationSet {
    std::vector<WellObservations> wells; // in first-seen order

    WellObservations& at(const std::string& well); // inserts when absent
    const WellObservations* find(const std::string& well) const;
    std::size_t count(SeriesKind kind) const;
    /// Global mean over every observation point of the kind (all wells); 0 if none.
    double mean(SeriesKind kind) const;
    /// Times ascending per series, water cut in [0,1], at least one point. Throws ConfigError.
    void validate() const;
    bool operator==(const ObservationSet&) const = default;
};

/// Reads bhp.csv, wir.csv, wct.csv (well,time_days,value) and extents.csv
/// (well,time_days,dx_m,dy_m) from a directory; absent files mean absent series.
ObservationSet load_observations(const std::filesystem::path& dir);
void write_observations(const ObservationSet& obs, const std::filesystem::path& dir);

/// Samples a run at t = cadence, 2 cadence, ... up to the schedule end and
/// perturbs each value by value * rel_noise * N(0,1). BHP for every well,
/// injection rate and extents for injectors, water cut for producers while
/// they produce. Water cut is clamped to [0,1].
ObservationSet sample_observations(const RunResult& run, double cadence, double rel_noise,
                                   std::uint64_t seed);

/// Linear interpolation of a report column at t; throws ConfigError outside
/// the reported time range.
double interpolate_series(std::span<const double> times, std::span<const double> values, double t);

/// Sum of |obs - sim| with the simulated series interpolated to each
/// observation instant. Throws ConfigError naming well and time for
/// observations outside the simulated range.
double series_deviation(std::span<const double> sim_times, std::span<const double> sim_values,
                        std::span<const ObsPoint> obs, const std::string& well = "");

struct ObjectiveTerms {
    std::array<double, kSeriesKinds> alpha{};  // raw deviation sums
    std::array<double, kSeriesKinds> mean{};   // observation means
    std::array<bool, kSeriesKinds> active{};
    double total = 0.0;
};

/// Mean of alpha_k / mean_k over the active terms; a term is active when
/// present and its mean is at least 1e-9. Throws ConfigError if none is.
double total_objective(const std::array<double, kSeriesKinds>& alpha,
                       const std::array<double, kSeriesKinds>& mean,
                       const std::array<bool, kSeriesKinds>& present);

/// Deviation terms of a finished run against observations.
ObjectiveTerms objective_terms(const TimeSeries& sim, const ObservationSet& obs);

/// Variable count of the unsimplified parameterization with n characteristic
/// pressure points: 12 n + 1.
int variable_count_audit(int n);
inline constexpr int kSimplifiedDimension = static_cast<int>(kRepresentativeDim);

/// Characteristic pressure range for table generation: explicit values win,
/// then the deck's REPRESENTATIVE section, then default_pressure_range.
std::pair<double, double> characteristic_range(const Deck& deck, std::optional<double> p_min,
                                               std::optional<double> p_max);

/// Copy of `base` with explicit rock tables, the K_Vo-scaled FVF curve and
/// c_water generated from theta. Throws ParameterError on bound violations.
Deck decode(const RepresentativeParams& theta, const Deck& base, double p_min, double p_max);

struct Evaluation {
    bool ok = false;
    ObjectiveTerms terms;
    std::string failure;
};

/// decode + run + objective. Failures (bad parameters, non-convergence)
/// come back as ok = false with a message instead of an exception.
Evaluation evaluate(const RepresentativeParams& theta, const Deck& base, const ObservationSet& obs,
                    double p_min, double p_max);

struct MatchConfig {
    std::optional<double> p_min, p_max;
    std::optional<ParamBounds> bounds;       // default: ParamBounds::defaults(p_min, p_max)
    std::optional<RepresentativeParams> initial; // default: box centre
    int population = 0;
    double sigma0 = 0.3;                     // in normalized [0,1] coordinates
    std::uint64_t seed = 1;
    long max_evaluations = 3000;
    std::optional<double> target;
    double tolfun = 1e-12;
    double tolx = 1e-12;
    int stagnation = 0;
    int jobs = 1;
};

/// Parses a JSON match config; unknown keys are rejected. Throws ConfigError.
MatchConfig parse_match_config(const std::string& json_text);

/// Reads named representative fields from JSON (all 11 required; "p_min" and
/// "p_max" are also accepted and returned). Throws ConfigError.
struct TruthRecord {
    RepresentativeParams theta;
    std::optional<double> p_min, p_max;
};
TruthRecord parse_truth(const std::string& json_text);
std::string truth_json(const RepresentativeParams& theta, double p_min, double p_max);

struct MatchReport {
    RepresentativeParams best;
    ObjectiveTerms best_terms;
    long evaluations = 0;
    long failures = 0;
    std::vector<TraceRow> trace; // per generation, objective of successful runs
    std::string termination;
    double p_min = 0.0, p_max = 0.0;
    std::uint64_t seed = 0;
    RunResult best_run;
};

/// Searches the bounded box in normalized coordinates. The fracture pressure
/// point bounds are pulled 0.1 % of the range inside (p_min, p_max) so every
/// candidate yields strictly monotone tables. Failed runs score
/// 10 * max(worst successful objective so far, 1e3). Throws MatchError when a
/// whole generation fails, ConfigError for bad inputs.
MatchReport run_match(const MatchConfig& config, const Deck& base, const ObservationSet& obs);

/// JSON form of the report: best parameters by name, objective terms, trace
/// and observed-vs-simulated values for the best run.
std::string report_json(const MatchReport& report, const ObservationSet& obs);

} // namespace fracflood
