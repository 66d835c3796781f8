// Acceptance runner: one PASS/FAIL line per criterion. With no arguments all
// twelve run; otherwise only the numbered ones. Exit status 1 if any fails.

#include "fracflood/cmaes.hpp"
#include "fracflood/deck_io.hpp"
#include "fracflood/error.hpp"
#include "fracflood/histmatch.hpp"
#include "fracflood/parallel.hpp"
#include "fracflood/property_model.hpp"
#include "fracflood/results_io.hpp"
#include "fracflood/simulator.hpp"
#include "fracflood/welltest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace fracflood;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kWeightSumTol = 1e-12;
constexpr double kWeightHandTol = 1e-4;
constexpr double kSphereTarget = 1e-10;
constexpr long kSphereBudget = 20000;
constexpr double kRosenTarget = 1e-6;
constexpr long kRosenBudget = 50000;
constexpr int kRosenMinSeeds = 8;
constexpr double kStehfestOneOverSTol = 1e-9;
constexpr double kStehfestRampTol = 1e-8;
constexpr double kStehfestExpTol = 1e-6;
constexpr double kPlateauTol = 0.02;
constexpr double kSemilogTol = 0.01;
constexpr double kDualPermTol = 1e-3;
constexpr double kTwinAlpha = 0.02;
constexpr double kTwinPb = 1.0;
constexpr long kTwinBudget = 3000;
constexpr double kBalanceTol = 1e-4;
constexpr double kHandObjectiveTol = 1e-12;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path source_dir() { return FRACFLOOD_SOURCE_DIR; }

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string read_dir(const fs::path& dir)
{
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::string all;
    for (const auto& f : files) all += f.filename().string() + "\n" + read_file(f);
    return all;
}

TruthRecord twin_truth() { return parse_truth(read_file(source_dir() / "configs" / "twin_truth.json")); }

struct TwinSetup {
    Deck base = load_deck(source_dir() / "decks" / "twin.deck");
    TruthRecord truth = twin_truth();
    std::pair<double, double> range = characteristic_range(base, truth.p_min, truth.p_max);
    double p_min = range.first, p_max = range.second;
    RunResult truth_run = Simulator(decode(truth.theta, base, p_min, p_max)).run();
    ObservationSet obs = sample_observations(truth_run, 5.0, 0.0, 1);
};

// 1
Outcome audit()
{
    const int t3 = variable_count_audit(3);
    const bool ok = t3 == 37 && kSimplifiedDimension == 11 && kRepresentativeNames.size() == 11;
    return {ok, fmt("T(3) = %d, simplified dimension = %d", t3, kSimplifiedDimension)};
}

// 2
Outcome bounds_conformance()
{
    const double p_min = 15, p_max = 37;
    const auto b = ParamBounds::defaults(p_min, p_max);
    const bool reference = b.box[representative_index("k_xy")] == Interval{0.1, 0.6} &&
                           b.box[representative_index("psi_xfmax")] == Interval{100, 2000} &&
                           b.box[representative_index("c_w")] == Interval{1e-6, 1e-4} &&
                           b.box[representative_index("k_vo")] == Interval{0.8, 1.5} &&
                           b.box[representative_index("p_b")] == Interval{p_min, p_max};
    std::mt19937_64 rng(2024);
    long produced_bad = 0, accepted_bad = 0, rejected_good = 0;
    const std::vector<double> lo(kRepresentativeDim, 0.0), hi(kRepresentativeDim, 1.0);
    for (int n = 0; n < 10000; ++n) {
        // candidates as the matcher produces them: normalized draw, repaired, mapped
        std::array<double, kRepresentativeDim> u{};
        std::vector<double> raw(kRepresentativeDim);
        for (auto& x : raw) x = std::normal_distribution<double>(0.5, 0.6)(rng);
        const auto fixed = repair_bounds(raw, lo, hi);
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            u[i] = b.box[i].lower + fixed.x[i] * (b.box[i].upper - b.box[i].lower);
        try {
            check_bounds(from_array(u), b);
        } catch (const ParameterError&) {
            ++produced_bad;
        }
        // arbitrary vectors: accepted exactly when inside the box
        std::array<double, kRepresentativeDim> v{};
        bool inside = true;
        for (std::size_t i = 0; i < kRepresentativeDim; ++i) {
            const double w = b.box[i].upper - b.box[i].lower;
            v[i] = std::uniform_real_distribution<double>(b.box[i].lower - 0.1 * w, b.box[i].upper + 0.1 * w)(rng);
            inside = inside && v[i] >= b.box[i].lower && v[i] <= b.box[i].upper;
        }
        bool accepted = true;
        try {
            check_bounds(from_array(v), b);
        } catch (const ParameterError&) {
            accepted = false;
        }
        if (accepted && !inside) ++accepted_bad;
        if (!accepted && inside) ++rejected_good;
    }
    const bool ok = reference && produced_bad == 0 && accepted_bad == 0 && rejected_good == 0;
    return {ok, fmt("1e4 produced out of bounds: %ld, accepted out of bounds: %ld, rejected in bounds: %ld",
                    produced_bad, accepted_bad, rejected_good)};
}

// 3
Outcome table_generation()
{
    const double p_min = 15, p_max = 37;
    const auto b = ParamBounds::defaults(p_min, p_max);
    const auto fvf = FvfTable::linear_default(p_min, p_max);
    std::mt19937_64 rng(3);
    long bad = 0;
    const double inset = 1e-3 * (p_max - p_min);
    for (int n = 0; n < 1000; ++n) {
        std::array<double, kRepresentativeDim> v{};
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            v[i] = std::uniform_real_distribution<double>(b.box[i].lower, b.box[i].upper)(rng);
        v[2] = std::clamp(v[2], p_min + inset, p_max - inset);
        const auto g = tables_from_representative(from_array(v), p_min, p_max, fvf);
        const auto& m = g.rock.matrix.rows();
        const auto& f = g.rock.fracture.rows();
        if (validate_monotone(m) || validate_monotone(f) || m.size() < 2 || f.size() < 2 || !(m[0] == f[0]) ||
            !(m[1] == f[1]))
            ++bad;
    }
    return {bad == 0, fmt("1e3 random tables, failures: %ld", bad)};
}

// 4
Outcome weights()
{
    bool ok = true;
    for (int mu = 1; mu <= 50; ++mu) {
        const auto w = default_weights(mu);
        ok = ok && std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) <= kWeightSumTol;
        for (std::size_t i = 0; i < w.size(); ++i) ok = ok && w[i] > 0 && (i == 0 || w[i] < w[i - 1]);
    }
    const auto w3 = default_weights(3);
    const double hand[3] = {0.5857, 0.2928, 0.1215};
    double dev = 0.0;
    for (int i = 0; i < 3; ++i) dev = std::max(dev, std::abs(w3[static_cast<std::size_t>(i)] - hand[i]));
    ok = ok && dev <= kWeightHandTol;
    return {ok, fmt("mu=3 weights (%.4f, %.4f, %.4f), max deviation %.1e", w3[0], w3[1], w3[2], dev)};
}

// 5
Outcome optimizer()
{
    auto sphere = [](std::span<const double> x) {
        double s = 0;
        for (double v : x) s += v * v;
        return s;
    };
    auto rosen = [](std::span<const double> x) {
        double s = 0;
        for (std::size_t i = 0; i + 1 < x.size(); ++i)
            s += 100 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1 - x[i], 2);
        return s;
    };
    auto config = [](std::size_t n, std::uint64_t seed, long budget, double target) {
        CmaesConfig c;
        std::mt19937_64 rng(seed);
        c.mean.resize(n);
        for (auto& m : c.mean) m = std::uniform_real_distribution<double>(-4, 4)(rng);
        c.lower.assign(n, -5);
        c.upper.assign(n, 5);
        c.sigma0 = 2.0;
        c.seed = seed;
        c.max_evaluations = budget;
        c.target = target;
        return c;
    };
    int sphere_ok = 0, rosen_ok = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        if (minimize(sphere, config(11, seed, kSphereBudget, kSphereTarget)).best_fitness < kSphereTarget) ++sphere_ok;
        if (minimize(rosen, config(5, seed, kRosenBudget, kRosenTarget)).best_fitness < kRosenTarget) ++rosen_ok;
    }
    return {sphere_ok == 10 && rosen_ok >= kRosenMinSeeds,
            fmt("sphere n=11: %d/10 seeds below 1e-10 in 2e4 evals; Rosenbrock n=5: %d/10 below 1e-6 in 5e4", sphere_ok,
                rosen_ok)};
}

// 6
Outcome stehfest()
{
    double one = 0.0;
    for (int n = 4; n <= 12; n += 2)
        for (double t : {0.01, 1.0, 100.0})
            one = std::max(one, std::abs(stehfest_invert([](double s) { return 1 / s; }, t, n) - 1.0));
    const double ramp = std::abs(stehfest_invert([](double s) { return 1 / (s * s); }, 1.0, 12) - 1.0);
    double ex = 0.0, worst_t = 0.0;
    for (int i = 0; i <= 100; ++i) {
        const double t = 0.1 * std::pow(100.0, i / 100.0);
        const double e = std::abs(stehfest_invert([](double s) { return 1 / (s + 1); }, t, 12) / std::exp(-t) - 1.0);
        if (e > ex) {
            ex = e;
            worst_t = t;
        }
    }
    const bool ok = one <= kStehfestOneOverSTol && ramp < kStehfestRampTol && ex < kStehfestExpTol;
    return {ok, fmt("1/s max error %.1e; 1/s^2 rel error %.2e (limit 1e-8); 1/(s+1) max rel error %.2e at t=%.2f "
                    "(limit 1e-6)",
                    one, ramp, ex, worst_t)};
}

// 7
Outcome dual_media()
{
    const auto p = DimensionlessParams::make(0.1, 1e-5);
    std::vector<double> t;
    for (int i = 0; i <= 160; ++i) t.push_back(std::pow(10.0, 1.0 + 0.05 * i));
    const auto curve = type_curve(p, t);
    double trough = 1.0, t_trough = 0.0;
    for (const auto& c : curve)
        if (c.derivative < trough) {
            trough = c.derivative;
            t_trough = c.t_d;
        }
    // plateau levels: highest derivative on either side of the trough
    double early = 0.0, late = 0.0;
    for (const auto& c : curve) {
        double& side = c.t_d < t_trough ? early : late;
        side = std::max(side, c.derivative);
    }
    const bool a = trough < 0.5 && std::abs(early - 0.5) <= kPlateauTol * 0.5 && std::abs(late - 0.5) <= kPlateauTol * 0.5 &&
                   t_trough > curve.front().t_d && t_trough < curve.back().t_d;
    const double late_p = stehfest_invert([&](double s) { return laplace_pwd(s, p); }, 1e8);
    const double semilog = 0.5 * (std::log(1e8) + 0.80907);
    const bool b = std::abs(late_p / semilog - 1.0) <= kSemilogTol;
    double dk = 0.0;
    const auto q = DimensionlessParams::make(0.1, 1e-5, 1e-6);
    for (double tt : {1e2, 1e4, 1e5, 1e6, 1e8}) {
        const double x = stehfest_invert([&](double s) { return laplace_pwd(s, q); }, tt);
        const double y = stehfest_invert([&](double s) { return laplace_pwd(s, p); }, tt);
        dk = std::max(dk, std::abs(x / y - 1.0));
    }
    const bool c = dk < kDualPermTol;
    return {a && b && c, fmt("(a) trough %.3f at t_D=%.2g, plateaus %.4f / %.4f; (b) p_wD(1e8) %.4f vs %.4f; (c) "
                             "dual-perm max rel diff %.1e",
                             trough, t_trough, early, late, late_p, semilog, dk)};
}

// 8
Outcome twin_recovery()
{
    const TwinSetup twin;
    if (!twin.truth_run.stats.completed) return {false, "truth run failed: " + twin.truth_run.stats.failure};
    auto cfg = parse_match_config(read_file(source_dir() / "configs" / "twin_match.json"));
    cfg.max_evaluations = std::min(cfg.max_evaluations, kTwinBudget);
    cfg.p_min = twin.p_min;
    cfg.p_max = twin.p_max;
    cfg.jobs = default_jobs();
    const auto report = run_match(cfg, twin.base, twin.obs);
    const double pb_err = std::abs(report.best.p_b - twin_truth().theta.p_b);
    const bool ok = report.best_terms.total <= kTwinAlpha && pb_err <= kTwinPb && report.evaluations <= kTwinBudget;
    return {ok, fmt("alpha %.4g (limit 0.02), p_b %.3f vs %.3f, %ld evaluations, %s", report.best_terms.total,
                    report.best.p_b, twin_truth().theta.p_b, report.evaluations, report.termination.c_str())};
}

std::string grid_deck_text(int nx, int ny, const std::string& wells, const std::string& schedule)
{
    return "[GRID]\nnx = " + std::to_string(nx) + "\nny = " + std::to_string(ny) +
           "\nnz = 1\ndx = 10\ndy = 10\ndz = 5\ndepth = 2000\n[PROPS]\npermx = 10\nporo = 0.2\n"
           "[FLUID]\nrho_o = 850\nrho_w = 1000\nc_oil = 0.001\nc_water = 4.5e-5\nmu_o = 5\nmu_w = 0.5\np_ref = 20\n"
           "[RELPERM]\n0.15 0 1\n0.5 0.2 0.2\n0.85 0.7 0\n"
           "[ROCKTAB_MATRIX]\n10 0.99 0.99 0.99 0.99\n20 1 1 1 1\n30 1.01 1.01 1.01 1.01\n"
           "[ROCKTAB_FRACTURE]\n10 0.99 0.99 0.99 0.99\n20 1 1 1 1\n30 1.01 50 50 50\n"
           "[WELLS]\n" + wells + "[SCHEDULE]\n" + schedule + "[INIT]\npressure = 20\nsw = 0.3\n";
}

// 9
Outcome mass_balance()
{
    std::vector<std::pair<std::string, Deck>> decks;
    const auto minimal = load_deck(source_dir() / "decks" / "minimal.deck");
    decks.emplace_back("minimal", minimal);
    auto halved = minimal;
    halved.numerics.dt_max = 1.0;
    decks.emplace_back("minimal dt_max 1", halved);
    auto hyst = minimal;
    hyst.numerics.tmult_hysteresis = 0.5;
    decks.emplace_back("minimal hysteresis", hyst);
    decks.emplace_back("five-spot",
                       parse_deck(grid_deck_text(5, 5,
                                                 "well = I injector 3 3 1\nwell = P1 producer 1 1 1\nwell = P2 producer 5 5 1\n",
                                                 "stage = injection 8\ncontrol = I rate 30 40\nstage = soak 3\n"
                                                 "stage = production 10\ncontrol = P1 bhp 15\ncontrol = P2 rate 5 10\n")));
    auto layered = parse_deck(grid_deck_text(2, 2, "well = I injector 1 1 1\nwell = P producer 2 2 1\n",
                                             "stage = injection 5\ncontrol = I rate 10 40\nstage = production 10\n"
                                             "control = P bhp 12\n"));
    layered.grid = Grid(2, 2, 2, {10}, {10}, {5}, {2000, 2000, 2000, 2000, 2005, 2005, 2005, 2005});
    layered.props = CellProps{std::vector<double>(8, 10), std::vector<double>(8, 10), std::vector<double>(8, 1),
                              std::vector<double>(8, 0.2), std::vector<double>(8, 1)};
    layered.init.datum_depth = 2000;
    layered.wells[1].k = 1;
    decks.emplace_back("two-layer gravity", layered);

    const auto twin = load_deck(source_dir() / "decks" / "twin.deck");
    const auto rec = twin_truth();
    const auto [lo, hi] = characteristic_range(twin, rec.p_min, rec.p_max);
    decks.emplace_back("twin truth", decode(rec.theta, twin, lo, hi));
    std::mt19937_64 rng(9);
    const auto [mlo, mhi] = characteristic_range(minimal, std::nullopt, std::nullopt);
    const auto b = ParamBounds::defaults(mlo, mhi);
    for (int i = 0; i < 8; ++i) {
        std::array<double, kRepresentativeDim> v{};
        for (std::size_t k = 0; k < kRepresentativeDim; ++k)
            v[k] = std::uniform_real_distribution<double>(b.box[k].lower, b.box[k].upper)(rng);
        v[2] = std::clamp(v[2], mlo + 0.05, mhi - 0.05);
        decks.emplace_back("minimal random theta " + std::to_string(i), decode(from_array(v), minimal, mlo, mhi));
    }

    double worst = 0.0;
    int converged = 0;
    std::string worst_name;
    for (const auto& [name, deck] : decks) {
        const auto r = Simulator(deck).run();
        if (!r.stats.completed) continue;
        ++converged;
        const double e = std::max(r.balance.oil_error, r.balance.water_error);
        if (e >= worst) {
            worst = e;
            worst_name = name;
        }
    }
    return {worst < kBalanceTol && converged > 0,
            fmt("%d/%zu runs converged, worst relative error %.2e (%s)", converged, decks.size(), worst,
                worst_name.c_str())};
}

// 10
Outcome fracture_dynamics()
{
    const auto twin = load_deck(source_dir() / "decks" / "twin.deck");
    const auto rec = twin_truth();
    const auto [lo, hi] = characteristic_range(twin, rec.p_min, rec.p_max);
    auto deck = decode(rec.theta, twin, lo, hi);
    deck.numerics.tmult_hysteresis = 0.0;
    deck.numerics.report_interval = 1.0;
    const Simulator sim(deck);
    const double p_b = rec.theta.p_b;

    std::size_t inj = 0;
    while (deck.wells[inj].kind != WellKind::Injector) ++inj;
    const auto& w = deck.wells[inj];
    const std::size_t cell = deck.grid.geo_cells() + deck.grid.index(w.i, w.j, w.k);

    SimState s = sim.initial_state();
    FractureExtent prev = sim.fracture_extent(s, inj);
    double prev_p = s.p[cell];
    long steps = 0, inj_checked = 0, prod_checked = 0, violations = 0, aniso = 0;
    bool below_seen = false;
    for (const auto& stage : deck.schedule) {
        const auto controls = sim.stage_controls(stage);
        bool injecting = false, producing = false;
        for (const auto& [name, ctl] : stage.controls) {
            if (ctl.mode == WellControl::Mode::Shut) continue;
            if (name == w.name) injecting = true;
            else if (deck.wells[deck.well_index(name)].kind == WellKind::Producer) producing = true;
        }
        producing = producing && !injecting;
        double t = 0.0;
        while (t < stage.duration - 1e-12) {
            double dt = std::min(0.25, stage.duration - t);
            auto step = sim.advance(s, dt, controls);
            while (!step.converged && dt > 1e-4) step = sim.advance(s, dt /= 2, controls);
            if (!step.converged) return {false, "manual stepping failed in stage " + stage.name};
            t += dt;
            ++steps;
            const auto e = sim.fracture_extent(step.state, inj);
            const double p = step.state.p[cell];
            if (e.dx < e.dy) ++aniso;
            if (injecting && p > p_b && prev_p > p_b) {
                ++inj_checked;
                if (e.dx < prev.dx || e.dy < prev.dy) ++violations;
            }
            if (producing) {
                below_seen = below_seen || p < p_b;
                if (below_seen) {
                    ++prod_checked;
                    if (e.dx > prev.dx || e.dy > prev.dy) ++violations;
                }
            }
            prev = e;
            prev_p = p;
            s = step.state;
        }
    }
    const bool ok = violations == 0 && aniso == 0 && inj_checked > 0 && prod_checked > 0;
    return {ok, fmt("%ld steps; %ld injection and %ld production steps checked, %ld monotonicity violations, %ld steps "
                    "with dx < dy",
                    steps, inj_checked, prod_checked, violations, aniso)};
}

// 11
Outcome objective_properties()
{
    const auto minimal = load_deck(source_dir() / "decks" / "minimal.deck");
    const auto [lo, hi] = characteristic_range(minimal, std::nullopt, std::nullopt);
    auto theta = twin_truth().theta;
    const auto run = Simulator(decode(theta, minimal, lo, hi)).run();
    const auto obs = sample_observations(run, 2.0, 0.0, 1);
    const auto self = evaluate(theta, minimal, obs, lo, hi);

    std::array<double, kSeriesKinds> alpha{}, mean{};
    std::array<bool, kSeriesKinds> present{};
    alpha[0] = 2;
    mean[0] = 15;
    present[0] = true;
    const double hand = total_objective(alpha, mean, present);

    // scale observed and simulated pressures together
    const std::vector<double> times{0, 1, 2};
    const std::vector<double> sim{20, 22, 25};
    const std::vector<ObsPoint> o{{0, 21}, {1, 22.5}, {2, 24}};
    double spread = 0.0;
    const double base_term = series_deviation(times, sim, o) / ((21 + 22.5 + 24) / 3);
    for (double c : {0.1, 3.0, 1e3}) {
        std::vector<double> sim_c;
        std::vector<ObsPoint> o_c;
        for (double v : sim) sim_c.push_back(c * v);
        for (auto p : o) o_c.push_back({p.time, c * p.value});
        const double term = series_deviation(times, sim_c, o_c) / ((o_c[0].value + o_c[1].value + o_c[2].value) / 3);
        spread = std::max(spread, std::abs(term / base_term - 1.0));
    }
    const bool ok = self.ok && self.terms.total == 0.0 && std::abs(hand - 2.0 / 15.0) <= kHandObjectiveTol &&
                    std::abs(hand - 0.1333) < 1e-4 && spread < 1e-12;
    return {ok, fmt("self-match alpha %.3g; hand case %.12f; scaling spread %.1e", self.terms.total, hand, spread)};
}

// 12
Outcome determinism()
{
    const auto minimal = load_deck(source_dir() / "decks" / "minimal.deck");
    const auto tmp = fs::temp_directory_path() / "fracflood_acceptance_det";
    fs::remove_all(tmp);

    auto sim_bytes = [&] {
        const auto r = Simulator(minimal).run();
        return series_csv(r.series) + summary_json(r);
    };
    const bool sim_same = sim_bytes() == sim_bytes();

    const auto theta = twin_truth().theta;
    const auto [lo, hi] = characteristic_range(minimal, std::nullopt, std::nullopt);
    auto gen = [&](const std::string& name) {
        const auto run = Simulator(decode(theta, minimal, lo, hi)).run();
        write_observations(sample_observations(run, 2.0, 0.02, 7), tmp / name);
        return read_dir(tmp / name);
    };
    const bool obs_same = gen("a") == gen("b");

    const auto obs = load_observations(tmp / "a");
    auto match_bytes = [&](int jobs) {
        MatchConfig c;
        c.seed = 11;
        c.population = 8;
        c.max_evaluations = 40;
        c.jobs = jobs;
        const auto r = run_match(c, minimal, obs);
        return report_json(r, obs) + trace_csv(r.trace) + series_csv(r.best_run.series);
    };
    const auto m1 = match_bytes(1);
    const bool match_same = m1 == match_bytes(1) && m1 == match_bytes(2) && m1 == match_bytes(4);
    fs::remove_all(tmp);
    return {sim_same && obs_same && match_same,
            fmt("simulate %s, gen-obs %s, match across 1/2/4 workers %s", sim_same ? "identical" : "DIFFERENT",
                obs_same ? "identical" : "DIFFERENT", match_same ? "identical" : "DIFFERENT")};
}

struct Criterion {
    const char* name;
    std::function<Outcome()> run;
};

} // namespace

int main(int argc, char** argv)
{
    const std::vector<Criterion> all = {
        {"parameter-count audit", audit},
        {"bounds conformance", bounds_conformance},
        {"table generation", table_generation},
        {"CMA-ES weights", weights},
        {"optimizer capability", optimizer},
        {"Stehfest inversion", stehfest},
        {"dual-media oracle", dual_media},
        {"synthetic twin recovery", twin_recovery},
        {"mass balance", mass_balance},
        {"fracture dynamics", fracture_dynamics},
        {"objective properties", objective_properties},
        {"determinism", determinism},
    };
    std::vector<int> pick;
    for (int i = 1; i < argc; ++i) pick.push_back(std::stoi(argv[i]));
    if (pick.empty())
        for (int i = 1; i <= static_cast<int>(all.size()); ++i) pick.push_back(i);

    int failed = 0;
    for (int id : pick) {
        if (id < 1 || id > static_cast<int>(all.size())) {
            std::fprintf(stderr, "no criterion %d\n", id);
            return 2;
        }
        const auto& c = all[static_cast<std::size_t>(id - 1)];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %2d %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", id, c.name, out.detail.c_str(), secs);
        std::fflush(stdout);
        if (!out.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
