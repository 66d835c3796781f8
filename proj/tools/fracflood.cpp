#include "fracflood/deck_io.hpp"
#include "fracflood/error.hpp"
#include "fracflood/histmatch.hpp"
#include "fracflood/parallel.hpp"
#include "fracflood/representative.hpp"
#include "fracflood/results_io.hpp"
#include "fracflood/simulator.hpp"
#include "fracflood/welltest.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace fracflood;

namespace {

enum Exit { kOk = 0, kInput = 2, kSolver = 3, kMatch = 4 };

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << text;
    if (!out) throw ConfigError("write failed: " + path.string());
}

Deck read_deck(const fs::path& path)
{
    try {
        return load_deck(path);
    } catch (const DeckError& e) {
        throw e.prefixed(path.string());
    }
}

void write_run(const RunResult& run, const fs::path& out)
{
    fs::create_directories(out);
    write_text(out / "results.csv", series_csv(run.series));
    write_text(out / "summary.json", summary_json(run));
    write_text(out / "timing.json", timing_json(run));
}

int cmd_simulate(const fs::path& deck_path, const fs::path& out)
{
    const Simulator sim(read_deck(deck_path));
    const RunResult run = sim.run();
    write_run(run, out);
    if (!run.stats.completed) {
        std::cerr << "fracflood: solver failure: " << run.stats.failure << "\n";
        return kSolver;
    }
    return kOk;
}

struct WelltestArgs {
    double omega_f = 0.1, lambda = 1e-5, kf = 1.0, cd = 0.0, skin = 0.0;
    double tmin = 1e-2, tmax = 1e8;
    int points = 101;
    int terms = 12;
    fs::path out;
};

int cmd_welltest(const WelltestArgs& a)
{
    const auto params = DimensionlessParams::make(a.omega_f, a.lambda, 1.0 - a.kf, a.cd, a.skin);
    params.validate();
    if (a.points < 1) throw ParameterError("points", "must be at least 1");
    if (!(a.tmin > 0.0)) throw ParameterError("tmin", "must be positive");
    if (!(a.tmax >= a.tmin)) throw ParameterError("tmax", "must not be below tmin");
    std::vector<double> t(static_cast<std::size_t>(a.points));
    const double l0 = std::log10(a.tmin), l1 = std::log10(a.tmax);
    for (int i = 0; i < a.points; ++i)
        t[i] = a.points == 1 ? a.tmin : std::pow(10.0, l0 + (l1 - l0) * i / (a.points - 1));
    std::ostringstream csv;
    csv << "t_D,p_wD,dp_wD_dlntD\n";
    for (const auto& p : type_curve(params, t, a.terms))
        csv << format_number(p.t_d) << ',' << format_number(p.p_wd) << ',' << format_number(p.derivative) << '\n';
    write_text(a.out, csv.str());
    return kOk;
}

struct GenObsArgs {
    fs::path deck, truth, out;
    double noise = 0.0;
    std::uint64_t seed = 1;
    double cadence = 5.0;
};

int cmd_gen_obs(const GenObsArgs& a)
{
    const Deck base = read_deck(a.deck);
    const TruthRecord truth = parse_truth(read_text(a.truth));
    const auto [p_min, p_max] = characteristic_range(base, truth.p_min, truth.p_max);
    check_bounds(truth.theta, ParamBounds::defaults(p_min, p_max));
    const RunResult run = Simulator(decode(truth.theta, base, p_min, p_max)).run();
    if (!run.stats.completed) {
        std::cerr << "fracflood: truth run failed: " << run.stats.failure << "\n";
        return kSolver;
    }
    const ObservationSet obs = sample_observations(run, a.cadence, a.noise, a.seed);
    write_observations(obs, a.out);

    nlohmann::ordered_json prov;
    prov["truth"] = nlohmann::ordered_json::parse(truth_json(truth.theta, p_min, p_max));
    prov["seed"] = a.seed;
    prov["noise"] = a.noise;
    prov["cadence_days"] = a.cadence;
    prov["deck"] = a.deck.filename().string();
    write_text(a.out / "provenance.json", prov.dump(2) + "\n");
    return kOk;
}

struct MatchArgs {
    fs::path deck, obs, config, out;
    std::optional<std::uint64_t> seed;
    std::optional<int> jobs;
};

int cmd_match(const MatchArgs& a)
{
    const Deck base = read_deck(a.deck);
    const ObservationSet obs = load_observations(a.obs);
    MatchConfig cfg = parse_match_config(read_text(a.config));
    if (a.seed) cfg.seed = *a.seed;
    if (a.jobs) cfg.jobs = *a.jobs;
    if (cfg.jobs <= 0) cfg.jobs = default_jobs();
    const MatchReport rep = run_match(cfg, base, obs);
    fs::create_directories(a.out);
    write_text(a.out / "report.json", report_json(rep, obs));
    write_text(a.out / "trace.csv", trace_csv(rep.trace));
    write_text(a.out / "results.csv", series_csv(rep.best_run.series));
    return kOk;
}

struct SweepArgs {
    fs::path deck, out;
    std::string stage, metric;
    std::vector<double> durations;
    std::optional<int> jobs;
};

int cmd_sweep(const SweepArgs& a)
{
    const Deck base = read_deck(a.deck);
    std::size_t si = base.schedule.size();
    for (std::size_t i = 0; i < base.schedule.size(); ++i)
        if (base.schedule[i].name == a.stage) si = i;
    if (si == base.schedule.size()) throw ConfigError("unknown stage " + a.stage);
    if (a.metric != "cumulative_oil" && a.metric != "final_water_cut" && a.metric != "avg_pressure")
        throw ConfigError("unknown metric " + a.metric + " (cumulative_oil, final_water_cut, avg_pressure)");
    if (a.durations.empty()) throw ConfigError("durations: empty list");
    for (double d : a.durations)
        if (!(d > 0.0)) throw ConfigError("durations: values must be positive");

    struct Row {
        bool ok = false;
        double metric = 0.0, coeff = 0.0;
        std::string failure;
    };
    const auto rows = parallel_map(a.durations.size(), a.jobs.value_or(0), [&](std::size_t i) {
        Deck d = base;
        d.schedule[si].duration = a.durations[i];
        const RunResult run = Simulator(std::move(d)).run();
        Row row;
        if (!run.stats.completed) {
            row.failure = run.stats.failure;
            return row;
        }
        const auto& last = run.series.rows.back();
        if (a.metric == "cumulative_oil") {
            for (const auto& p : run.well_produced) row.metric += p.oil;
        } else if (a.metric == "final_water_cut") {
            double w = 0.0, l = 0.0;
            for (const auto& wr : last.wells) {
                w += wr.wpr;
                l += wr.lpr;
            }
            row.metric = l > 0.0 ? w / l : 0.0;
        } else {
            row.metric = last.field_avg_p;
        }
        row.coeff = run.series.rows.at(run.stages.at(si).end_row).field_p_coeff;
        row.ok = true;
        return row;
    });
    std::ostringstream csv;
    csv << "duration_days," << a.metric << ",stage_end_p_coeff\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].ok) {
            std::cerr << "fracflood: duration " << format_number(a.durations[i])
                      << ": solver failure: " << rows[i].failure << "\n";
            return kSolver;
        }
        csv << format_number(a.durations[i]) << ',' << format_number(rows[i].metric) << ','
            << format_number(rows[i].coeff) << '\n';
    }
    write_text(a.out, csv.str());
    return kOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual-permeability fracturing-flooding simulator and history matcher"};
    app.require_subcommand(1);

    fs::path sim_deck, sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run a deck and write results.csv, summary.json, timing.json");
    simulate->add_option("--deck", sim_deck, "Deck file")->required();
    simulate->add_option("--out", sim_out, "Output directory")->required();

    WelltestArgs wt;
    auto* welltest = app.add_subcommand("welltest", "Dimensionless dual-media type curve");
    welltest->add_option("--omega-f", wt.omega_f, "Fracture storage coefficient")->capture_default_str();
    welltest->add_option("--lambda", wt.lambda, "Interporosity flow coefficient")->capture_default_str();
    welltest->add_option("--kf", wt.kf, "Fracture mobility fraction (1 = dual porosity)")->capture_default_str();
    welltest->add_option("--cd", wt.cd, "Wellbore storage")->capture_default_str();
    welltest->add_option("--skin", wt.skin, "Skin factor")->capture_default_str();
    welltest->add_option("--tmin", wt.tmin, "First t_D")->capture_default_str();
    welltest->add_option("--tmax", wt.tmax, "Last t_D")->capture_default_str();
    welltest->add_option("--points", wt.points, "Log-spaced sample count")->capture_default_str();
    welltest->add_option("--terms", wt.terms, "Stehfest terms (even, 4..20)")->capture_default_str();
    welltest->add_option("--out", wt.out, "CSV file")->required();

    GenObsArgs go;
    auto* gen_obs = app.add_subcommand("gen-obs", "Synthetic observations from a truth parameter file");
    gen_obs->add_option("--deck", go.deck, "Base deck")->required();
    gen_obs->add_option("--truth", go.truth, "Truth parameters (JSON)")->required();
    gen_obs->add_option("--noise", go.noise, "Relative Gaussian noise level")->capture_default_str();
    gen_obs->add_option("--seed", go.seed, "Noise seed")->capture_default_str();
    gen_obs->add_option("--cadence", go.cadence, "Sampling interval, days")->capture_default_str();
    gen_obs->add_option("--out", go.out, "Output directory")->required();

    MatchArgs ma;
    auto* match = app.add_subcommand("match", "CMA-ES history match of the representative parameters");
    match->add_option("--deck", ma.deck, "Base deck")->required();
    match->add_option("--obs", ma.obs, "Observation directory")->required();
    match->add_option("--config", ma.config, "Match config (JSON)")->required();
    match->add_option("--out", ma.out, "Output directory")->required();
    match->add_option("--seed", ma.seed, "Overrides the config seed");
    match->add_option("--jobs", ma.jobs, "Parallel simulations (default: logical cores)");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Vary one stage duration and tabulate a metric");
    sweep->add_option("--deck", sw.deck, "Deck file")->required();
    sweep->add_option("--stage", sw.stage, "Stage name")->required();
    sweep->add_option("--durations", sw.durations, "Durations in days")->required()->delimiter(',');
    sweep->add_option("--metric", sw.metric, "cumulative_oil | final_water_cut | avg_pressure")->required();
    sweep->add_option("--out", sw.out, "CSV file")->required();
    sweep->add_option("--jobs", sw.jobs, "Parallel simulations (default: logical cores)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInput;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_deck, sim_out);
        if (welltest->parsed()) return cmd_welltest(wt);
        if (gen_obs->parsed()) return cmd_gen_obs(go);
        if (match->parsed()) return cmd_match(ma);
        if (sweep->parsed()) return cmd_sweep(sw);
    } catch (const MatchError& e) {
        std::cerr << "fracflood: " << e.what() << "\n";
        return kMatch;
    } catch (const SolverError& e) {
        std::cerr << "fracflood: solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const Error& e) {
        std::cerr << "fracflood: " << e.what() << "\n";
        return kInput;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "fracflood: " << e.what() << "\n";
        return kInput;
    }
    return kInput;
}
