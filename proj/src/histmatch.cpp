#include "fracflood/histmatch.hpp"

#include "fracflood/deck_io.hpp"
#include "fracflood/error.hpp"
#include "fracflood/parallel.hpp"
#include "fracflood/results_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

namespace fracflood {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

double to_double(std::string_view s, const std::string& where)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
        throw ConfigError(where + ": not a number: '" + std::string(s) + "'");
    return v;
}

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s)
{
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
}

/// Rows of a CSV file with the expected header; empty when the file is absent.
std::vector<std::vector<std::string>> read_csv(const fs::path& path,
                                               const std::vector<std::string>& header)
{
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(path);
    if (!in) return rows;
    std::string line;
    int lineno = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        for (auto& c : cells) c = trim(c);
        if (!seen_header) {
            if (cells != header)
                throw ConfigError(path.string() + ": unexpected header on line " + std::to_string(lineno));
            seen_header = true;
            continue;
        }
        if (cells.size() != header.size())
            throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " +
                              std::to_string(header.size()) + " columns");
        rows.push_back(std::move(cells));
    }
    return rows;
}

double interp_at(std::span<const double> times, std::span<const double> values, double t,
                 const std::string& well)
{
    const double eps = times.empty() ? 0.0 : 1e-9 * std::max(1.0, std::abs(times.back()));
    if (times.empty() || t < times.front() - eps || t > times.back() + eps) {
        std::ostringstream msg;
        msg << "observation";
        if (!well.empty()) msg << " of well " << well;
        msg << " at t=" << t << " d lies outside the simulated range";
        throw ConfigError(msg.str());
    }
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - times.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

std::array<double, kRepresentativeDim> array_of(const ojson& j, const std::string& what)
{
    std::array<double, kRepresentativeDim> v{};
    for (std::size_t i = 0; i < kRepresentativeDim; ++i) {
        const std::string key(kRepresentativeNames[i]);
        if (!j.contains(key)) throw ConfigError(what + ": missing field " + key);
        if (!j[key].is_number()) throw ConfigError(what + ": field " + key + " must be a number");
        v[i] = j[key].get<double>();
    }
    return v;
}

ojson theta_json(const RepresentativeParams& theta)
{
    ojson j;
    const auto v = to_array(theta);
    for (std::size_t i = 0; i < kRepresentativeDim; ++i) j[std::string(kRepresentativeNames[i])] = v[i];
    return j;
}

} // namespace

Quantity quantity_of(SeriesKind kind)
{
    switch (kind) {
    case SeriesKind::Bhp: return Quantity::Bhp;
    case SeriesKind::Wir: return Quantity::Wir;
    case SeriesKind::Wct: return Quantity::Wct;
    case SeriesKind::Dx: return Quantity::Dx;
    case SeriesKind::Dy: return Quantity::Dy;
    }
    return Quantity::Bhp;
}

WellObservations& ObservationSet::at(const std::string& well)
{
    for (auto& w : wells)
        if (w.well == well) return w;
    wells.push_back(WellObservations{well, {}});
    return wells.back();
}

const WellObservations* ObservationSet::find(const std::string& well) const
{
    for (const auto& w : wells)
        if (w.well == well) return &w;
    return nullptr;
}

std::size_t ObservationSet::count(SeriesKind kind) const
{
    std::size_t n = 0;
    for (const auto& w : wells) n += w.series[static_cast<std::size_t>(kind)].size();
    return n;
}

double ObservationSet::mean(SeriesKind kind) const
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& w : wells) {
        for (const auto& p : w.series[static_cast<std::size_t>(kind)]) {
            sum += p.value;
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

void ObservationSet::validate() const
{
    std::size_t total = 0;
    for (const auto& w : wells) {
        for (std::size_t k = 0; k < kSeriesKinds; ++k) {
            const auto& s = w.series[k];
            total += s.size();
            for (std::size_t i = 0; i < s.size(); ++i) {
                if (i > 0 && !(s[i].time > s[i - 1].time))
                    throw ConfigError("observations: " + std::string(kSeriesNames[k]) + " times of well " +
                                      w.well + " not ascending");
                if (k == static_cast<std::size_t>(SeriesKind::Wct) && !(s[i].value >= 0.0 && s[i].value <= 1.0))
                    throw ConfigError("observations: water cut of well " + w.well + " outside [0,1]");
            }
        }
    }
    if (total == 0) throw ConfigError("observations: no data points");
}

ObservationSet load_observations(const fs::path& dir)
{
    if (!fs::is_directory(dir)) throw ConfigError("observation directory not found: " + dir.string());
    ObservationSet obs;
    const std::pair<const char*, SeriesKind> files[] = {
        {"bhp.csv", SeriesKind::Bhp}, {"wir.csv", SeriesKind::Wir}, {"wct.csv", SeriesKind::Wct}};
    for (const auto& [file, kind] : files) {
        const auto path = dir / file;
        for (const auto& row : read_csv(path, {"well", "time_days", "value"})) {
            obs.at(row[0]).series[static_cast<std::size_t>(kind)].push_back(
                {to_double(row[1], path.string()), to_double(row[2], path.string())});
        }
    }
    const auto path = dir / "extents.csv";
    for (const auto& row : read_csv(path, {"well", "time_days", "dx_m", "dy_m"})) {
        auto& w = obs.at(row[0]);
        const double t = to_double(row[1], path.string());
        w.series[static_cast<std::size_t>(SeriesKind::Dx)].push_back({t, to_double(row[2], path.string())});
        w.series[static_cast<std::size_t>(SeriesKind::Dy)].push_back({t, to_double(row[3], path.string())});
    }
    obs.validate();
    return obs;
}

void write_observations(const ObservationSet& obs, const fs::path& dir)
{
    fs::create_directories(dir);
    const std::pair<const char*, SeriesKind> files[] = {
        {"bhp.csv", SeriesKind::Bhp}, {"wir.csv", SeriesKind::Wir}, {"wct.csv", SeriesKind::Wct}};
    for (const auto& [file, kind] : files) {
        std::ofstream out(dir / file, std::ios::binary);
        out << "well,time_days,value\n";
        for (const auto& w : obs.wells)
            for (const auto& p : w.series[static_cast<std::size_t>(kind)])
                out << w.well << ',' << format_number(p.time) << ',' << format_number(p.value) << '\n';
    }
    std::ofstream out(dir / "extents.csv", std::ios::binary);
    out << "well,time_days,dx_m,dy_m\n";
    for (const auto& w : obs.wells) {
        const auto& dx = w.series[static_cast<std::size_t>(SeriesKind::Dx)];
        const auto& dy = w.series[static_cast<std::size_t>(SeriesKind::Dy)];
        for (std::size_t i = 0; i < std::min(dx.size(), dy.size()); ++i)
            out << w.well << ',' << format_number(dx[i].time) << ',' << format_number(dx[i].value) << ','
                << format_number(dy[i].value) << '\n';
    }
}

ObservationSet sample_observations(const RunResult& run, double cadence, double rel_noise,
                                   std::uint64_t seed)
{
    if (!(cadence > 0.0)) throw ConfigError("cadence must be positive");
    if (!(rel_noise >= 0.0)) throw ConfigError("noise must be non-negative");
    const auto& ts = run.series;
    const auto times = ts.times();
    const double t_end = times.back();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto noisy = [&](double v) { return rel_noise > 0.0 ? v * (1.0 + rel_noise * normal(rng)) : v; };

    std::vector<double> sample_t;
    for (long k = 1;; ++k) {
        const double t = static_cast<double>(k) * cadence;
        if (t > t_end * (1.0 + 1e-12)) break;
        sample_t.push_back(std::min(t, t_end));
    }

    ObservationSet obs;
    for (std::size_t w = 0; w < ts.well_names.size(); ++w) {
        auto& wo = obs.at(ts.well_names[w]);
        const bool inj = ts.well_kinds[w] == WellKind::Injector;
        const auto col = [&](Quantity q) { return ts.column(w, q); };
        const auto bhp = col(Quantity::Bhp), wir = col(Quantity::Wir), wct = col(Quantity::Wct),
                   lpr = col(Quantity::Lpr), dx = col(Quantity::Dx), dy = col(Quantity::Dy);
        for (double t : sample_t) {
            wo.series[0].push_back({t, noisy(interp_at(times, bhp, t, ts.well_names[w]))});
            if (inj) {
                wo.series[1].push_back({t, noisy(interp_at(times, wir, t, ts.well_names[w]))});
                wo.series[3].push_back({t, noisy(interp_at(times, dx, t, ts.well_names[w]))});
                wo.series[4].push_back({t, noisy(interp_at(times, dy, t, ts.well_names[w]))});
            } else if (interp_at(times, lpr, t, ts.well_names[w]) > 0.0) {
                const double v = noisy(interp_at(times, wct, t, ts.well_names[w]));
                wo.series[2].push_back({t, std::clamp(v, 0.0, 1.0)});
            }
        }
    }
    return obs;
}

double interpolate_series(std::span<const double> times, std::span<const double> values, double t)
{
    return interp_at(times, values, t, "");
}

double series_deviation(std::span<const double> sim_times, std::span<const double> sim_values,
                        std::span<const ObsPoint> obs, const std::string& well)
{
    double sum = 0.0;
    for (const auto& p : obs) sum += std::abs(p.value - interp_at(sim_times, sim_values, p.time, well));
    return sum;
}

double total_objective(const std::array<double, kSeriesKinds>& alpha,
                       const std::array<double, kSeriesKinds>& mean,
                       const std::array<bool, kSeriesKinds>& present)
{
    double sum = 0.0;
    int active = 0;
    for (std::size_t k = 0; k < kSeriesKinds; ++k) {
        if (!present[k] || !(mean[k] >= 1e-9)) continue;
        sum += alpha[k] / mean[k];
        ++active;
    }
    if (active == 0) throw ConfigError("objective: no active observation series");
    return sum / active;
}

ObjectiveTerms objective_terms(const TimeSeries& sim, const ObservationSet& obs)
{
    ObjectiveTerms t;
    const auto times = sim.times();
    for (std::size_t k = 0; k < kSeriesKinds; ++k) {
        t.mean[k] = obs.mean(static_cast<SeriesKind>(k));
        t.active[k] = obs.count(static_cast<SeriesKind>(k)) > 0;
    }
    for (const auto& wo : obs.wells) {
        std::size_t w = sim.well_names.size();
        for (std::size_t i = 0; i < sim.well_names.size(); ++i)
            if (sim.well_names[i] == wo.well) w = i;
        if (w == sim.well_names.size()) throw ConfigError("observations name unknown well " + wo.well);
        for (std::size_t k = 0; k < kSeriesKinds; ++k) {
            if (wo.series[k].empty()) continue;
            const auto values = sim.column(w, quantity_of(static_cast<SeriesKind>(k)));
            t.alpha[k] += series_deviation(times, values, wo.series[k], wo.well);
        }
    }
    for (std::size_t k = 0; k < kSeriesKinds; ++k) t.active[k] = t.active[k] && t.mean[k] >= 1e-9;
    t.total = total_objective(t.alpha, t.mean, t.active);
    return t;
}

int variable_count_audit(int n)
{
    if (n < 1) throw ParameterError("n", "need at least one characteristic pressure point");
    return 12 * n + 1;
}

std::pair<double, double> characteristic_range(const Deck& deck, std::optional<double> p_min,
                                               std::optional<double> p_max)
{
    auto [lo, hi] = default_pressure_range(deck);
    if (deck.representative) {
        lo = deck.representative->p_min;
        hi = deck.representative->p_max;
    }
    if (p_min) lo = *p_min;
    if (p_max) hi = *p_max;
    if (!(lo < hi)) throw ConfigError("p_min must be below p_max");
    return {lo, hi};
}

Deck decode(const RepresentativeParams& theta, const Deck& base, double p_min, double p_max)
{
    const FvfTable baseline = base.fvf ? *base.fvf : FvfTable::linear_default(p_min, p_max);
    auto gen = tables_from_representative(theta, p_min, p_max, baseline);
    Deck d = base;
    d.representative.reset();
    d.rock = std::move(gen.rock);
    d.fvf = std::move(gen.fvf);
    d.fluid.c_water = gen.c_water;
    return d;
}

Evaluation evaluate(const RepresentativeParams& theta, const Deck& base, const ObservationSet& obs,
                    double p_min, double p_max)
{
    Evaluation ev;
    try {
        const Simulator sim(decode(theta, base, p_min, p_max));
        const RunResult run = sim.run();
        if (!run.stats.completed) {
            ev.failure = run.stats.failure;
            return ev;
        }
        ev.terms = objective_terms(run.series, obs);
        ev.ok = std::isfinite(ev.terms.total);
        if (!ev.ok) ev.failure = "non-finite objective";
    } catch (const Error& e) {
        ev.failure = e.what();
    }
    return ev;
}

MatchConfig parse_match_config(const std::string& text)
{
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("match config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("match config: expected a JSON object");
    MatchConfig c;
    auto number = [&](const std::string& key) {
        if (!j[key].is_number()) throw ConfigError("match config: " + key + " must be a number");
        return j[key].get<double>();
    };
    auto integer = [&](const std::string& key) {
        if (!j[key].is_number_integer()) throw ConfigError("match config: " + key + " must be an integer");
        return j[key].get<long long>();
    };
    for (const auto& [key, value] : j.items()) {
        if (key == "p_min") c.p_min = number(key);
        else if (key == "p_max") c.p_max = number(key);
        else if (key == "population") c.population = static_cast<int>(integer(key));
        else if (key == "sigma0") c.sigma0 = number(key);
        else if (key == "seed") c.seed = static_cast<std::uint64_t>(integer(key));
        else if (key == "max_evaluations") c.max_evaluations = static_cast<long>(integer(key));
        else if (key == "target") { if (!value.is_null()) c.target = number(key); }
        else if (key == "tolfun") c.tolfun = number(key);
        else if (key == "tolx") c.tolx = number(key);
        else if (key == "stagnation") c.stagnation = static_cast<int>(integer(key));
        else if (key == "jobs") c.jobs = static_cast<int>(integer(key));
        else if (key == "initial") c.initial = from_array(array_of(value, "match config initial"));
        else if (key == "bounds") {
            if (!value.is_object()) throw ConfigError("match config: bounds must be an object");
            ParamBounds b{};
            std::array<bool, kRepresentativeDim> set{};
            for (const auto& [name, iv] : value.items()) {
                std::size_t idx = 0;
                try {
                    idx = representative_index(name);
                } catch (const ParameterError&) {
                    throw ConfigError("match config: unknown bound " + name);
                }
                if (!iv.is_array() || iv.size() != 2 || !iv[0].is_number() || !iv[1].is_number())
                    throw ConfigError("match config: bound " + name + " must be [lower, upper]");
                b.box[idx] = Interval{iv[0].get<double>(), iv[1].get<double>()};
                set[idx] = true;
            }
            // Unlisted fields keep their reference ranges; p_b is filled in run_match.
            const auto ref = ParamBounds::defaults(0.0, 1.0);
            for (std::size_t i = 0; i < kRepresentativeDim; ++i)
                if (!set[i]) b.box[i] = i == representative_index("p_b") ? Interval{} : ref.box[i];
            c.bounds = b;
        } else {
            throw ConfigError("match config: unknown key " + key);
        }
    }
    return c;
}

TruthRecord parse_truth(const std::string& text)
{
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("truth file: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("truth file: expected a JSON object");
    TruthRecord t;
    t.theta = from_array(array_of(j, "truth file"));
    for (const auto& [key, value] : j.items()) {
        if (key == "p_min" || key == "p_max") {
            if (!value.is_number()) throw ConfigError("truth file: " + key + " must be a number");
            (key == "p_min" ? t.p_min : t.p_max) = value.get<double>();
            continue;
        }
        try {
            representative_index(key);
        } catch (const ParameterError&) {
            throw ConfigError("truth file: unknown key " + key);
        }
    }
    return t;
}

std::string truth_json(const RepresentativeParams& theta, double p_min, double p_max)
{
    ojson j = theta_json(theta);
    j["p_min"] = p_min;
    j["p_max"] = p_max;
    return j.dump(2) + "\n";
}

MatchReport run_match(const MatchConfig& config, const Deck& base, const ObservationSet& obs)
{
    obs.validate();
    const auto [p_min, p_max] = characteristic_range(base, config.p_min, config.p_max);

    ParamBounds bounds = config.bounds ? *config.bounds : ParamBounds::defaults(p_min, p_max);
    const std::size_t ib = representative_index("p_b");
    if (bounds.box[ib] == Interval{}) bounds.box[ib] = Interval{p_min, p_max};
    const double inset = 1e-3 * (p_max - p_min);
    bounds.box[ib].lower = std::max(bounds.box[ib].lower, p_min + inset);
    bounds.box[ib].upper = std::min(bounds.box[ib].upper, p_max - inset);
    check_valid(bounds);

    // Observation times must fall inside the schedule.
    double t_end = 0.0;
    for (const auto& st : base.schedule) t_end += st.duration;
    for (const auto& w : obs.wells) {
        try {
            base.well_index(w.well);
        } catch (const ParameterError&) {
            throw ConfigError("observations name unknown well " + w.well);
        }
        for (const auto& s : w.series)
            for (const auto& p : s)
                if (p.time < 0.0 || p.time > t_end * (1.0 + 1e-12))
                    throw ConfigError("observation of well " + w.well + " at t=" + format_number(p.time) +
                                      " d lies outside the schedule (0, " + format_number(t_end) + ")");
    }

    auto to_theta = [&](std::span<const double> u) {
        std::array<double, kRepresentativeDim> v{};
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            v[i] = bounds.box[i].lower + u[i] * (bounds.box[i].upper - bounds.box[i].lower);
        return from_array(v);
    };

    CmaesConfig cc;
    cc.mean.assign(kRepresentativeDim, 0.5);
    if (config.initial) {
        const auto v = to_array(*config.initial);
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            cc.mean[i] = std::clamp((v[i] - bounds.box[i].lower) / (bounds.box[i].upper - bounds.box[i].lower), 0.0, 1.0);
    }
    cc.sigma0 = config.sigma0;
    cc.lower.assign(kRepresentativeDim, 0.0);
    cc.upper.assign(kRepresentativeDim, 1.0);
    cc.population = config.population;
    cc.seed = config.seed;
    cc.max_evaluations = config.max_evaluations;
    cc.target = config.target;
    cc.tolfun = config.tolfun;
    cc.tolx = config.tolx;
    cc.stagnation = config.stagnation;
    try {
        cc.validate();
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("match config: ") + e.what());
    }

    Cmaes es(cc);
    TerminationMonitor monitor(es.config());
    MatchReport rep;
    rep.p_min = p_min;
    rep.p_max = p_max;
    rep.seed = config.seed;
    double best = std::numeric_limits<double>::infinity();
    double worst_ok = 0.0;
    bool have_best = false;

    for (;;) {
        const auto pop = es.ask();
        const auto evals = parallel_map(pop.size(), config.jobs, [&](std::size_t i) {
            return evaluate(to_theta(pop[i].feasible), base, obs, p_min, p_max);
        });
        rep.evaluations += static_cast<long>(pop.size());

        std::size_t ok = 0;
        for (const auto& e : evals) {
            if (!e.ok) continue;
            ++ok;
            worst_ok = std::max(worst_ok, e.terms.total);
        }
        if (ok == 0)
            throw MatchError("generation " + std::to_string(es.generation() + 1) +
                             ": every simulation failed; first failure: " + evals.front().failure);

        const double penalty = 10.0 * std::max(worst_ok, 1e3);
        std::vector<double> fitness(pop.size()), ranked(pop.size());
        double sum = 0.0, gen_best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pop.size(); ++i) {
            if (evals[i].ok) {
                fitness[i] = evals[i].terms.total;
                sum += fitness[i];
                gen_best = std::min(gen_best, fitness[i]);
                if (fitness[i] < best) {
                    best = fitness[i];
                    rep.best = to_theta(pop[i].feasible);
                    rep.best_terms = evals[i].terms;
                    have_best = true;
                }
            } else {
                fitness[i] = penalty;
                ++rep.failures;
            }
            ranked[i] = fitness[i] + pop[i].penalty;
        }
        es.tell(pop, ranked);
        rep.trace.push_back(TraceRow{es.generation(), rep.evaluations, gen_best,
                                     sum / static_cast<double>(ok), es.sigma()});
        if (auto why = monitor.check(es, fitness, best, rep.evaluations)) {
            rep.termination = *why;
            break;
        }
    }
    if (have_best) rep.best_run = Simulator(decode(rep.best, base, p_min, p_max)).run();
    return rep;
}

std::string report_json(const MatchReport& r, const ObservationSet& obs)
{
    ojson j;
    j["best"] = theta_json(r.best);
    j["p_min"] = r.p_min;
    j["p_max"] = r.p_max;
    ojson terms;
    terms["total"] = r.best_terms.total;
    for (std::size_t k = 0; k < kSeriesKinds; ++k) {
        terms[kSeriesNames[k]] = {{"deviation", r.best_terms.alpha[k]},
                                  {"observed_mean", r.best_terms.mean[k]},
                                  {"active", r.best_terms.active[k]}};
    }
    j["objective"] = terms;
    j["evaluations"] = r.evaluations;
    j["failed_evaluations"] = r.failures;
    j["seed"] = r.seed;
    j["termination"] = r.termination;
    auto trace = ojson::array();
    for (const auto& t : r.trace)
        trace.push_back({{"generation", t.generation},
                         {"evaluations", t.evaluations},
                         {"best", t.best_fitness},
                         {"mean", t.mean_fitness},
                         {"sigma", t.sigma}});
    j["trace"] = trace;

    auto fit = ojson::array();
    const auto& ts = r.best_run.series;
    if (!ts.rows.empty()) {
        const auto times = ts.times();
        for (const auto& wo : obs.wells) {
            std::size_t w = ts.well_names.size();
            for (std::size_t i = 0; i < ts.well_names.size(); ++i)
                if (ts.well_names[i] == wo.well) w = i;
            if (w == ts.well_names.size()) continue;
            for (std::size_t k = 0; k < kSeriesKinds; ++k) {
                if (wo.series[k].empty()) continue;
                const auto values = ts.column(w, quantity_of(static_cast<SeriesKind>(k)));
                auto pts = ojson::array();
                for (const auto& p : wo.series[k])
                    pts.push_back({p.time, p.value, interp_at(times, values, p.time, wo.well)});
                fit.push_back({{"well", wo.well}, {"series", kSeriesNames[k]}, {"time_obs_sim", pts}});
            }
        }
    }
    j["fit"] = fit;
    return j.dump(2) + "\n";
}

} // namespace fracflood
