#include "fracflood/cmaes.hpp"
#include "fracflood/deck_io.hpp"
#include "fracflood/error.hpp"
#include "fracflood/histmatch.hpp"
#include "fracflood/property_model.hpp"
#include "fracflood/results_io.hpp"
#include "fracflood/simulator.hpp"
#include "fracflood/welltest.hpp"

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace fracflood;

namespace {

Quantity quantity_from(const std::string& name)
{
    static const std::pair<const char*, Quantity> table[] = {
        {"bhp", Quantity::Bhp}, {"wir", Quantity::Wir}, {"lpr", Quantity::Lpr}, {"opr", Quantity::Opr},
        {"wpr", Quantity::Wpr}, {"wct", Quantity::Wct}, {"dx", Quantity::Dx},   {"dy", Quantity::Dy}};
    for (const auto& [n, q] : table)
        if (name == n) return q;
    throw ConfigError("unknown quantity '" + name + "'");
}

RepresentativeParams theta_from(const py::dict& d)
{
    std::array<double, kRepresentativeDim> v{};
    std::size_t seen = 0;
    for (const auto& [key, value] : d) {
        v[representative_index(py::cast<std::string>(key))] = py::cast<double>(value);
        ++seen;
    }
    if (seen != kRepresentativeDim) throw ConfigError("theta needs all 11 representative fields");
    return from_array(v);
}

py::dict theta_dict(const RepresentativeParams& theta)
{
    py::dict d;
    const auto v = to_array(theta);
    for (std::size_t i = 0; i < kRepresentativeDim; ++i) d[py::str(std::string(kRepresentativeNames[i]))] = v[i];
    return d;
}

py::list table_rows(const RockTable& t)
{
    py::list rows;
    for (const auto& r : t.rows()) rows.append(py::make_tuple(r.pressure, r.pv_mult, r.tx_mult, r.ty_mult, r.tz_mult));
    return rows;
}

} // namespace

PYBIND11_MODULE(_fracflood, m)
{
    m.doc() = "Dual-porosity/dual-permeability fracturing-flooding simulator core";

    auto base = py::register_exception<Error>(m, "FracfloodError", PyExc_RuntimeError);
    py::register_exception<DeckError>(m, "DeckError", base.ptr());
    py::register_exception<ParameterError>(m, "ParameterError", base.ptr());
    py::register_exception<StateError>(m, "StateError", base.ptr());
    py::register_exception<SolverError>(m, "SolverError", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<MatchError>(m, "MatchError", base.ptr());

    py::class_<Deck>(m, "Deck")
        .def_property_readonly("shape", [](const Deck& d) { return py::make_tuple(d.grid.nx(), d.grid.ny(), d.grid.nz()); })
        .def_property_readonly("wells", [](const Deck& d) {
            std::vector<std::string> names;
            for (const auto& w : d.wells) names.push_back(w.name);
            return names;
        })
        .def_property_readonly("stages", [](const Deck& d) {
            std::vector<std::pair<std::string, double>> s;
            for (const auto& st : d.schedule) s.emplace_back(st.name, st.duration);
            return s;
        })
        .def("to_text", &write_deck)
        .def("__eq__", [](const Deck& a, const Deck& b) { return a == b; });

    m.def("parse_deck", [](const std::string& text) { return parse_deck(text); }, py::arg("text"));
    m.def("load_deck", &load_deck, py::arg("path"));

    py::class_<RunResult>(m, "RunResult")
        .def_property_readonly("completed", [](const RunResult& r) { return r.stats.completed; })
        .def_property_readonly("failure", [](const RunResult& r) { return r.stats.failure; })
        .def_property_readonly("times", [](const RunResult& r) { return r.series.times(); })
        .def_property_readonly("wells", [](const RunResult& r) { return r.series.well_names; })
        .def_property_readonly("field_avg_p", [](const RunResult& r) {
            std::vector<double> v;
            for (const auto& row : r.series.rows) v.push_back(row.field_avg_p);
            return v;
        })
        .def_property_readonly("balance_error", [](const RunResult& r) {
            return py::dict(py::arg("oil") = r.balance.oil_error, py::arg("water") = r.balance.water_error);
        })
        .def("column", [](const RunResult& r, const std::string& well, const std::string& quantity) {
            for (std::size_t w = 0; w < r.series.well_names.size(); ++w)
                if (r.series.well_names[w] == well) return r.series.column(w, quantity_from(quantity));
            throw ConfigError("unknown well '" + well + "'");
        }, py::arg("well"), py::arg("quantity"))
        .def("series_csv", [](const RunResult& r) { return series_csv(r.series); })
        .def("summary_json", [](const RunResult& r) { return summary_json(r); });

    m.def("simulate", [](const Deck& deck) {
        py::gil_scoped_release release;
        return Simulator(deck).run();
    }, py::arg("deck"));

    m.def("laplace_pwd", [](double s, double omega_f, double lambda, double km0, double cd, double skin) {
        return laplace_pwd(s, DimensionlessParams::make(omega_f, lambda, km0, cd, skin));
    }, py::arg("s"), py::arg("omega_f"), py::arg("lam"), py::arg("km0") = 0.0, py::arg("cd") = 0.0, py::arg("skin") = 0.0);
    m.def("type_curve", [](const std::vector<double>& t_d, double omega_f, double lambda, double km0, double cd,
                           double skin, int n_terms) {
        std::vector<std::tuple<double, double, double>> out;
        for (const auto& p : type_curve(DimensionlessParams::make(omega_f, lambda, km0, cd, skin), t_d, n_terms))
            out.emplace_back(p.t_d, p.p_wd, p.derivative);
        return out;
    }, py::arg("t_d"), py::arg("omega_f"), py::arg("lam"), py::arg("km0") = 0.0, py::arg("cd") = 0.0,
       py::arg("skin") = 0.0, py::arg("n_terms") = 12);
    m.def("stehfest_invert", &stehfest_invert, py::arg("transform"), py::arg("t"), py::arg("n_terms") = 12);
    m.def("stehfest_coefficients", &stehfest_coefficients, py::arg("n_terms"));

    m.def("default_weights", &default_weights, py::arg("mu"));
    m.def("minimize", [](const std::function<double(std::vector<double>)>& f, std::vector<double> mean,
                         std::vector<double> lower, std::vector<double> upper, double sigma0, std::uint64_t seed,
                         long max_evaluations, std::optional<double> target, int population) {
        CmaesConfig c;
        c.mean = std::move(mean);
        c.lower = std::move(lower);
        c.upper = std::move(upper);
        c.sigma0 = sigma0;
        c.seed = seed;
        c.max_evaluations = max_evaluations;
        c.target = target;
        c.population = population;
        // Python callables run on the calling thread only.
        const auto r = minimize([&](std::span<const double> x) { return f({x.begin(), x.end()}); }, c, 1);
        py::dict d;
        d["x"] = r.best_x;
        d["fitness"] = r.best_fitness;
        d["evaluations"] = r.evaluations;
        d["termination"] = r.termination;
        d["trace"] = trace_csv(r.trace);
        return d;
    }, py::arg("f"), py::arg("mean"), py::arg("lower"), py::arg("upper"), py::arg("sigma0") = 0.3,
       py::arg("seed") = 1, py::arg("max_evaluations") = 10000, py::arg("target") = py::none(),
       py::arg("population") = 0);

    m.attr("representative_names") = [] {
        std::vector<std::string> v;
        for (auto n : kRepresentativeNames) v.emplace_back(n);
        return v;
    }();
    m.def("variable_count_audit", &variable_count_audit, py::arg("n"));
    m.def("default_bounds", [](double p_min, double p_max) {
        const auto b = ParamBounds::defaults(p_min, p_max);
        py::dict d;
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            d[py::str(std::string(kRepresentativeNames[i]))] = py::make_tuple(b.box[i].lower, b.box[i].upper);
        return d;
    }, py::arg("p_min"), py::arg("p_max"));
    m.def("rock_tables", [](const py::dict& theta, double p_min, double p_max) {
        const auto g = tables_from_representative(theta_from(theta), p_min, p_max, FvfTable::linear_default(p_min, p_max));
        return py::make_tuple(table_rows(g.rock.matrix), table_rows(g.rock.fracture));
    }, py::arg("theta"), py::arg("p_min"), py::arg("p_max"));
    m.def("total_objective", [](std::array<double, kSeriesKinds> alpha, std::array<double, kSeriesKinds> mean,
                                std::array<bool, kSeriesKinds> present) { return total_objective(alpha, mean, present); },
          py::arg("alpha"), py::arg("mean"), py::arg("present"));

    m.def("generate_observations", [](const Deck& deck, const py::dict& theta, const std::string& out_dir,
                                      double cadence, double noise, std::uint64_t seed) {
        const auto th = theta_from(theta);
        const auto [lo, hi] = characteristic_range(deck, std::nullopt, std::nullopt);
        RunResult run;
        {
            py::gil_scoped_release release;
            run = Simulator(decode(th, deck, lo, hi)).run();
        }
        if (!run.stats.completed) throw SolverError(run.stats.failure);
        write_observations(sample_observations(run, cadence, noise, seed), out_dir);
    }, py::arg("deck"), py::arg("theta"), py::arg("out_dir"), py::arg("cadence") = 5.0, py::arg("noise") = 0.0,
       py::arg("seed") = 1);
    m.def("history_match", [](const Deck& deck, const std::string& obs_dir, const std::string& config_json) {
        const auto obs = load_observations(obs_dir);
        const auto cfg = parse_match_config(config_json);
        MatchReport report;
        {
            py::gil_scoped_release release;
            report = run_match(cfg, deck, obs);
        }
        return py::make_tuple(theta_dict(report.best), report.best_terms.total, report_json(report, obs));
    }, py::arg("deck"), py::arg("obs_dir"), py::arg("config_json"));
}
