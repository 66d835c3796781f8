#include "fracflood/results_io.hpp"

#include "fracflood/deck_io.hpp"

#include <json.hpp>

#include <sstream>

namespace fracflood {

std::vector<std::string> series_header(const TimeSeries& series)
{
    std::vector<std::string> h{"time_days"};
    for (std::size_t w = 0; w < series.well_names.size(); ++w) {
        const auto& n = series.well_names[w];
        for (const char* suffix : {"_bhp_MPa", "_wir_m3d", "_lpr_m3d", "_opr_m3d", "_wpr_m3d", "_wct"})
            h.push_back(n + suffix);
        if (series.well_kinds[w] == WellKind::Injector) {
            h.push_back(n + "_dx_m");
            h.push_back(n + "_dy_m");
        }
    }
    h.push_back("field_avg_p_MPa");
    h.push_back("field_p_coeff");
    return h;
}

void write_series_csv(const TimeSeries& series, std::ostream& out)
{
    const auto header = series_header(series);
    for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
    out << '\n';
    for (const auto& row : series.rows) {
        out << format_number(row.time);
        for (std::size_t w = 0; w < row.wells.size(); ++w) {
            const auto& r = row.wells[w];
            for (double v : {r.bhp, r.wir, r.lpr, r.opr, r.wpr, r.wct}) out << ',' << format_number(v);
            if (series.well_kinds[w] == WellKind::Injector)
                out << ',' << format_number(r.dx) << ',' << format_number(r.dy);
        }
        out << ',' << format_number(row.field_avg_p) << ',' << format_number(row.field_p_coeff) << '\n';
    }
}

std::string series_csv(const TimeSeries& series)
{
    std::ostringstream os;
    write_series_csv(series, os);
    return os.str();
}

std::string summary_json(const RunResult& r)
{
    nlohmann::ordered_json j;
    j["completed"] = r.stats.completed;
    if (!r.stats.completed) j["failure"] = r.stats.failure;
    j["accepted_steps"] = r.stats.accepted_steps;
    j["newton_iterations"] = r.stats.newton_iterations;
    j["timestep_chops"] = r.stats.chops;
    j["report_rows"] = r.series.rows.size();
    const auto& b = r.balance;
    j["material_balance"] = {
        {"oil",
         {{"injected", b.injected.oil},
          {"produced", b.produced.oil},
          {"initial_in_place", b.initial_in_place.oil},
          {"final_in_place", b.final_in_place.oil},
          {"relative_error", b.oil_error}}},
        {"water",
         {{"injected", b.injected.water},
          {"produced", b.produced.water},
          {"initial_in_place", b.initial_in_place.water},
          {"final_in_place", b.final_in_place.water},
          {"relative_error", b.water_error}}}};
    auto stages = nlohmann::ordered_json::array();
    for (const auto& s : r.stages)
        stages.push_back({{"name", s.name}, {"start_days", s.start}, {"end_days", s.end}});
    j["stages"] = stages;
    auto wells = nlohmann::ordered_json::array();
    for (std::size_t w = 0; w < r.series.well_names.size(); ++w) {
        wells.push_back({{"name", r.series.well_names[w]},
                         {"cum_water_injected", r.well_injected[w]},
                         {"cum_oil_produced", r.well_produced[w].oil},
                         {"cum_water_produced", r.well_produced[w].water}});
    }
    j["wells"] = wells;
    return j.dump(2) + "\n";
}

std::string timing_json(const RunResult& r)
{
    nlohmann::ordered_json j;
    j["wall_seconds"] = r.stats.wall_seconds;
    return j.dump(2) + "\n";
}

} // namespace fracflood
