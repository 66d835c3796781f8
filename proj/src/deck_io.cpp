#include "fracflood/deck_io.hpp"

#include "fracflood/error.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace fracflood {

namespace {

constexpr std::array<std::string_view, 12> kSections = {
    "GRID", "PROPS", "ROCKTAB_MATRIX", "ROCKTAB_FRACTURE", "REPRESENTATIVE", "FVF",
    "RELPERM", "FLUID", "WELLS", "SCHEDULE", "INIT", "NUMERICS"};

bool is_table_section(std::string_view s)
{
    return s == "ROCKTAB_MATRIX" || s == "ROCKTAB_FRACTURE" || s == "FVF" || s == "RELPERM";
}

struct Entry {
    int line = 0;
    std::string key; // empty for table rows
    std::vector<std::string> tokens;
};

struct Section {
    int line = 0;
    std::vector<Entry> entries;
};

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double to_number(const std::string& tok, int line)
{
    double v = 0.0;
    const char* first = tok.data();
    if (!tok.empty() && tok.front() == '+') ++first;
    const auto res = std::from_chars(first, tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw DeckError("expected a number, got '" + tok + "'", line);
    return v;
}

int to_int(const std::string& tok, int line)
{
    int v = 0;
    const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
        throw DeckError("expected an integer, got '" + tok + "'", line);
    return v;
}

std::vector<double> numbers(const Entry& e)
{
    std::vector<double> v;
    v.reserve(e.tokens.size());
    for (const auto& t : e.tokens) v.push_back(to_number(t, e.line));
    return v;
}

/// Key-value view of a section. Keys listed in `repeatable` may occur more
/// than once and are consumed in order by the caller.
class KeyValues {
public:
    KeyValues(std::string name, const Section& sec, std::vector<std::string_view> allowed,
              std::vector<std::string_view> repeatable = {})
        : name_(std::move(name)), line_(sec.line)
    {
        for (const auto& e : sec.entries) {
            if (e.key.empty())
                throw DeckError(name_ + ": expected 'key = value'", e.line);
            const bool rep = std::find(repeatable.begin(), repeatable.end(), e.key) != repeatable.end();
            if (!rep && std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
                throw DeckError(name_ + ": unknown key '" + e.key + "'", e.line);
            if (e.tokens.empty()) throw DeckError(name_ + ": key '" + e.key + "' has no value", e.line);
            if (rep) {
                ordered_.push_back(e);
            } else if (!single_.emplace(e.key, e).second) {
                throw DeckError(name_ + ": duplicate key '" + e.key + "'", e.line);
            }
        }
    }

    bool has(const std::string& key) const { return single_.count(key) > 0; }

    const Entry& entry(const std::string& key) const
    {
        auto it = single_.find(key);
        if (it == single_.end())
            throw DeckError(name_ + ": missing required key '" + key + "'", line_);
        return it->second;
    }

    std::vector<double> list(const std::string& key) const { return numbers(entry(key)); }

    double scalar(const std::string& key) const
    {
        const auto& e = entry(key);
        if (e.tokens.size() != 1) throw DeckError(name_ + ": '" + key + "' takes one value", e.line);
        return to_number(e.tokens.front(), e.line);
    }

    double scalar_or(const std::string& key, double fallback) const
    {
        return has(key) ? scalar(key) : fallback;
    }

    const std::vector<Entry>& ordered() const { return ordered_; }

private:
    std::string name_;
    int line_;
    std::map<std::string, Entry> single_;
    std::vector<Entry> ordered_;
};

std::vector<RockRow> rock_rows(const std::string& name, const Section& sec)
{
    std::vector<RockRow> rows;
    for (const auto& e : sec.entries) {
        if (!e.key.empty()) throw DeckError(name + ": expected a numeric row", e.line);
        const auto v = numbers(e);
        if (v.size() != 5)
            throw DeckError(name + ": row needs 5 columns (p pv_mult tx_mult ty_mult tz_mult)", e.line);
        rows.push_back({v[0], v[1], v[2], v[3], v[4]});
    }
    if (auto bad = validate_monotone(rows)) {
        const int line = sec.entries[bad->row - 1].line;
        throw DeckError(name + ": column " + bad->column + " not strictly increasing", line);
    }
    if (rows.size() < 2) throw DeckError(name + ": needs at least 2 rows", sec.line);
    return rows;
}

template <class F>
auto with_line(int line, F&& f) -> decltype(f())
{
    try {
        return f();
    } catch (const DeckError&) {
        throw;
    } catch (const Error& e) {
        throw DeckError(e.what(), line);
    }
}

WellControl parse_control(const Entry& e)
{
    // control = NAME shut | NAME rate TARGET LIMIT | NAME bhp TARGET
    const auto& t = e.tokens;
    if (t.size() < 2) throw DeckError("SCHEDULE: control needs a well name and a mode", e.line);
    WellControl c;
    if (t[1] == "shut" && t.size() == 2) {
        c.mode = WellControl::Mode::Shut;
    } else if (t[1] == "rate" && t.size() == 4) {
        c.mode = WellControl::Mode::Rate;
        c.target = to_number(t[2], e.line);
        c.bhp_limit = to_number(t[3], e.line);
    } else if (t[1] == "bhp" && t.size() == 3) {
        c.mode = WellControl::Mode::Bhp;
        c.target = to_number(t[2], e.line);
    } else {
        throw DeckError("SCHEDULE: control must be 'NAME shut', 'NAME rate TARGET BHP_LIMIT' or "
                        "'NAME bhp TARGET'",
                        e.line);
    }
    return c;
}

std::vector<double> expand_to(std::vector<double> v, std::size_t n, const std::string& what, int line)
{
    if (v.size() == 1) return std::vector<double>(n, v.front());
    if (v.size() != n)
        throw DeckError(what + ": expected 1 or " + std::to_string(n) + " values, got " +
                            std::to_string(v.size()),
                        line);
    return v;
}

} // namespace

std::string format_number(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

Deck parse_deck(std::string_view text)
{
    std::map<std::string, Section, std::less<>> sections;
    Section* current = nullptr;
    std::string current_name;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (auto h = raw.find('#'); h != std::string_view::npos) raw = raw.substr(0, h);
        raw = trim(raw);
        if (raw.empty()) continue;

        if (raw.front() == '[') {
            if (raw.back() != ']') throw DeckError("malformed section header", line_no);
            const std::string name(trim(raw.substr(1, raw.size() - 2)));
            if (std::find(kSections.begin(), kSections.end(), name) == kSections.end())
                throw DeckError("unknown section [" + name + "]", line_no);
            if (sections.count(name)) throw DeckError("duplicate section [" + name + "]", line_no);
            current = &sections[name];
            current->line = line_no;
            current_name = name;
            continue;
        }
        if (!current) throw DeckError("content before the first section header", line_no);

        Entry e;
        e.line = line_no;
        if (const auto eq = raw.find('='); eq != std::string_view::npos) {
            e.key = std::string(trim(raw.substr(0, eq)));
            if (e.key.empty()) throw DeckError("missing key before '='", line_no);
            e.tokens = split(raw.substr(eq + 1));
            if (is_table_section(current_name))
                throw DeckError(current_name + ": expected a numeric row", line_no);
        } else {
            e.tokens = split(raw);
            if (!is_table_section(current_name))
                throw DeckError(current_name + ": expected 'key = value'", line_no);
        }
        current->entries.push_back(std::move(e));
    }
    const int eof_line = line_no;

    auto require = [&](const char* name, const char* label) -> const Section& {
        auto it = sections.find(name);
        if (it == sections.end())
            throw DeckError(std::string("missing required section [") + name + "] (" + label + ")",
                            eof_line);
        return it->second;
    };

    // GRID
    const Section& grid_sec = require("GRID", "grid");
    KeyValues gkv("GRID", grid_sec, {"nx", "ny", "nz", "dx", "dy", "dz", "depth", "top"});
    const int nx = to_int(gkv.entry("nx").tokens.at(0), gkv.entry("nx").line);
    const int ny = to_int(gkv.entry("ny").tokens.at(0), gkv.entry("ny").line);
    const int nz = to_int(gkv.entry("nz").tokens.at(0), gkv.entry("nz").line);
    if (nx <= 0 || ny <= 0 || nz <= 0) throw DeckError("GRID: dimensions must be positive", grid_sec.line);
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    const auto dx = expand_to(gkv.list("dx"), n, "GRID dx", gkv.entry("dx").line);
    const auto dy = expand_to(gkv.list("dy"), n, "GRID dy", gkv.entry("dy").line);
    const auto dz = expand_to(gkv.list("dz"), n, "GRID dz", gkv.entry("dz").line);
    std::vector<double> depth;
    if (gkv.has("depth") && gkv.has("top"))
        throw DeckError("GRID: give either depth or top, not both", gkv.entry("top").line);
    if (gkv.has("depth")) {
        depth = expand_to(gkv.list("depth"), n, "GRID depth", gkv.entry("depth").line);
    } else if (gkv.has("top")) {
        depth = depths_from_top(gkv.scalar("top"), nx, ny, nz, dz);
    } else {
        throw DeckError("GRID: missing required key 'depth' or 'top'", grid_sec.line);
    }
    Grid grid = with_line(grid_sec.line, [&] { return Grid(nx, ny, nz, dx, dy, dz, depth); });

    // PROPS
    const Section& props_sec = require("PROPS", "cell properties");
    KeyValues pkv("PROPS", props_sec, {"permx", "permy", "permz", "poro", "ntg"});
    CellProps props;
    props.permx = expand_to(pkv.list("permx"), n, "PROPS permx", pkv.entry("permx").line);
    props.permy = pkv.has("permy") ? expand_to(pkv.list("permy"), n, "PROPS permy", pkv.entry("permy").line)
                                   : props.permx;
    props.permz = pkv.has("permz") ? expand_to(pkv.list("permz"), n, "PROPS permz", pkv.entry("permz").line)
                                   : props.permx;
    props.poro = expand_to(pkv.list("poro"), n, "PROPS poro", pkv.entry("poro").line);
    props.ntg = pkv.has("ntg") ? expand_to(pkv.list("ntg"), n, "PROPS ntg", pkv.entry("ntg").line)
                               : std::vector<double>(n, 1.0);

    // FLUID
    const Section& fluid_sec = require("FLUID", "fluid");
    KeyValues fkv("FLUID", fluid_sec, {"rho_o", "rho_w", "c_oil", "c_water", "mu_o", "mu_w", "p_ref"});
    FluidSpec fluid;
    fluid.rho_o0 = fkv.scalar("rho_o");
    fluid.rho_w0 = fkv.scalar("rho_w");
    fluid.c_oil = fkv.scalar("c_oil");
    fluid.c_water = fkv.scalar("c_water");
    fluid.mu_o = fkv.scalar("mu_o");
    fluid.mu_w = fkv.scalar("mu_w");
    fluid.p_ref = fkv.scalar("p_ref");
    with_line(fluid_sec.line, [&] { fluid.validate(); return 0; });

    // RELPERM
    const Section& rp_sec = require("RELPERM", "relative permeability");
    std::vector<RelPermRow> rp_rows;
    std::size_t rp_cols = 0;
    for (const auto& e : rp_sec.entries) {
        const auto v = numbers(e);
        if (v.size() != 3 && v.size() != 4)
            throw DeckError("RELPERM: row needs 3 or 4 columns (sw krw kro [pcow])", e.line);
        if (rp_cols == 0) rp_cols = v.size();
        if (v.size() != rp_cols) throw DeckError("RELPERM: inconsistent column count", e.line);
        rp_rows.push_back({v[0], v[1], v[2], v.size() == 4 ? v[3] : 0.0});
    }
    RelPermTable relperm = with_line(rp_sec.line, [&] { return RelPermTable(rp_rows, rp_cols == 4); });

    // Rock tables
    std::optional<RockTablePair> rock;
    const bool has_m = sections.count("ROCKTAB_MATRIX") > 0;
    const bool has_f = sections.count("ROCKTAB_FRACTURE") > 0;
    if (has_m != has_f)
        throw DeckError("ROCKTAB_MATRIX and ROCKTAB_FRACTURE must be given together",
                        has_m ? sections.at("ROCKTAB_MATRIX").line : sections.at("ROCKTAB_FRACTURE").line);
    if (has_m) {
        rock = RockTablePair{RockTable(rock_rows("ROCKTAB_MATRIX", sections.at("ROCKTAB_MATRIX"))),
                             RockTable(rock_rows("ROCKTAB_FRACTURE", sections.at("ROCKTAB_FRACTURE")))};
    }
    std::optional<RepresentativeSpec> representative;
    if (auto it = sections.find("REPRESENTATIVE"); it != sections.end()) {
        std::vector<std::string_view> keys(kRepresentativeNames.begin(), kRepresentativeNames.end());
        keys.push_back("p_min");
        keys.push_back("p_max");
        KeyValues rkv("REPRESENTATIVE", it->second, keys);
        std::array<double, kRepresentativeDim> v{};
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            v[i] = rkv.scalar(std::string(kRepresentativeNames[i]));
        representative = RepresentativeSpec{from_array(v), rkv.scalar("p_min"), rkv.scalar("p_max")};
        if (rock)
            throw DeckError("REPRESENTATIVE conflicts with explicit ROCKTAB sections", it->second.line);
    }
    if (!rock && !representative)
        throw DeckError("missing rock tables: give [ROCKTAB_MATRIX] and [ROCKTAB_FRACTURE] or "
                        "[REPRESENTATIVE]",
                        eof_line);

    // FVF
    std::optional<FvfTable> fvf;
    if (auto it = sections.find("FVF"); it != sections.end()) {
        std::vector<FvfRow> rows;
        for (const auto& e : it->second.entries) {
            const auto v = numbers(e);
            if (v.size() != 2) throw DeckError("FVF: row needs 2 columns (p fvf)", e.line);
            rows.push_back({v[0], v[1]});
        }
        fvf = with_line(it->second.line, [&] { return FvfTable(rows); });
    }

    // WELLS
    std::vector<WellSpec> wells;
    std::map<std::string, int> well_lines;
    if (auto it = sections.find("WELLS"); it != sections.end()) {
        KeyValues wkv("WELLS", it->second, {}, {"well"});
        for (const auto& e : wkv.ordered()) {
            const auto& t = e.tokens;
            if (t.size() < 5 || t.size() > 7)
                throw DeckError("WELLS: expected 'well = NAME injector|producer I J K [rw [skin]]'", e.line);
            WellSpec w;
            w.name = t[0];
            if (t[1] == "injector") w.kind = WellKind::Injector;
            else if (t[1] == "producer") w.kind = WellKind::Producer;
            else throw DeckError("WELLS: kind must be injector or producer", e.line);
            w.i = to_int(t[2], e.line) - 1;
            w.j = to_int(t[3], e.line) - 1;
            w.k = to_int(t[4], e.line) - 1;
            if (t.size() > 5) w.rw = to_number(t[5], e.line);
            if (t.size() > 6) w.skin = to_number(t[6], e.line);
            if (!well_lines.emplace(w.name, e.line).second)
                throw DeckError("WELLS: duplicate well name " + w.name, e.line);
            if (w.i < 0 || w.i >= nx || w.j < 0 || w.j >= ny || w.k < 0 || w.k >= nz)
                throw DeckError("WELLS: well " + w.name + " located outside the grid", e.line);
            wells.push_back(std::move(w));
        }
    }

    // SCHEDULE
    const Section& sched_sec = require("SCHEDULE", "schedule");
    KeyValues skv("SCHEDULE", sched_sec, {}, {"stage", "control"});
    std::vector<Stage> schedule;
    for (const auto& e : skv.ordered()) {
        if (e.key == "stage") {
            if (e.tokens.size() != 2) throw DeckError("SCHEDULE: expected 'stage = NAME DAYS'", e.line);
            Stage st;
            st.name = e.tokens[0];
            st.duration = to_number(e.tokens[1], e.line);
            if (!(st.duration >= 0.0)) throw DeckError("SCHEDULE: duration must be >= 0", e.line);
            schedule.push_back(std::move(st));
        } else {
            if (schedule.empty()) throw DeckError("SCHEDULE: control before the first stage", e.line);
            auto ctrl = parse_control(e);
            const std::string& name = e.tokens[0];
            if (!well_lines.count(name)) throw DeckError("SCHEDULE: unknown well " + name, e.line);
            for (const auto& [other, c] : schedule.back().controls)
                if (other == name) throw DeckError("SCHEDULE: well " + name + " controlled twice in stage", e.line);
            if (schedule.back().name == "soak" && ctrl.mode != WellControl::Mode::Shut)
                throw DeckError("SCHEDULE: soak stage must shut all wells", e.line);
            schedule.back().controls.emplace_back(name, ctrl);
        }
    }
    if (schedule.empty()) throw DeckError("schedule: no stages defined", sched_sec.line);

    // INIT
    const Section& init_sec = require("INIT", "initial conditions");
    KeyValues ikv("INIT", init_sec, {"pressure", "sw", "datum_depth"});
    InitSpec init;
    init.pressure = ikv.scalar("pressure");
    init.sw = ikv.scalar("sw");
    if (ikv.has("datum_depth")) init.datum_depth = ikv.scalar("datum_depth");

    // NUMERICS
    NumericsConfig num;
    if (auto it = sections.find("NUMERICS"); it != sections.end()) {
        KeyValues nkv("NUMERICS", it->second,
                      {"newton_tol", "mb_tol", "max_newton", "dt_init", "dt_max", "dt_min", "dt_growth",
                       "dt_chop", "report_interval", "dp_max", "ds_max", "extent_threshold",
                       "tmult_hysteresis"});
        num.newton_tol = nkv.scalar_or("newton_tol", num.newton_tol);
        num.mb_tol = nkv.scalar_or("mb_tol", num.mb_tol);
        if (nkv.has("max_newton"))
            num.max_newton = to_int(nkv.entry("max_newton").tokens.at(0), nkv.entry("max_newton").line);
        num.dt_init = nkv.scalar_or("dt_init", num.dt_init);
        num.dt_max = nkv.scalar_or("dt_max", num.dt_max);
        num.dt_min = nkv.scalar_or("dt_min", num.dt_min);
        num.dt_growth = nkv.scalar_or("dt_growth", num.dt_growth);
        num.dt_chop = nkv.scalar_or("dt_chop", num.dt_chop);
        num.report_interval = nkv.scalar_or("report_interval", num.report_interval);
        num.dp_max = nkv.scalar_or("dp_max", num.dp_max);
        num.ds_max = nkv.scalar_or("ds_max", num.ds_max);
        num.extent_threshold = nkv.scalar_or("extent_threshold", num.extent_threshold);
        num.tmult_hysteresis = nkv.scalar_or("tmult_hysteresis", num.tmult_hysteresis);
        with_line(it->second.line, [&] { num.validate(); return 0; });
    }

    Deck deck{std::move(grid),     std::move(props),          fluid,
              std::move(relperm),  std::move(rock),           std::move(representative),
              std::move(fvf),      std::move(wells),          std::move(schedule),
              init,                num};
    validate_deck(deck);
    return deck;
}

namespace {

void write_values(std::ostringstream& os, const char* key, const std::vector<double>& v)
{
    os << key << " =";
    const bool uniform = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
    if (uniform && !v.empty()) {
        os << ' ' << format_number(v.front());
    } else {
        for (double x : v) os << ' ' << format_number(x);
    }
    os << '\n';
}

void write_scalar(std::ostringstream& os, const char* key, double v)
{
    os << key << " = " << format_number(v) << '\n';
}

void write_rock(std::ostringstream& os, const char* name, const RockTable& t)
{
    os << '[' << name << "]\n# p_MPa pv_mult tx_mult ty_mult tz_mult\n";
    for (const auto& r : t.rows())
        os << format_number(r.pressure) << ' ' << format_number(r.pv_mult) << ' '
           << format_number(r.tx_mult) << ' ' << format_number(r.ty_mult) << ' '
           << format_number(r.tz_mult) << '\n';
    os << '\n';
}

} // namespace

std::string write_deck(const Deck& d)
{
    std::ostringstream os;
    const auto& g = d.grid;
    os << "[GRID]\n";
    os << "nx = " << g.nx() << "\nny = " << g.ny() << "\nnz = " << g.nz() << '\n';
    write_values(os, "dx", g.dx_values());
    write_values(os, "dy", g.dy_values());
    write_values(os, "dz", g.dz_values());
    write_values(os, "depth", g.depth_values());
    os << "\n[PROPS]\n";
    write_values(os, "permx", d.props.permx);
    write_values(os, "permy", d.props.permy);
    write_values(os, "permz", d.props.permz);
    write_values(os, "poro", d.props.poro);
    write_values(os, "ntg", d.props.ntg);

    os << "\n[FLUID]\n";
    write_scalar(os, "rho_o", d.fluid.rho_o0);
    write_scalar(os, "rho_w", d.fluid.rho_w0);
    write_scalar(os, "c_oil", d.fluid.c_oil);
    write_scalar(os, "c_water", d.fluid.c_water);
    write_scalar(os, "mu_o", d.fluid.mu_o);
    write_scalar(os, "mu_w", d.fluid.mu_w);
    write_scalar(os, "p_ref", d.fluid.p_ref);

    os << "\n[RELPERM]\n# sw krw kro" << (d.relperm.has_pcow() ? " pcow_MPa" : "") << '\n';
    for (const auto& r : d.relperm.rows()) {
        os << format_number(r.sw) << ' ' << format_number(r.krw) << ' ' << format_number(r.kro);
        if (d.relperm.has_pcow()) os << ' ' << format_number(r.pcow);
        os << '\n';
    }
    os << '\n';

    if (d.rock) {
        write_rock(os, "ROCKTAB_MATRIX", d.rock->matrix);
        write_rock(os, "ROCKTAB_FRACTURE", d.rock->fracture);
    }
    if (d.representative) {
        os << "[REPRESENTATIVE]\n";
        const auto v = to_array(d.representative->theta);
        for (std::size_t i = 0; i < kRepresentativeDim; ++i)
            os << kRepresentativeNames[i] << " = " << format_number(v[i]) << '\n';
        write_scalar(os, "p_min", d.representative->p_min);
        write_scalar(os, "p_max", d.representative->p_max);
        os << '\n';
    }
    if (d.fvf) {
        os << "[FVF]\n# p_MPa fvf\n";
        for (const auto& r : d.fvf->rows())
            os << format_number(r.pressure) << ' ' << format_number(r.fvf) << '\n';
        os << '\n';
    }

    if (!d.wells.empty()) {
        os << "[WELLS]\n# name kind i j k rw skin (1-based location)\n";
        for (const auto& w : d.wells)
            os << "well = " << w.name << ' '
               << (w.kind == WellKind::Injector ? "injector" : "producer") << ' ' << w.i + 1 << ' '
               << w.j + 1 << ' ' << w.k + 1 << ' ' << format_number(w.rw) << ' '
               << format_number(w.skin) << '\n';
        os << '\n';
    }

    os << "[SCHEDULE]\n";
    for (const auto& st : d.schedule) {
        os << "stage = " << st.name << ' ' << format_number(st.duration) << '\n';
        for (const auto& [name, c] : st.controls) {
            os << "control = " << name << ' ';
            switch (c.mode) {
            case WellControl::Mode::Shut: os << "shut"; break;
            case WellControl::Mode::Rate:
                os << "rate " << format_number(c.target) << ' ' << format_number(c.bhp_limit);
                break;
            case WellControl::Mode::Bhp: os << "bhp " << format_number(c.target); break;
            }
            os << '\n';
        }
    }

    os << "\n[INIT]\n";
    write_scalar(os, "pressure", d.init.pressure);
    write_scalar(os, "sw", d.init.sw);
    if (d.init.datum_depth) write_scalar(os, "datum_depth", *d.init.datum_depth);

    const auto& n = d.numerics;
    os << "\n[NUMERICS]\n";
    write_scalar(os, "newton_tol", n.newton_tol);
    write_scalar(os, "mb_tol", n.mb_tol);
    os << "max_newton = " << n.max_newton << '\n';
    write_scalar(os, "dt_init", n.dt_init);
    write_scalar(os, "dt_max", n.dt_max);
    write_scalar(os, "dt_min", n.dt_min);
    write_scalar(os, "dt_growth", n.dt_growth);
    write_scalar(os, "dt_chop", n.dt_chop);
    write_scalar(os, "report_interval", n.report_interval);
    write_scalar(os, "dp_max", n.dp_max);
    write_scalar(os, "ds_max", n.ds_max);
    write_scalar(os, "extent_threshold", n.extent_threshold);
    write_scalar(os, "tmult_hysteresis", n.tmult_hysteresis);
    return os.str();
}

Deck load_deck(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DeckError("cannot open deck file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_deck(ss.str());
    } catch (const DeckError& e) {
        throw e.prefixed(path.string());
    }
}

} // namespace fracflood
