#include "fracflood/reservoir_model.hpp"

#include "fracflood/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace fracflood {

namespace {

std::vector<double> expand(const std::vector<double>& v, std::size_t n, const char* name)
{
    if (v.size() == n) return v;
    if (v.size() == 1) return std::vector<double>(n, v.front());
    throw ParameterError(name, "expected 1 or " + std::to_string(n) + " values, got " +
                                   std::to_string(v.size()));
}

void require_positive(const std::vector<double>& v, const char* name)
{
    for (double x : v)
        if (!std::isfinite(x) || x <= 0.0) throw ParameterError(name, "must be positive");
}

} // namespace

Grid::Grid(int nx, int ny, int nz, std::vector<double> dx, std::vector<double> dy,
           std::vector<double> dz, std::vector<double> depth)
    : nx_(nx), ny_(ny), nz_(nz), n_(0)
{
    if (nx <= 0) throw ParameterError("nx", "must be positive");
    if (ny <= 0) throw ParameterError("ny", "must be positive");
    if (nz <= 0) throw ParameterError("nz", "must be positive");
    n_ = static_cast<std::size_t>(nx) * ny * nz;
    dx_ = expand(dx, n_, "dx");
    dy_ = expand(dy, n_, "dy");
    dz_ = expand(dz, n_, "dz");
    depth_ = expand(depth, n_, "depth");
    require_positive(dx_, "dx");
    require_positive(dy_, "dy");
    require_positive(dz_, "dz");
    for (double d : depth_)
        if (!std::isfinite(d)) throw ParameterError("depth", "must be finite");
}

std::array<int, 3> Grid::ijk(std::size_t cell) const noexcept
{
    const std::size_t g = geo(cell);
    const auto nx = static_cast<std::size_t>(nx_);
    const auto ny = static_cast<std::size_t>(ny_);
    return {static_cast<int>(g % nx), static_cast<int>((g / nx) % ny),
            static_cast<int>(g / (nx * ny))};
}

Grid build_dual_grid(int nx, int ny, int nz, const Spacing& spacing,
                     const std::vector<double>& depths)
{
    return Grid(nx, ny, nz, spacing.dx, spacing.dy, spacing.dz,
                depths.empty() ? std::vector<double>{0.0} : depths);
}

std::vector<double> depths_from_top(double top, int nx, int ny, int nz,
                                    const std::vector<double>& dz)
{
    const std::size_t n = static_cast<std::size_t>(nx) * ny * nz;
    const auto dzv = expand(dz, n, "dz");
    const std::size_t layer = static_cast<std::size_t>(nx) * ny;
    std::vector<double> d(n);
    for (std::size_t c = 0; c < layer; ++c) {
        double z = top;
        for (int k = 0; k < nz; ++k) {
            const std::size_t g = c + layer * k;
            d[g] = z + 0.5 * dzv[g];
            z += dzv[g];
        }
    }
    return d;
}

WellControl Stage::control_for(const std::string& well) const
{
    for (const auto& [name, ctrl] : controls)
        if (name == well) return ctrl;
    return WellControl{};
}

void NumericsConfig::validate() const
{
    auto positive = [](const char* name, double v) {
        if (!std::isfinite(v) || v <= 0.0) throw ParameterError(name, "must be positive");
    };
    positive("newton_tol", newton_tol);
    positive("mb_tol", mb_tol);
    if (max_newton < 1) throw ParameterError("max_newton", "must be at least 1");
    positive("dt_init", dt_init);
    positive("dt_max", dt_max);
    positive("dt_min", dt_min);
    if (!(dt_min <= dt_init && dt_init <= dt_max))
        throw ParameterError("dt_init", "need dt_min <= dt_init <= dt_max");
    if (!(dt_growth >= 1.0)) throw ParameterError("dt_growth", "must be >= 1");
    if (!(dt_chop > 0.0 && dt_chop < 1.0)) throw ParameterError("dt_chop", "must lie in (0,1)");
    positive("report_interval", report_interval);
    positive("dp_max", dp_max);
    positive("ds_max", ds_max);
    positive("extent_threshold", extent_threshold);
    if (!(tmult_hysteresis >= 0.0 && tmult_hysteresis <= 1.0))
        throw ParameterError("tmult_hysteresis", "must lie in [0,1]");
}

std::size_t Deck::well_index(const std::string& name) const
{
    for (std::size_t w = 0; w < wells.size(); ++w)
        if (wells[w].name == name) return w;
    throw ParameterError(name, "no such well");
}

void validate_deck(const Deck& deck)
{
    const std::size_t n = deck.grid.geo_cells();
    const auto& pr = deck.props;
    const std::pair<const char*, const std::vector<double>*> arrays[] = {
        {"permx", &pr.permx}, {"permy", &pr.permy}, {"permz", &pr.permz},
        {"poro", &pr.poro},   {"ntg", &pr.ntg}};
    for (const auto& [name, v] : arrays) {
        if (v->size() != n)
            throw DeckError(std::string("PROPS: ") + name + " has " + std::to_string(v->size()) +
                            " values, grid has " + std::to_string(n) + " cells");
    }
    for (std::size_t c = 0; c < n; ++c) {
        if (!(pr.permx[c] > 0 && pr.permy[c] > 0 && pr.permz[c] > 0))
            throw DeckError("PROPS: permeability must be positive");
        if (!(pr.poro[c] > 0 && pr.poro[c] < 1)) throw DeckError("PROPS: poro must lie in (0,1)");
        if (!(pr.ntg[c] > 0 && pr.ntg[c] <= 1)) throw DeckError("PROPS: ntg must lie in (0,1]");
    }

    if (!deck.rock && !deck.representative)
        throw DeckError("rock tables missing: need ROCKTAB_MATRIX and ROCKTAB_FRACTURE or REPRESENTATIVE");

    std::set<std::string> names;
    for (const auto& w : deck.wells) {
        if (!names.insert(w.name).second) throw DeckError("WELLS: duplicate well name " + w.name);
        if (w.i < 0 || w.i >= deck.grid.nx() || w.j < 0 || w.j >= deck.grid.ny() || w.k < 0 ||
            w.k >= deck.grid.nz())
            throw DeckError("WELLS: well " + w.name + " located outside the grid");
        if (!(w.rw > 0)) throw DeckError("WELLS: well " + w.name + " needs positive radius");
    }

    if (deck.schedule.empty()) throw DeckError("schedule: no stages");
    for (const auto& st : deck.schedule) {
        if (!(st.duration >= 0.0) || !std::isfinite(st.duration))
            throw DeckError("schedule: stage " + st.name + " has invalid duration");
        for (const auto& [name, ctrl] : st.controls) {
            if (!names.count(name))
                throw DeckError("schedule: stage " + st.name + " controls unknown well " + name);
            if (st.name == "soak" && ctrl.mode != WellControl::Mode::Shut)
                throw DeckError("schedule: soak stage must shut well " + name);
            if (ctrl.mode == WellControl::Mode::Rate && !(ctrl.target >= 0.0))
                throw DeckError("schedule: negative rate target for " + name);
            if (ctrl.mode == WellControl::Mode::Rate && !(ctrl.bhp_limit > 0.0))
                throw DeckError("schedule: rate control for " + name + " needs a positive bhp limit");
            if (ctrl.mode == WellControl::Mode::Bhp && !(ctrl.target > 0.0))
                throw DeckError("schedule: bhp target for " + name + " must be positive");
        }
    }

    if (!(deck.init.sw >= 0.0 && deck.init.sw <= 1.0)) throw DeckError("INIT: sw outside [0,1]");
    if (!(deck.init.pressure > 0.0)) throw DeckError("INIT: pressure must be positive");
    try {
        deck.fluid.validate();
        deck.numerics.validate();
    } catch (const ParameterError& e) {
        throw DeckError(e.what());
    }
    if (deck.representative) {
        const auto& r = *deck.representative;
        if (!(r.p_min < r.p_max)) throw DeckError("REPRESENTATIVE: p_min must be below p_max");
    }
}

std::pair<double, double> default_pressure_range(const Deck& deck)
{
    const double p_min = deck.init.pressure - 5.0;
    double hi = deck.init.pressure;
    for (const auto& st : deck.schedule) {
        for (const auto& [name, ctrl] : st.controls) {
            const auto& w = deck.wells[deck.well_index(name)];
            if (w.kind != WellKind::Injector) continue;
            if (ctrl.mode == WellControl::Mode::Rate) hi = std::max(hi, ctrl.bhp_limit);
            if (ctrl.mode == WellControl::Mode::Bhp) hi = std::max(hi, ctrl.target);
        }
    }
    return {p_min, hi + 2.0};
}

ResolvedTables resolve_tables(const Deck& deck)
{
    if (deck.rock) {
        FvfTable fvf = deck.fvf ? *deck.fvf : [&] {
            const auto [lo, hi] = default_pressure_range(deck);
            return FvfTable::linear_default(lo, hi);
        }();
        return ResolvedTables{*deck.rock, std::move(fvf), deck.fluid.c_water};
    }
    if (!deck.representative) throw DeckError("rock tables missing");
    const auto& r = *deck.representative;
    const FvfTable baseline = deck.fvf ? *deck.fvf : FvfTable::linear_default(r.p_min, r.p_max);
    auto gen = tables_from_representative(r.theta, r.p_min, r.p_max, baseline);
    return ResolvedTables{std::move(gen.rock), std::move(gen.fvf), gen.c_water};
}

SimState init_state(const Deck& deck)
{
    validate_deck(deck);
    const auto& g = deck.grid;
    const std::size_t n = g.geo_cells();
    SimState s;
    s.p.resize(2 * n);
    s.sw.assign(2 * n, deck.init.sw);

    const double sw = deck.init.sw;
    const double rho = sw * deck.fluid.rho_w0 + (1.0 - sw) * deck.fluid.rho_o0;
    for (std::size_t c = 0; c < n; ++c) {
        double p = deck.init.pressure;
        if (deck.init.datum_depth) p += rho * kGravity * (g.depth(c) - *deck.init.datum_depth) * 1e-6;
        if (!(p > 0.0)) throw StateError("initial pressure non-positive in cell " + std::to_string(c));
        s.p[c] = p;
        s.p[c + n] = p;
    }
    s.p_peak = s.p;

    s.bhp.resize(deck.wells.size());
    for (std::size_t w = 0; w < deck.wells.size(); ++w) {
        const auto& ws = deck.wells[w];
        s.bhp[w] = s.p[g.index(ws.i, ws.j, ws.k)];
    }
    s.time = 0.0;
    return s;
}

double peaceman_radius(double dx, double dy, double kx, double ky)
{
    const double ryx = std::sqrt(ky / kx);
    const double rxy = std::sqrt(kx / ky);
    return 0.28 * std::sqrt(ryx * dx * dx + rxy * dy * dy) /
           (std::pow(ky / kx, 0.25) + std::pow(kx / ky, 0.25));
}

double peaceman_wi(double dx, double dy, double dz, double kx, double ky, double rw, double skin)
{
    const double req = peaceman_radius(dx, dy, kx, ky);
    if (!(req > rw))
        throw ParameterError("rw", "well radius " + std::to_string(rw) +
                                       " m not below equivalent radius " + std::to_string(req));
    const double denom = std::log(req / rw) + skin;
    if (!(denom > 0.0)) throw ParameterError("skin", "log(r_eq/rw) + skin must be positive");
    return kDarcyUnit * 2.0 * std::numbers::pi * std::sqrt(kx * ky) * dz / denom;
}

} // namespace fracflood
