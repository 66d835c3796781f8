#include "fracflood/simulator.hpp"

#include "fracflood/dual.hpp"
#include "fracflood/error.hpp"

#include "linear_solver.hpp"


#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

namespace fracflood {

namespace {

using D2 = Dual<2>;
using D3 = Dual<3>;
using D4 = Dual<4>;

template <std::size_t M, std::size_t N>
Dual<M> lift(const Dual<N>& x, std::size_t offset)
{
    Dual<M> r(x.v);
    for (std::size_t i = 0; i < N; ++i) r.d[offset + i] = x.d[i];
    return r;
}

/// Cell properties as functions of the cell's own (p, sw).
template <class T>
struct CellEval {
    T inv_bo, inv_bw, kro, krw, pcow, rho_o, rho_w, pv;
    std::array<T, 3> tm;
};

const Deck& checked(const Deck& d)
{
    validate_deck(d);
    return d;
}

/// Surface rates out of the reservoir at one connection (injection negative).
template <class T>
std::pair<T, T> connection_flow(WellKind kind, double wi, const FluidSpec& f, const T& mult,
                                const CellEval<T>& e, const T& p, const T& bhp)
{
    if (kind == WellKind::Injector) {
        const T drive = bhp - p;
        if (value_of(drive) < 0.0) return {T(0.0), T(0.0)};
        const T q = wi * mult * (e.krw / f.mu_w + e.kro / f.mu_o) * e.inv_bw * drive;
        return {T(0.0), -q};
    }
    const T drive = p - bhp;
    if (value_of(drive) < 0.0) return {T(0.0), T(0.0)};
    const T base = wi * mult * drive;
    return {base * e.kro * e.inv_bo / f.mu_o, base * e.krw * e.inv_bw / f.mu_w};
}

bool bhp_controlled(const ActiveControl& c)
{
    return c.mode == WellControl::Mode::Bhp || (c.mode == WellControl::Mode::Rate && c.limited);
}

double bhp_target(const ActiveControl& c)
{
    return c.mode == WellControl::Mode::Bhp ? c.target : c.bhp_limit;
}

} // namespace

double WellReport::get(Quantity q) const
{
    switch (q) {
    case Quantity::Bhp: return bhp;
    case Quantity::Wir: return wir;
    case Quantity::Lpr: return lpr;
    case Quantity::Opr: return opr;
    case Quantity::Wpr: return wpr;
    case Quantity::Wct: return wct;
    case Quantity::Dx: return dx;
    case Quantity::Dy: return dy;
    }
    return 0.0;
}

std::vector<double> TimeSeries::times() const
{
    std::vector<double> t;
    t.reserve(rows.size());
    for (const auto& r : rows) t.push_back(r.time);
    return t;
}

std::vector<double> TimeSeries::column(std::size_t well, Quantity q) const
{
    std::vector<double> v;
    v.reserve(rows.size());
    for (const auto& r : rows) v.push_back(r.wells.at(well).get(q));
    return v;
}

double series_transmissibility(double k_i, double psi_i, double area_i, double half_len_i,
                               double k_j, double psi_j, double area_j, double half_len_j)
{
    const double ri = half_len_i / (k_i * psi_i * area_i);
    const double rj = half_len_j / (k_j * psi_j * area_j);
    return kDarcyUnit / (ri + rj);
}

double kazemi_shape_factor(double dx, double dy, double dz)
{
    return 4.0 * (1.0 / (dx * dx) + 1.0 / (dy * dy) + 1.0 / (dz * dz));
}

double balance_error(double injected, double produced, double initial, double final_)
{
    const double change = final_ - initial;
    const double scale =
        std::max({std::abs(injected), std::abs(produced), std::abs(initial), std::abs(final_)});
    if (scale == 0.0) return 0.0;
    return std::abs(injected - produced - change) / scale;
}

Simulator::Simulator(Deck deck)
    : deck_(std::move(deck)), tables_(resolve_tables(checked(deck_))), fluid_(deck_.fluid)
{
    fluid_.c_water = tables_.c_water;
    const auto& g = deck_.grid;
    const auto& pr = deck_.props;
    n_ = g.geo_cells();
    cells_ = 2 * n_;

    pv0_.resize(cells_);
    depth_.resize(cells_);
    for (std::size_t c = 0; c < cells_; ++c) {
        const std::size_t gc = g.geo(c);
        pv0_[c] = g.volume(c) * pr.poro[gc] * pr.ntg[gc];
        depth_[c] = g.depth(c);
    }

    auto half = [&](std::size_t gc, Axis axis) {
        const double ntg = pr.ntg[gc];
        switch (axis) {
        case Axis::X: return pr.permx[gc] * g.dy(gc) * g.dz(gc) * ntg / (0.5 * g.dx(gc));
        case Axis::Y: return pr.permy[gc] * g.dx(gc) * g.dz(gc) * ntg / (0.5 * g.dy(gc));
        case Axis::Z: return pr.permz[gc] * g.dx(gc) * g.dy(gc) / (0.5 * g.dz(gc));
        }
        return 0.0;
    };
    for (std::size_t off : {std::size_t{0}, n_}) {
        for (std::size_t gc = 0; gc < n_; ++gc) {
            const auto [i, j, k] = g.ijk(gc);
            const std::pair<bool, std::pair<std::size_t, Axis>> nb[] = {
                {i + 1 < g.nx(), {gc + 1, Axis::X}},
                {j + 1 < g.ny(), {gc + static_cast<std::size_t>(g.nx()), Axis::Y}},
                {k + 1 < g.nz(), {gc + static_cast<std::size_t>(g.nx()) * g.ny(), Axis::Z}}};
            for (const auto& [ok, e] : nb) {
                if (!ok) continue;
                faces_.push_back(Face{off + gc, off + e.first, e.second, half(gc, e.second),
                                      half(e.first, e.second)});
            }
        }
    }

    transfer_base_.resize(n_);
    for (std::size_t gc = 0; gc < n_; ++gc) {
        const double km = std::cbrt(pr.permx[gc] * pr.permy[gc] * pr.permz[gc]);
        transfer_base_[gc] =
            kDarcyUnit * kazemi_shape_factor(g.dx(gc), g.dy(gc), g.dz(gc)) * km * g.volume(gc);
    }

    wells_.resize(deck_.wells.size());
    for (std::size_t w = 0; w < deck_.wells.size(); ++w) {
        const auto& ws = deck_.wells[w];
        const std::size_t gc = g.index(ws.i, ws.j, ws.k);
        const double wi = peaceman_wi(g.dx(gc), g.dy(gc), g.dz(gc) * pr.ntg[gc], pr.permx[gc],
                                      pr.permy[gc], ws.rw, ws.skin);
        wells_[w] = {Connection{gc, wi}, Connection{gc + n_, wi}};
    }

    double dsum = 0.0, vsum = 0.0;
    for (std::size_t c = 0; c < cells_; ++c) {
        dsum += pv0_[c] * depth_[c];
        vsum += pv0_[c];
    }
    const double dmean = dsum / vsum;
    if (dmean > 0.0)
        p_hydro_ = deck_.fluid.rho_w0 * kGravity * dmean * 1e-6;
    else
        p_hydro_ = field_average_pressure(initial_state());
    p_extent_ref_ = shared_reference_pressure(tables_.rock);

    build_pattern();
}

void Simulator::build_pattern()
{
    using Trip = Eigen::Triplet<double>;
    std::vector<Trip> t;
    auto block = [&](std::size_t a, std::size_t b) {
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                t.emplace_back(static_cast<int>(eq(a) + r), static_cast<int>(eq(b) + c), 0.0);
    };
    for (std::size_t c = 0; c < cells_; ++c) block(c, c);
    for (const auto& f : faces_) {
        block(f.a, f.b);
        block(f.b, f.a);
    }
    for (std::size_t gc = 0; gc < n_; ++gc) {
        block(gc, gc + n_);
        block(gc + n_, gc);
    }
    for (std::size_t w = 0; w < wells_.size(); ++w) {
        const int wr = static_cast<int>(2 * cells_ + w);
        t.emplace_back(wr, wr, 0.0);
        for (const auto& conn : wells_[w]) {
            for (int k = 0; k < 2; ++k) {
                const int ci = static_cast<int>(eq(conn.cell) + k);
                t.emplace_back(ci, wr, 0.0);
                t.emplace_back(wr, ci, 0.0);
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(unknowns());
    pattern_.resize(n, n);
    pattern_.setFromTriplets(t.begin(), t.end());
    pattern_.makeCompressed();
}

const RockTable& Simulator::table_for(std::size_t cell) const noexcept
{
    return cell < n_ ? tables_.rock.matrix : tables_.rock.fracture;
}

template <class T>
T Simulator::effective_mult(const RockTable& table, Axis axis, const T& p, double peak) const
{
    const T psi = table.trans_mult(axis, p);
    const double eta = deck_.numerics.tmult_hysteresis;
    if (eta == 0.0 || value_of(p) >= peak) return psi;
    const double psi_peak = table.trans_mult(axis, peak);
    return psi + eta * (psi_peak - psi);
}

SimState Simulator::initial_state() const { return init_state(deck_); }

double Simulator::trans_mult(std::size_t cell, Axis axis, const SimState& s) const
{
    return effective_mult(table_for(cell), axis, s.p[cell], s.p_peak[cell]);
}

double Simulator::pore_volume(std::size_t cell, double p) const
{
    return pv0_[cell] * table_for(cell).pv_mult(p);
}

double Simulator::limit_pressure(double from, double to, std::size_t cell) const
{
    // Stop just past the first rock-table node crossed so the next
    // linearization sees the slope of the segment actually entered.
    const auto nodes = table_for(cell).pressures();
    constexpr double past = 1e-7;
    // A point already parked at a node crosses freely.
    if (to > from) {
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), from + 2 * past);
        if (it != nodes.end() && *it + past < to) return *it + past;
    } else if (to < from) {
        const auto it = std::lower_bound(nodes.begin(), nodes.end(), from - 2 * past);
        if (it != nodes.begin() && *(it - 1) - past > to) return *(it - 1) - past;
    }
    return to;
}

double Simulator::face_transmissibility(const Face& f, const SimState& s) const
{
    const double ta = f.half_a * trans_mult(f.a, f.axis, s);
    const double tb = f.half_b * trans_mult(f.b, f.axis, s);
    return kDarcyUnit / (1.0 / ta + 1.0 / tb);
}

double Simulator::transfer_coefficient(std::size_t geo, const SimState& s) const
{
    const double m = std::cbrt(trans_mult(geo, Axis::X, s) * trans_mult(geo, Axis::Y, s) *
                               trans_mult(geo, Axis::Z, s));
    return transfer_base_[geo] * m;
}

namespace {

template <class T>
CellEval<T> evaluate_cell(const RockTable& table, const FvfTable& fvf, const FluidSpec& fluid,
                          const RelPermTable& kr, const T& p, const T& sw,
                          const std::array<T, 3>& tm)
{
    CellEval<T> e;
    e.inv_bo = 1.0 / fvf.at(p);
    e.inv_bw = water_inv_fvf(fluid, p);
    e.kro = kr.kro(sw);
    e.krw = kr.krw(sw);
    e.pcow = kr.has_pcow() ? kr.pcow(sw) : T(0.0);
    e.rho_o = liquid_density(fluid, Phase::Oil, p);
    e.rho_w = liquid_density(fluid, Phase::Water, p);
    e.pv = table.pv_mult(p);
    e.tm = tm;
    return e;
}

} // namespace

std::vector<ActiveControl> Simulator::stage_controls(const Stage& stage) const
{
    std::vector<ActiveControl> out(deck_.wells.size());
    for (std::size_t w = 0; w < deck_.wells.size(); ++w) {
        const WellControl c = stage.control_for(deck_.wells[w].name);
        out[w] = ActiveControl{c.mode, c.target, c.bhp_limit, false};
    }
    return out;
}

void Simulator::assemble(const SimState& x, const SimState& old, double dt,
                         std::span<const ActiveControl> controls, Eigen::VectorXd& r,
                         Jacobian* jac) const
{
    const auto nunk = static_cast<Eigen::Index>(unknowns());
    r.setZero(nunk);
    if (jac) *jac = pattern_;
    auto add = [&](std::size_t row, std::size_t col, double v) {
        if (jac) jac->coeffRef(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) += v;
    };

    std::vector<CellEval<D2>> ev(cells_);
    for (std::size_t c = 0; c < cells_; ++c) {
        const D2 p = D2::variable(x.p[c], 0);
        const D2 sw = D2::variable(x.sw[c], 1);
        const auto& tab = table_for(c);
        const std::array<D2, 3> tm = {effective_mult(tab, Axis::X, p, x.p_peak[c]),
                                      effective_mult(tab, Axis::Y, p, x.p_peak[c]),
                                      effective_mult(tab, Axis::Z, p, x.p_peak[c])};
        ev[c] = evaluate_cell(tab, tables_.fvf, fluid_, deck_.relperm, p, sw, tm);
    }

    // Accumulation
    for (std::size_t c = 0; c < cells_; ++c) {
        const auto& e = ev[c];
        const D2 sw = D2::variable(x.sw[c], 1);
        const D2 ao = pv0_[c] * e.pv * (1.0 - sw) * e.inv_bo;
        const D2 aw = pv0_[c] * e.pv * sw * e.inv_bw;
        const double po = old.p[c];
        const double pvo = pv0_[c] * table_for(c).pv_mult(po);
        const double ao_old = pvo * (1.0 - old.sw[c]) / tables_.fvf.at(po);
        const double aw_old = pvo * old.sw[c] * water_inv_fvf(fluid_, po);
        r[eq(c)] += ao.v - ao_old;
        r[eq(c) + 1] += aw.v - aw_old;
        for (int k = 0; k < 2; ++k) {
            add(eq(c), eq(c) + k, ao.d[k]);
            add(eq(c) + 1, eq(c) + k, aw.d[k]);
        }
    }

    // Flux a -> b with transmissibility trans (seeds: a at 0..1, b at 2..3)
    const double grav = kGravity * 1e-6;
    auto flux = [&](std::size_t a, std::size_t b, const D4& trans, double dz) {
        const auto& ea = ev[a];
        const auto& eb = ev[b];
        const D4 pa = D4::variable(x.p[a], 0);
        const D4 pb = D4::variable(x.p[b], 2);
        for (int phase = 0; phase < 2; ++phase) {
            D4 dphi;
            if (phase == 0) {
                const D4 rho = 0.5 * (lift<4>(ea.rho_o, 0) + lift<4>(eb.rho_o, 2));
                dphi = pa - pb - grav * dz * rho;
            } else {
                const D4 rho = 0.5 * (lift<4>(ea.rho_w, 0) + lift<4>(eb.rho_w, 2));
                dphi = (pa - lift<4>(ea.pcow, 0)) - (pb - lift<4>(eb.pcow, 2)) - grav * dz * rho;
            }
            const bool up_a = dphi.v >= 0.0;
            const auto& eu = up_a ? ea : eb;
            const std::size_t off = up_a ? 0 : 2;
            const D2 mob2 = phase == 0 ? eu.kro * eu.inv_bo / fluid_.mu_o
                                       : eu.krw * eu.inv_bw / fluid_.mu_w;
            const D4 f = dt * trans * lift<4>(mob2, off) * dphi;
            r[eq(a) + phase] += f.v;
            r[eq(b) + phase] -= f.v;
            for (int k = 0; k < 2; ++k) {
                add(eq(a) + phase, eq(a) + k, f.d[k]);
                add(eq(a) + phase, eq(b) + k, f.d[2 + k]);
                add(eq(b) + phase, eq(a) + k, -f.d[k]);
                add(eq(b) + phase, eq(b) + k, -f.d[2 + k]);
            }
        }
    };

    for (const auto& f : faces_) {
        const int ax = static_cast<int>(f.axis);
        const D4 ta = f.half_a * lift<4>(ev[f.a].tm[ax], 0);
        const D4 tb = f.half_b * lift<4>(ev[f.b].tm[ax], 2);
        const D4 trans = kDarcyUnit * ta * tb / (ta + tb);
        flux(f.a, f.b, trans, depth_[f.a] - depth_[f.b]);
    }
    for (std::size_t gc = 0; gc < n_; ++gc) {
        const auto& tm = ev[gc].tm;
        const D2 m = pow(tm[0] * tm[1] * tm[2], 1.0 / 3.0);
        flux(gc, gc + n_, transfer_base_[gc] * lift<4>(m, 0), 0.0);
    }

    // Wells: seeds (p, sw) of the connection cell at 0..1, bhp at 2
    for (std::size_t w = 0; w < wells_.size(); ++w) {
        const auto& ctl = controls[w];
        const std::size_t wr = 2 * cells_ + w;
        const D3 bhp = D3::variable(x.bhp[w], 2);
        if (ctl.mode == WellControl::Mode::Shut) {
            double avg = 0.0;
            for (const auto& conn : wells_[w]) avg += x.p[conn.cell];
            avg /= static_cast<double>(wells_[w].size());
            r[wr] = x.bhp[w] - avg;
            add(wr, wr, 1.0);
            for (const auto& conn : wells_[w])
                add(wr, eq(conn.cell), -1.0 / static_cast<double>(wells_[w].size()));
            continue;
        }
        const WellKind kind = deck_.wells[w].kind;
        const bool rate_eq = !bhp_controlled(ctl);
        double rate = 0.0;
        for (const auto& conn : wells_[w]) {
            const std::size_t c = conn.cell;
            const auto& e2 = ev[c];
            CellEval<D3> e;
            e.inv_bo = lift<3>(e2.inv_bo, 0);
            e.inv_bw = lift<3>(e2.inv_bw, 0);
            e.kro = lift<3>(e2.kro, 0);
            e.krw = lift<3>(e2.krw, 0);
            const D3 mult = lift<3>(sqrt(e2.tm[0] * e2.tm[1]), 0);
            const D3 p = D3::variable(x.p[c], 0);
            const auto [qo, qw] = connection_flow(kind, conn.wi, fluid_, mult, e, p, bhp);
            const D3 ro = dt * qo;
            const D3 rw = dt * qw;
            r[eq(c)] += ro.v;
            r[eq(c) + 1] += rw.v;
            for (int k = 0; k < 2; ++k) {
                add(eq(c), eq(c) + k, ro.d[k]);
                add(eq(c) + 1, eq(c) + k, rw.d[k]);
            }
            add(eq(c), wr, ro.d[2]);
            add(eq(c) + 1, wr, rw.d[2]);
            const D3 q = kind == WellKind::Injector ? -qw : qo + qw;
            rate += q.v;
            if (rate_eq) {
                add(wr, eq(c), q.d[0]);
                add(wr, eq(c) + 1, q.d[1]);
                add(wr, wr, q.d[2]);
            }
        }
        if (rate_eq) {
            r[wr] = rate - ctl.target;
        } else {
            r[wr] = x.bhp[w] - bhp_target(ctl);
            add(wr, wr, 1.0);
        }
    }
}

Eigen::VectorXd Simulator::residual(const SimState& next, const SimState& prev, double dt,
                                    std::span<const ActiveControl> controls) const
{
    Eigen::VectorXd r;
    assemble(next, prev, dt, controls, r, nullptr);
    return r;
}

void Simulator::linearize(const SimState& next, const SimState& prev, double dt,
                          std::span<const ActiveControl> controls, Eigen::VectorXd& r,
                          Jacobian& jac) const
{
    assemble(next, prev, dt, controls, r, &jac);
}

std::vector<WellReport> Simulator::well_rates(const SimState& s,
                                              std::span<const ActiveControl> controls) const
{
    std::vector<WellReport> out(wells_.size());
    for (std::size_t w = 0; w < wells_.size(); ++w) {
        auto& rep = out[w];
        rep.bhp = s.bhp[w];
        if (controls[w].mode == WellControl::Mode::Shut) continue;
        const WellKind kind = deck_.wells[w].kind;
        for (const auto& conn : wells_[w]) {
            const std::size_t c = conn.cell;
            const auto& tab = table_for(c);
            const double p = s.p[c];
            const std::array<double, 3> tm = {effective_mult(tab, Axis::X, p, s.p_peak[c]),
                                              effective_mult(tab, Axis::Y, p, s.p_peak[c]),
                                              effective_mult(tab, Axis::Z, p, s.p_peak[c])};
            const auto e = evaluate_cell(tab, tables_.fvf, fluid_, deck_.relperm, p, s.sw[c], tm);
            const double mult = std::sqrt(tm[0] * tm[1]);
            const auto [qo, qw] = connection_flow(kind, conn.wi, fluid_, mult, e, p, s.bhp[w]);
            if (kind == WellKind::Injector) {
                rep.wir += -qw;
            } else {
                rep.opr += qo;
                rep.wpr += qw;
            }
        }
        rep.lpr = rep.opr + rep.wpr;
        rep.wct = rep.lpr > 0.0 ? std::clamp(rep.wpr / rep.lpr, 0.0, 1.0) : 0.0;
    }
    return out;
}

StepResult Simulator::advance(const SimState& state, double dt,
                              std::vector<ActiveControl> controls) const
{
    const auto& num = deck_.numerics;
    StepResult res;
    SimState x = state;
    x.time = state.time + dt;

    auto project = [&](SimState& s) {
        for (std::size_t w = 0; w < wells_.size(); ++w) {
            const auto& c = controls[w];
            if (c.mode != WellControl::Mode::Rate || c.limited) continue;
            // Keep at least one connection flowing in the controlled direction.
            if (deck_.wells[w].kind == WellKind::Injector) {
                double pmin = 1e300;
                for (const auto& conn : wells_[w]) pmin = std::min(pmin, s.p[conn.cell]);
                s.bhp[w] = std::max(s.bhp[w], pmin);
            } else {
                double pmax = -1e300;
                for (const auto& conn : wells_[w]) pmax = std::max(pmax, s.p[conn.cell]);
                s.bhp[w] = std::min(s.bhp[w], pmax);
            }
        }
    };
    project(x);

    Eigen::VectorXd r;
    Jacobian jac;
    detail::LinearSolver solver;
    int switches = 0;
    constexpr int kMaxSwitches = 4;

    // Residual entries scaled to pore-volume fractions; BHP rows stay in MPa.
    auto scaled = [&](const Eigen::VectorXd& res_vec, std::size_t i) {
        if (i < 2 * cells_) return std::abs(res_vec[i]) / pv0_[cell_of(i)];
        const std::size_t w = i - 2 * cells_;
        const double v = std::abs(res_vec[i]);
        if (controls[w].mode != WellControl::Mode::Rate || controls[w].limited) return v;
        double pv = 0.0;
        for (const auto& conn : wells_[w]) pv += pv0_[conn.cell];
        return v * dt / pv;
    };
    auto max_norm = [&](const Eigen::VectorXd& res_vec) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < res_vec.size(); ++i)
            worst = std::max(worst, scaled(res_vec, static_cast<std::size_t>(i)));
        return worst;
    };
    auto l2_norm = [&](const Eigen::VectorXd& res_vec) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < res_vec.size(); ++i) {
            const double v = scaled(res_vec, static_cast<std::size_t>(i));
            sum += v * v;
        }
        return std::sqrt(sum);
    };
    double pv_total = 0.0;
    for (double v : pv0_) pv_total += v;
    auto converged = [&]() {
        if (max_norm(r) >= num.newton_tol) return false;
        double oil = 0.0, water = 0.0;
        for (std::size_t c = 0; c < cells_; ++c) {
            oil += r[eq(c)];
            water += r[eq(c) + 1];
        }
        return std::abs(oil) < num.mb_tol * pv_total && std::abs(water) < num.mb_tol * pv_total;
    };

    // Switches rate wells onto their BHP limit (and back) at a converged state.
    auto switch_controls = [&]() {
        bool changed = false;
        const auto rates = well_rates(x, controls);
        for (std::size_t w = 0; w < wells_.size(); ++w) {
            auto& c = controls[w];
            if (c.mode != WellControl::Mode::Rate) continue;
            const bool inj = deck_.wells[w].kind == WellKind::Injector;
            const double rate = inj ? rates[w].wir : rates[w].lpr;
            if (!c.limited) {
                const bool violated = inj ? x.bhp[w] > c.bhp_limit + 1e-9
                                          : x.bhp[w] < c.bhp_limit - 1e-9;
                if (violated) {
                    c.limited = true;
                    x.bhp[w] = c.bhp_limit;
                    changed = true;
                }
            } else if (rate > c.target * (1.0 + 1e-9) + 1e-12) {
                c.limited = false;
                changed = true;
            }
        }
        return changed;
    };

    // A full step accepted by the line search leaves its linearization here.
    bool fresh = false;
    std::vector<double> history;
    Eigen::VectorXd trial_r;
    Jacobian trial_jac;
    for (int it = 0; it <= num.max_newton; ++it) {
        if (!fresh) linearize(x, state, dt, controls, r, jac);
        fresh = false;
        if (!r.allFinite()) {
            res.failure = "non-finite residual";
            res.newton_iterations = it;
            return res;
        }
        if (converged()) {
            if (switches < kMaxSwitches && switch_controls()) {
                ++switches;
                project(x);
                continue;
            }
            res.converged = true;
            res.newton_iterations = it;
            for (std::size_t c = 0; c < cells_; ++c) x.p_peak[c] = std::max(x.p_peak[c], x.p[c]);
            res.rates = well_rates(x, controls);
            res.state = std::move(x);
            res.controls = std::move(controls);
            return res;
        }
        if (it == num.max_newton) break;
        history.push_back(max_norm(r));
        // Stalled if three iterations have not halved the residual; the caller chops.
        const std::size_t h = history.size();
        if (h > 4 && history[h - 1] > 0.5 * history[h - 4]) {
            res.failure = "Newton stalled";
            res.newton_iterations = it;
            return res;
        }

        Eigen::VectorXd dx;
        if (!solver.solve(jac, -r, dx)) {
            res.failure = "singular Jacobian";
            res.newton_iterations = it + 1;
            return res;
        }
        auto apply = [&](double omega) {
            SimState trial = x;
            for (std::size_t c = 0; c < cells_; ++c) {
                const double dp = std::clamp(omega * dx[eq(c)], -num.dp_max, num.dp_max);
                trial.p[c] = limit_pressure(x.p[c], x.p[c] + dp, c);
                const double ds = std::clamp(omega * dx[eq(c) + 1], -num.ds_max, num.ds_max);
                trial.sw[c] = std::clamp(x.sw[c] + ds, 0.0, 1.0);
            }
            for (std::size_t w = 0; w < wells_.size(); ++w) trial.bhp[w] += omega * dx[2 * cells_ + w];
            project(trial);
            return trial;
        };
        // Backtrack while the scaled residual grows; piecewise-linear rock
        // tables otherwise let Newton cycle between two states.
        const double base = l2_norm(r);
        double omega = 1.0;
        SimState next = apply(omega);
        linearize(next, state, dt, controls, trial_r, trial_jac);
        if (trial_r.allFinite() && l2_norm(trial_r) < 0.9 * base) {
            std::swap(r, trial_r);
            std::swap(jac, trial_jac);
            fresh = true;
        } else {
            for (omega = 0.5; omega >= 1.0 / 32; omega *= 0.5) {
                next = apply(omega);
                if (omega < 1.0 / 16) break;
                trial_r = residual(next, state, dt, controls);
                if (trial_r.allFinite() && l2_norm(trial_r) < (1.0 - 0.1 * omega) * base) break;
            }
        }
        x = std::move(next);
    }
    res.failure = "Newton did not converge in " + std::to_string(num.max_newton) + " iterations";
    res.newton_iterations = num.max_newton;
    return res;
}

FractureExtent Simulator::fracture_extent(const SimState& s, std::size_t well) const
{
    const auto& g = deck_.grid;
    const auto& ws = deck_.wells.at(well);
    const auto& frac = tables_.rock.fracture;
    const double thr = deck_.numerics.extent_threshold;

    auto run_length = [&](Axis axis) {
        const double ref = thr * frac.trans_mult(axis, p_extent_ref_);
        auto open = [&](int i, int j) {
            const std::size_t c = n_ + g.index(i, j, ws.k);
            return effective_mult(frac, axis, s.p[c], s.p_peak[c]) > ref;
        };
        if (!open(ws.i, ws.j)) return 0.0;
        const bool along_x = axis == Axis::X;
        auto len = [&](int i, int j) {
            const std::size_t c = g.index(i, j, ws.k);
            return along_x ? g.dx(c) : g.dy(c);
        };
        double total = len(ws.i, ws.j);
        const int lim = along_x ? g.nx() : g.ny();
        for (int dir : {-1, 1}) {
            for (int step = 1;; ++step) {
                const int pos = (along_x ? ws.i : ws.j) + dir * step;
                if (pos < 0 || pos >= lim) break;
                const int i = along_x ? pos : ws.i;
                const int j = along_x ? ws.j : pos;
                if (!open(i, j)) break;
                total += len(i, j);
            }
        }
        return total;
    };
    return FractureExtent{run_length(Axis::X), run_length(Axis::Y)};
}

PhaseVolumes Simulator::in_place(const SimState& s) const
{
    PhaseVolumes v;
    for (std::size_t c = 0; c < cells_; ++c) {
        const double pv = pore_volume(c, s.p[c]);
        v.oil += pv * (1.0 - s.sw[c]) / tables_.fvf.at(s.p[c]);
        v.water += pv * s.sw[c] * water_inv_fvf(fluid_, s.p[c]);
    }
    return v;
}

double Simulator::field_average_pressure(const SimState& s) const
{
    double num = 0.0, den = 0.0;
    for (std::size_t c = 0; c < cells_; ++c) {
        const double pv = pore_volume(c, s.p[c]);
        num += pv * s.p[c];
        den += pv;
    }
    return num / den;
}

ReportRow Simulator::report(const SimState& s, const std::vector<WellReport>& rates) const
{
    ReportRow row;
    row.time = s.time;
    row.wells = rates;
    for (std::size_t w = 0; w < wells_.size(); ++w) {
        row.wells[w].bhp = s.bhp[w];
        if (deck_.wells[w].kind == WellKind::Injector) {
            const auto ext = fracture_extent(s, w);
            row.wells[w].dx = ext.dx;
            row.wells[w].dy = ext.dy;
        }
    }
    row.field_avg_p = field_average_pressure(s);
    row.field_p_coeff = row.field_avg_p / p_hydro_;
    return row;
}

RunResult Simulator::run() const
{
    const auto t0 = std::chrono::steady_clock::now();
    const auto& num = deck_.numerics;
    RunResult res;
    for (const auto& w : deck_.wells) {
        res.series.well_names.push_back(w.name);
        res.series.well_kinds.push_back(w.kind);
    }
    const std::size_t nw = deck_.wells.size();
    res.well_produced.assign(nw, PhaseVolumes{});
    res.well_injected.assign(nw, 0.0);

    SimState s = initial_state();
    res.balance.initial_in_place = in_place(s);
    res.series.rows.push_back(report(s, std::vector<WellReport>(nw)));

    double t = 0.0;
    for (const auto& stage : deck_.schedule) {
        StageMark mark{stage.name, t, t + stage.duration, 0};
        auto controls = stage_controls(stage);
        for (std::size_t w = 0; w < nw; ++w) {
            const auto& c = controls[w];
            const auto& conns = wells_[w];
            if (c.mode == WellControl::Mode::Bhp) {
                s.bhp[w] = c.target;
            } else if (c.mode == WellControl::Mode::Rate) {
                double lo = 1e300, hi = -1e300;
                for (const auto& conn : conns) {
                    lo = std::min(lo, s.p[conn.cell]);
                    hi = std::max(hi, s.p[conn.cell]);
                }
                s.bhp[w] = deck_.wells[w].kind == WellKind::Injector ? hi : lo;
            } else {
                double avg = 0.0;
                for (const auto& conn : conns) avg += s.p[conn.cell];
                s.bhp[w] = avg / static_cast<double>(conns.size());
            }
        }

        const double t_end = t + stage.duration;
        const double eps = 1e-9 * std::max(1.0, t_end);
        double dt = num.dt_init;
        double ceiling = num.dt_max; // recently failed step size, relaxed on success
        while (t_end - t > eps) {
            const double next_report =
                std::min(t_end, (std::floor(t / num.report_interval + 1e-9) + 1.0) * num.report_interval);
            double h = std::min(dt, next_report - t);
            if (next_report - t - h < std::max(eps, 1e-3 * h)) h = next_report - t;

            StepResult step = advance(s, h, controls);
            res.stats.newton_iterations += step.newton_iterations;
            if (!step.converged) {
                ++res.stats.chops;
                ceiling = h;
                dt = h * num.dt_chop;
                if (dt < num.dt_min) {
                    std::ostringstream msg;
                    msg << "stage " << stage.name << " at t=" << t << " d: " << step.failure
                        << "; timestep fell below dt_min=" << num.dt_min;
                    res.stats.completed = false;
                    res.stats.failure = msg.str();
                    goto done;
                }
                continue;
            }
            ++res.stats.accepted_steps;
            controls = std::move(step.controls);
            for (std::size_t w = 0; w < nw; ++w) {
                const auto& q = step.rates[w];
                res.well_injected[w] += h * q.wir;
                res.well_produced[w].oil += h * q.opr;
                res.well_produced[w].water += h * q.wpr;
                res.balance.injected.water += h * q.wir;
                res.balance.produced.oil += h * q.opr;
                res.balance.produced.water += h * q.wpr;
            }
            s = std::move(step.state);
            const bool full = h >= dt * (1.0 - 1e-12);
            t += h;
            if (full) {
                // Grow less after hard solves and stay below a size that just failed.
                const int its = step.newton_iterations;
                const double growth = its <= num.max_newton / 3       ? num.dt_growth
                                      : its <= 2 * num.max_newton / 3 ? std::sqrt(num.dt_growth)
                                                                        : 1.0;
                dt = std::min({dt * growth, num.dt_max, std::max(dt, 0.75 * ceiling)});
                ceiling = std::min(num.dt_max, ceiling * num.dt_growth);
            }
            if (t >= next_report - eps) {
                t = next_report;
                s.time = t;
                res.series.rows.push_back(report(s, step.rates));
            }
        }
        t = t_end;
        mark.end_row = res.series.rows.size() - 1;
        res.stages.push_back(mark);
    }
done:
    res.balance.final_in_place = in_place(s);
    const auto& b = res.balance;
    res.balance.oil_error =
        balance_error(b.injected.oil, b.produced.oil, b.initial_in_place.oil, b.final_in_place.oil);
    res.balance.water_error = balance_error(b.injected.water, b.produced.water,
                                            b.initial_in_place.water, b.final_in_place.water);
    res.final_state = std::move(s);
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace fracflood
