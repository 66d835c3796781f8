#include "fracflood/property_model.hpp"

#include "fracflood/error.hpp"

#include <cmath>
#include <string>

namespace fracflood {

namespace {

constexpr std::array<const char*, 5> kRockColumns = {"pressure", "pv_mult", "tx_mult", "ty_mult",
                                                     "tz_mult"};

double rock_column(const RockRow& r, std::size_t c)
{
    switch (c) {
    case 0: return r.pressure;
    case 1: return r.pv_mult;
    case 2: return r.tx_mult;
    case 3: return r.ty_mult;
    default: return r.tz_mult;
    }
}

} // namespace

std::optional<MonotoneViolation> validate_monotone(std::span<const RockRow> rows)
{
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t c = 0; c < kRockColumns.size(); ++c) {
            const double v = rock_column(rows[i], c);
            if (!std::isfinite(v) || (c > 0 && v <= 0.0))
                return MonotoneViolation{i + 1, kRockColumns[c]};
            if (i > 0 && !(v > rock_column(rows[i - 1], c)))
                return MonotoneViolation{i + 1, kRockColumns[c]};
        }
    }
    return std::nullopt;
}

RockTable::RockTable(std::vector<RockRow> rows) : rows_(std::move(rows))
{
    if (rows_.size() < 2) throw ParameterError("rock table", "needs at least 2 rows");
    if (auto v = validate_monotone(rows_))
        throw ParameterError("rock table",
                             "column " + v->column + " not strictly increasing at row " +
                                 std::to_string(v->row));
    for (const auto& r : rows_)
        for (std::size_t c = 0; c < 5; ++c) cols_[c].push_back(rock_column(r, c));
}

RockMultipliers interp_rock(const RockTable& t, double p)
{
    return {t.pv_mult(p), t.trans_mult(Axis::X, p), t.trans_mult(Axis::Y, p),
            t.trans_mult(Axis::Z, p)};
}

double shared_reference_pressure(const RockTablePair& pair)
{
    const auto& m = pair.matrix.rows();
    const auto& f = pair.fracture.rows();
    double ref = f.front().pressure;
    for (std::size_t i = 0; i < std::min(m.size(), f.size()); ++i) {
        if (!(m[i] == f[i])) break;
        ref = f[i].pressure;
    }
    return ref;
}

FvfTable::FvfTable(std::vector<FvfRow> rows) : rows_(std::move(rows))
{
    if (rows_.empty()) throw ParameterError("fvf table", "needs at least 1 row");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        const auto& r = rows_[i];
        if (!std::isfinite(r.fvf) || r.fvf <= 0.0)
            throw ParameterError("fvf table", "fvf must be positive at row " + std::to_string(i + 1));
        if (i > 0 && !(r.pressure > rows_[i - 1].pressure))
            throw ParameterError("fvf table",
                                 "pressure not strictly increasing at row " + std::to_string(i + 1));
        if (i > 0 && r.fvf > rows_[i - 1].fvf)
            throw ParameterError("fvf table",
                                 "fvf increases with pressure at row " + std::to_string(i + 1));
        p_.push_back(r.pressure);
        b_.push_back(r.fvf);
    }
}

FvfTable FvfTable::scaled(double factor) const
{
    auto rows = rows_;
    for (auto& r : rows) r.fvf *= factor;
    return FvfTable(std::move(rows));
}

FvfTable FvfTable::linear_default(double p_min, double p_max)
{
    return FvfTable({{p_min, 1.15}, {p_max, 1.10}});
}

double fvf_at(const FvfTable& table, double p) { return table.at(p); }

void FluidSpec::validate() const
{
    const std::array<std::pair<const char*, double>, 7> fields = {{{"rho_o", rho_o0},
                                                                   {"rho_w", rho_w0},
                                                                   {"c_oil", c_oil},
                                                                   {"c_water", c_water},
                                                                   {"mu_o", mu_o},
                                                                   {"mu_w", mu_w},
                                                                   {"p_ref", p_ref}}};
    for (const auto& [name, v] : fields)
        if (!std::isfinite(v) || v <= 0.0) throw ParameterError(name, "must be positive");
}

double water_fvf(const FluidSpec& f, double p) { return 1.0 / water_inv_fvf(f, p); }

RelPermTable::RelPermTable(std::vector<RelPermRow> rows, bool has_pcow)
    : rows_(std::move(rows)), has_pcow_(has_pcow)
{
    if (rows_.size() < 2) throw ParameterError("relperm table", "needs at least 2 rows");
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto& r = rows_[i];
        const std::string where = " at row " + std::to_string(i + 1);
        if (!has_pcow_) r.pcow = 0.0;
        if (r.sw < 0.0 || r.sw > 1.0) throw ParameterError("sw", "outside [0,1]" + where);
        if (r.krw < 0.0 || r.krw > 1.0) throw ParameterError("krw", "outside [0,1]" + where);
        if (r.kro < 0.0 || r.kro > 1.0) throw ParameterError("kro", "outside [0,1]" + where);
        if (i > 0) {
            const auto& q = rows_[i - 1];
            if (!(r.sw > q.sw)) throw ParameterError("sw", "not strictly increasing" + where);
            if (r.krw < q.krw) throw ParameterError("krw", "decreasing" + where);
            if (r.kro > q.kro) throw ParameterError("kro", "increasing" + where);
        }
        sw_.push_back(r.sw);
        krw_.push_back(r.krw);
        kro_.push_back(r.kro);
        pc_.push_back(r.pcow);
    }
    if (rows_.front().krw != 0.0) throw ParameterError("krw", "must be 0 at the first row");
    if (rows_.back().kro != 0.0) throw ParameterError("kro", "must be 0 at the last row");
}

RelPermPoint relperm_at(const RelPermTable& t, double sw)
{
    return {t.krw(sw), t.kro(sw), t.pcow(sw)};
}

double porosity_at(const RockCompaction& rc, double p)
{
    const double phi = rc.phi0 + rc.c_f * (p - rc.p_ref);
    if (!(phi > 0.0 && phi < 1.0))
        throw StateError("porosity " + std::to_string(phi) + " outside (0,1) at p = " +
                         std::to_string(p) + " MPa");
    return phi;
}

GeneratedTables tables_from_representative(const RepresentativeParams& t, double p_min,
                                           double p_max, const FvfTable& fvf_baseline)
{
    if (!(p_min < p_max)) throw ParameterError("p_min", "must be below p_max");
    check_bounds(t, ParamBounds::defaults(p_min, p_max));
    if (!(t.p_b > p_min && t.p_b < p_max))
        throw ParameterError("p_b", "must lie strictly inside (p_min, p_max)");

    const double pv1 = t.lambda_mmin;
    const double pv2 = pv1 + t.d_lambda1;
    const double pv3 = pv2 + t.d_lambda2;
    const double tm1 = t.psi_xmmin;
    const double tm2 = tm1 + t.d_psi_xm1;
    const double tm3 = tm2 + t.d_psi_xm2;

    RockTable matrix({{p_min, pv1, tm1, tm1, tm1},
                      {t.p_b, pv2, tm2, tm2, tm2},
                      {p_max, pv3, tm3, tm3, tm3}});
    const double ty = t.k_xy * t.psi_xfmax;
    RockTable fracture({{p_min, pv1, tm1, tm1, tm1},
                        {t.p_b, pv2, tm2, tm2, tm2},
                        {p_max, pv3, t.psi_xfmax, ty, ty}});

    return GeneratedTables{RockTablePair{std::move(matrix), std::move(fracture)},
                           fvf_baseline.scaled(t.k_vo), t.c_w};
}

} // namespace fracflood
