#include "fracflood/error.hpp"
#include "fracflood/histmatch.hpp"

#include "test_support.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace fracflood;

namespace {

RepresentativeParams truth()
{
    RepresentativeParams th;
    th.c_w = 4.5e-5;
    th.k_vo = 1.0;
    th.p_b = 25.0;
    th.lambda_mmin = 0.95;
    th.d_lambda1 = 0.01;
    th.d_lambda2 = 0.01;
    th.psi_xmmin = 0.95;
    th.d_psi_xm1 = 0.01;
    th.d_psi_xm2 = 0.01;
    th.psi_xfmax = 150;
    th.k_xy = 0.4;
    return th;
}

struct Twin {
    Deck base = fftest::load("minimal.deck");
    std::pair<double, double> range = characteristic_range(base, std::nullopt, std::nullopt);
    RunResult run = Simulator(decode(truth(), base, range.first, range.second)).run();
    ObservationSet obs = sample_observations(run, 2.0, 0.0, 1);
};

const Twin& twin()
{
    static const Twin t;
    return t;
}

} // namespace

TEST_CASE("series deviation")
{
    const std::vector<double> t{0, 1}, sim{11, 19};
    const std::vector<ObsPoint> obs{{0, 10}, {1, 20}};
    CHECK(series_deviation(t, sim, obs) == 2.0);
    const std::vector<double> same{10, 20};
    CHECK(series_deviation(t, same, obs) == 0.0);

    // swapping roles
    const std::vector<double> obs_vals{10, 20};
    const std::vector<ObsPoint> sim_as_obs{{0, 11}, {1, 19}};
    CHECK(series_deviation(t, obs_vals, sim_as_obs) == series_deviation(t, sim, obs));

    // interpolation to the observation instant
    const std::vector<ObsPoint> mid{{0.5, 16}};
    CHECK(series_deviation(t, sim, mid) == doctest::Approx(1.0).epsilon(1e-14));

    try {
        series_deviation(t, sim, std::vector<ObsPoint>{{2.5, 1}}, "PROD1");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("PROD1") != std::string::npos);
        CHECK(msg.find("2.5") != std::string::npos);
    }
}

TEST_CASE("normalized total objective")
{
    std::array<double, kSeriesKinds> alpha{}, mean{};
    std::array<bool, kSeriesKinds> present{};
    alpha[0] = 2;
    mean[0] = 15;
    present[0] = true;
    CHECK(total_objective(alpha, mean, present) == doctest::Approx(2.0 / 15).epsilon(1e-12));
    CHECK(std::abs(total_objective(alpha, mean, present) - 0.1333) < 1e-4);

    // zero-mean water cut is dropped and the prefactor renormalized
    present[2] = true;
    alpha[2] = 5;
    mean[2] = 0.0;
    CHECK(total_objective(alpha, mean, present) == doctest::Approx(2.0 / 15).epsilon(1e-12));
    present[1] = true;
    alpha[1] = 3;
    mean[1] = 30;
    CHECK(total_objective(alpha, mean, present) == doctest::Approx((2.0 / 15 + 0.1) / 2).epsilon(1e-12));

    // homogeneous of degree zero in the pressure scale
    auto scaled = alpha;
    auto scaled_mean = mean;
    scaled[0] *= 7.5;
    scaled_mean[0] *= 7.5;
    CHECK(total_objective(scaled, scaled_mean, present) == doctest::Approx(total_objective(alpha, mean, present)).epsilon(1e-14));

    std::array<bool, kSeriesKinds> none{};
    CHECK_THROWS_AS(total_objective(alpha, mean, none), ConfigError);
}

TEST_CASE("parameter-count audit")
{
    CHECK(variable_count_audit(3) == 37);
    CHECK(variable_count_audit(1) == 13);
    CHECK(kSimplifiedDimension == 11);
    CHECK(kRepresentativeNames.size() == 11);
}

TEST_CASE("decode is pure and installs generated tables")
{
    const auto base = fftest::load("minimal.deck");
    const auto copy = base;
    const auto [lo, hi] = characteristic_range(base, std::nullopt, std::nullopt);
    const auto a = decode(truth(), base, lo, hi);
    const auto b = decode(truth(), base, lo, hi);
    CHECK(a == b);
    CHECK(base == copy);
    REQUIRE(a.rock.has_value());
    CHECK(a.fluid.c_water == truth().c_w);
    const auto baseline = Simulator(base).fvf();
    CHECK(Simulator(a).fvf() == baseline);

    auto scaled = truth();
    scaled.k_vo = 1.2;
    const auto s = decode(scaled, base, lo, hi);
    CHECK(fvf_at(*s.fvf, 20.0) == doctest::Approx(1.2 * fvf_at(baseline, 20.0)).epsilon(1e-14));

    std::mt19937_64 rng(7);
    const auto inset = ParamBounds::defaults(lo, hi);
    for (int i = 0; i < 200; ++i) {
        auto th = fftest::random_theta(rng, lo, hi);
        th.p_b = std::clamp(th.p_b, inset.box[2].lower + 0.05, inset.box[2].upper - 0.05);
        const auto d = decode(th, base, lo, hi);
        CHECK_FALSE(validate_monotone(d.rock->matrix.rows()).has_value());
        CHECK_FALSE(validate_monotone(d.rock->fracture.rows()).has_value());
    }

    auto bad = truth();
    bad.k_xy = 0.9;
    CHECK_THROWS_AS(decode(bad, base, lo, hi), ParameterError);
}

TEST_CASE("observation sampling and file round trip")
{
    const auto& tw = twin();
    const auto& obs = tw.obs;
    CHECK_NOTHROW(obs.validate());
    const auto* inj = obs.find("INJ1");
    const auto* prod = obs.find("PROD1");
    REQUIRE(inj);
    REQUIRE(prod);
    CHECK(inj->series[static_cast<std::size_t>(SeriesKind::Wir)].size() == 15);
    CHECK(inj->series[static_cast<std::size_t>(SeriesKind::Dx)].size() == 15);
    CHECK(prod->series[static_cast<std::size_t>(SeriesKind::Wir)].empty());
    CHECK(prod->series[static_cast<std::size_t>(SeriesKind::Bhp)].size() == 15);
    for (const auto& p : prod->series[static_cast<std::size_t>(SeriesKind::Wct)]) {
        CHECK(p.time > 15.0);
        CHECK(p.value >= 0.0);
        CHECK(p.value <= 1.0);
    }
    const auto& first = inj->series[static_cast<std::size_t>(SeriesKind::Wir)].front();
    CHECK(first.time == 2.0);
    const auto times = tw.run.series.times();
    const auto wir = tw.run.series.column(0, Quantity::Wir);
    CHECK(first.value == interpolate_series(times, wir, 2.0));

    const auto dir = std::filesystem::temp_directory_path() / "fracflood_obs_roundtrip";
    std::filesystem::remove_all(dir);
    write_observations(obs, dir);
    CHECK(load_observations(dir) == obs);
    std::filesystem::remove_all(dir);

    const auto noisy_a = sample_observations(tw.run, 2.0, 0.05, 3);
    const auto noisy_b = sample_observations(tw.run, 2.0, 0.05, 3);
    const auto noisy_c = sample_observations(tw.run, 2.0, 0.05, 4);
    CHECK(noisy_a == noisy_b);
    CHECK_FALSE(noisy_a == noisy_c);
}

TEST_CASE("observation validation")
{
    ObservationSet empty;
    CHECK_THROWS_AS(empty.validate(), ConfigError);
    ObservationSet s;
    s.at("P").series[static_cast<std::size_t>(SeriesKind::Wct)] = {{1, 0.2}, {2, 1.3}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.at("P").series[static_cast<std::size_t>(SeriesKind::Wct)] = {{2, 0.2}, {1, 0.3}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("evaluate: truth self-match and failures")
{
    const auto& tw = twin();
    const auto [lo, hi] = tw.range;
    const auto self = evaluate(truth(), tw.base, tw.obs, lo, hi);
    REQUIRE(self.ok);
    CHECK(self.terms.total <= 1e-3);
    for (double a : self.terms.alpha) CHECK(a >= 0.0);

    auto bad = truth();
    bad.psi_xfmax = 5000;
    const auto failed = evaluate(bad, tw.base, tw.obs, lo, hi);
    CHECK_FALSE(failed.ok);
    CHECK(failed.failure.find("psi_xfmax") != std::string::npos);
}

TEST_CASE("moving p_b away from the truth raises the objective on the twin deck")
{
    const auto base = fftest::load("twin.deck");
    const auto rec = parse_truth(fftest::read_file(fftest::source_dir() / "configs" / "twin_truth.json"));
    const auto [lo, hi] = characteristic_range(base, rec.p_min, rec.p_max);
    const auto run = Simulator(decode(rec.theta, base, lo, hi)).run();
    REQUIRE(run.stats.completed);
    const auto obs = sample_observations(run, 5.0, 0.0, 1);

    const auto self = evaluate(rec.theta, base, obs, lo, hi);
    REQUIRE(self.ok);
    CHECK(self.terms.total <= 1e-3);
    for (double sign : {-1.0, 1.0}) {
        double prev = self.terms.total;
        for (double dp : {0.5, 1.0, 2.0}) {
            auto th = rec.theta;
            th.p_b += sign * dp;
            const auto e = evaluate(th, base, obs, lo, hi);
            REQUIRE(e.ok);
            CHECK(e.terms.total > prev);
            prev = e.terms.total;
        }
    }
}

TEST_CASE("dropping a series leaves the other terms unchanged")
{
    const auto& tw = twin();
    auto th = truth();
    th.psi_xfmax = 400;
    const auto sim = Simulator(decode(th, tw.base, tw.range.first, tw.range.second)).run();
    const auto full = objective_terms(sim.series, tw.obs);
    auto reduced_obs = tw.obs;
    for (auto& w : reduced_obs.wells) w.series[static_cast<std::size_t>(SeriesKind::Wct)].clear();
    const auto reduced = objective_terms(sim.series, reduced_obs);
    for (std::size_t k = 0; k < kSeriesKinds; ++k) {
        if (k == static_cast<std::size_t>(SeriesKind::Wct)) continue;
        CHECK(reduced.alpha[k] == full.alpha[k]);
        CHECK(reduced.mean[k] == full.mean[k]);
    }
    CHECK_FALSE(reduced.active[static_cast<std::size_t>(SeriesKind::Wct)]);
}

TEST_CASE("match configuration and truth parsing")
{
    const auto c = parse_match_config(R"({"sigma0": 0.2, "population": 8, "seed": 5, "max_evaluations": 40, "p_min": 15})");
    CHECK(c.sigma0 == 0.2);
    CHECK(c.population == 8);
    CHECK(c.seed == 5);
    CHECK(c.max_evaluations == 40);
    CHECK(c.p_min == 15.0);
    CHECK_THROWS_AS(parse_match_config(R"({"sigma": 0.2})"), ConfigError);
    CHECK_THROWS_AS(parse_match_config("{not json"), ConfigError);

    const auto rec = parse_truth(truth_json(truth(), 15, 37));
    CHECK(rec.theta == truth());
    CHECK(rec.p_min == 15.0);
    CHECK(rec.p_max == 37.0);
    CHECK_THROWS_AS(parse_truth(R"({"c_w": 1e-5})"), ConfigError);
}

TEST_CASE("run_match: single generation, determinism and worker independence")
{
    const auto& tw = twin();
    MatchConfig c;
    c.population = 6;
    c.max_evaluations = 6;
    c.seed = 3;
    const auto one_gen = run_match(c, tw.base, tw.obs);
    CHECK(one_gen.trace.size() == 1);
    CHECK(one_gen.evaluations == 6);

    c.max_evaluations = 18;
    const auto a = run_match(c, tw.base, tw.obs);
    const auto b = run_match(c, tw.base, tw.obs);
    c.jobs = 3;
    const auto threaded = run_match(c, tw.base, tw.obs);
    CHECK(report_json(a, tw.obs) == report_json(b, tw.obs));
    CHECK(report_json(a, tw.obs) == report_json(threaded, tw.obs));

    double best_in_trace = INFINITY;
    for (const auto& row : a.trace) best_in_trace = std::min(best_in_trace, row.best_fitness);
    CHECK(a.best_terms.total == best_in_trace);
    for (std::size_t i = 0; i < kRepresentativeDim; ++i) {
        const auto bounds = ParamBounds::defaults(a.p_min, a.p_max);
        const double v = to_array(a.best)[i];
        CHECK(v >= bounds.box[i].lower);
        CHECK(v <= bounds.box[i].upper);
    }
}
