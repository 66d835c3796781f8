#include "fracflood/cmaes.hpp"
#include "fracflood/error.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numeric>
#include <random>

using namespace fracflood;

namespace {

CmaesConfig box(std::size_t n, double lo, double hi, double start, double sigma, std::uint64_t seed)
{
    CmaesConfig c;
    c.mean.assign(n, start);
    c.lower.assign(n, lo);
    c.upper.assign(n, hi);
    c.sigma0 = sigma;
    c.seed = seed;
    return c;
}

double sphere(std::span<const double> x)
{
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

} // namespace

TEST_CASE("default weights")
{
    CHECK(default_weights(1) == std::vector<double>{1.0});
    const auto w3 = default_weights(3);
    CHECK(w3[0] == doctest::Approx(0.5857).epsilon(1e-4));
    CHECK(w3[1] == doctest::Approx(0.2928).epsilon(1e-4));
    CHECK(w3[2] == doctest::Approx(0.1215).epsilon(1e-3));
    for (int mu = 1; mu <= 50; ++mu) {
        const auto w = default_weights(mu);
        REQUIRE(w.size() == static_cast<std::size_t>(mu));
        CHECK(std::abs(std::accumulate(w.begin(), w.end(), 0.0) - 1.0) < 1e-12);
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(w[i] > 0.0);
            if (i > 0) CHECK(w[i] < w[i - 1]);
        }
    }
}

TEST_CASE("config defaults and validation")
{
    auto c = box(11, 0, 1, 0.5, 0.3, 1);
    CHECK(c.gamma() == 11);
    CHECK(c.mu() == 5);
    c.validate();
    c.sigma0 = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = box(2, 0, 1, 0.5, 0.3, 1);
    c.upper[1] = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = box(2, 0, 1, 0.5, 0.3, 1);
    c.population = 1;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c.population = 6;
    c.parents = 7;
    CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("bound repair")
{
    const std::vector<double> lo{0, -1}, hi{1, 1};
    const auto in = repair_bounds(std::vector<double>{0.3, 0.2}, lo, hi);
    CHECK(in.x == std::vector<double>{0.3, 0.2});
    CHECK(in.penalty == 0.0);

    const auto out = repair_bounds(std::vector<double>{1.1, 0.2}, lo, hi);
    CHECK(out.x[0] == 1.0);
    CHECK(out.penalty == doctest::Approx(0.01).epsilon(1e-12));

    // affine rescaling of one coordinate and its bounds
    const auto scaled = repair_bounds(std::vector<double>{3 + 5 * 1.1, 0.2}, std::vector<double>{3, -1},
                                      std::vector<double>{8, 1});
    CHECK(scaled.penalty == doctest::Approx(out.penalty).epsilon(1e-12));
}

TEST_CASE("sampling: collapsed sigma, bounds, and the sample mean")
{
    {
        Cmaes es(box(4, -10, 10, 1.5, 1e-300, 3));
        for (const auto& cand : es.ask())
            for (double v : cand.feasible) CHECK(v == doctest::Approx(1.5).epsilon(1e-12));
    }
    {
        Cmaes es(box(3, -0.5, 0.5, 0.4, 2.0, 4));
        for (const auto& cand : es.ask())
            for (double v : cand.feasible) {
                CHECK(v >= -0.5);
                CHECK(v <= 0.5);
            }
    }
    {
        auto c = box(3, -100, 100, 0.0, 1.0, 9);
        c.population = 10000;
        Cmaes es(c);
        const auto pop = es.ask();
        for (std::size_t i = 0; i < 3; ++i) {
            double s = 0.0;
            for (const auto& cand : pop) s += cand.raw[i];
            CHECK(std::abs(s / 1e4) < 4.0 / std::sqrt(1e4));
        }
    }
}

TEST_CASE("single parent moves the mean onto the best candidate")
{
    auto c = box(3, -5, 5, 1.0, 0.5, 2);
    c.parents = 1;
    Cmaes es(c);
    const auto pop = es.ask();
    std::vector<double> f;
    for (const auto& cand : pop) f.push_back(sphere(cand.feasible));
    const auto best = std::min_element(f.begin(), f.end()) - f.begin();
    es.tell(pop, f);
    for (std::size_t i = 0; i < 3; ++i) CHECK(es.mean()[static_cast<Eigen::Index>(i)] == doctest::Approx(pop[static_cast<std::size_t>(best)].raw[i]).epsilon(1e-12));
}

TEST_CASE("tell rejects bad input")
{
    Cmaes es(box(2, -1, 1, 0, 0.3, 1));
    const auto pop = es.ask();
    std::vector<double> f(pop.size(), 1.0);
    f[1] = NAN;
    CHECK_THROWS_AS(es.tell(pop, f), ParameterError);
    f.pop_back();
    CHECK_THROWS_AS(es.tell(pop, f), ParameterError);
}

TEST_CASE("covariance stays symmetric positive definite under random fitness")
{
    Cmaes es(box(6, -1, 1, 0, 0.3, 8));
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    for (int g = 0; g < 1000; ++g) {
        const auto pop = es.ask();
        std::vector<double> f(pop.size());
        for (auto& v : f) v = nd(rng);
        es.tell(pop, f);
    }
    const auto& c = es.covariance();
    CHECK((c - c.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * c.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(c);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    CHECK(es.sigma() > 0.0);
    CHECK(std::isfinite(es.sigma()));
}

TEST_CASE("step size stays positive and finite over long degenerate runs")
{
    for (int kind = 0; kind < 2; ++kind) {
        Cmaes es(box(3, -1, 1, 0, 0.3, 5));
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u;
        for (int g = 0; g < 10000; ++g) {
            const auto pop = es.ask();
            std::vector<double> f(pop.size(), 7.0);
            if (kind == 1)
                for (auto& v : f) v = u(rng);
            es.tell(pop, f);
            REQUIRE(es.sigma() > 0.0);
            REQUIRE(std::isfinite(es.sigma()));
        }
    }
}

TEST_CASE("sphere: fitness at the mean trends down")
{
    Cmaes es(box(5, -5, 5, 3.0, 1.0, 12));
    std::vector<double> at_mean;
    for (int g = 0; g < 120; ++g) {
        const auto pop = es.ask();
        std::vector<double> f;
        for (const auto& cand : pop) f.push_back(sphere(cand.feasible) + cand.penalty);
        es.tell(pop, f);
        at_mean.push_back(es.mean().squaredNorm());
    }
    for (std::size_t g = 10; g < at_mean.size(); g += 10) CHECK(at_mean[g] < at_mean[g - 10]);
}

TEST_CASE("minimize: one-dimensional quadratic, sphere, constant")
{
    auto c = box(1, 0, 5, 4.0, 1.0, 1);
    c.max_evaluations = 5000;
    auto r = minimize([](std::span<const double> x) { return (x[0] - 2) * (x[0] - 2); }, c);
    CHECK(std::abs(r.best_x[0] - 2.0) < 1e-6);

    for (std::uint64_t seed : {1u, 2u}) {
        auto s = box(11, -5, 5, 2.0, 2.0, seed);
        s.max_evaluations = 20000;
        s.target = 1e-10;
        r = minimize(sphere, s);
        CHECK(r.best_fitness < 1e-10);
        CHECK(r.termination == "target");
        CHECK(r.evaluations <= 20000);
    }

    auto k = box(4, -1, 1, 0.5, 0.3, 3);
    k.max_evaluations = 100000;
    r = minimize([](std::span<const double>) { return 1.0; }, k);
    CHECK((r.termination == "tolfun" || r.termination == "stagnation"));
    for (double v : r.best_x) {
        CHECK(v >= -1.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("budget termination is flagged")
{
    auto c = box(5, -5, 5, 2.0, 1.0, 1);
    c.max_evaluations = 100;
    const auto r = minimize(sphere, c);
    CHECK(r.termination == "max_evaluations");
    CHECK(r.evaluations <= 100 + c.gamma());
    CHECK_FALSE(r.trace.empty());
}

TEST_CASE("ranking is invariant to fitness offsets")
{
    auto c = box(4, -5, 5, 1.0, 1.0, 21);
    c.max_evaluations = 300; // keeps sphere values well above the offset's rounding
    c.tolfun = 0.0;
    const auto a = minimize(sphere, c);
    const auto b = minimize([](std::span<const double> x) { return sphere(x) + 1000.0; }, c);
    CHECK(a.best_x == b.best_x);
    REQUIRE(a.trace.size() == b.trace.size());
    for (std::size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].sigma == b.trace[i].sigma);
        CHECK(b.trace[i].best_fitness - a.trace[i].best_fitness == doctest::Approx(1000.0));
    }
}

TEST_CASE("results do not depend on the worker count")
{
    auto c = box(6, -5, 5, 1.0, 1.0, 4);
    c.max_evaluations = 600;
    const auto one = minimize(sphere, c, 1);
    const auto four = minimize(sphere, c, 4);
    CHECK(one.best_x == four.best_x);
    CHECK(one.best_fitness == four.best_fitness);
    CHECK(trace_csv(one.trace) == trace_csv(four.trace));
}
