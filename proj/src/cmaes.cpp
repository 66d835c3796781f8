#include "fracflood/cmaes.hpp"

#include "fracflood/deck_io.hpp"
#include "fracflood/error.hpp"
#include "fracflood/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace fracflood {

int CmaesConfig::gamma() const
{
    if (population > 0) return population;
    return 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(dim()))));
}

int CmaesConfig::mu() const { return parents > 0 ? parents : gamma() / 2; }

int CmaesConfig::stagnation_generations() const
{
    if (stagnation > 0) return stagnation;
    return 100 + static_cast<int>(100.0 * std::pow(static_cast<double>(dim()), 1.5) / gamma());
}

void CmaesConfig::validate() const
{
    const std::size_t n = dim();
    if (n == 0) throw ParameterError("mean", "dimension must be at least 1");
    if (lower.size() != n || upper.size() != n)
        throw ParameterError("bounds", "lower/upper must match the dimension");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(lower[i] < upper[i]))
            throw ParameterError("bounds", "lower < upper violated at coordinate " + std::to_string(i));
        if (!std::isfinite(mean[i])) throw ParameterError("mean", "must be finite");
    }
    if (!(sigma0 > 0.0) || !std::isfinite(sigma0)) throw ParameterError("sigma0", "must be positive");
    if (gamma() < 2) throw ParameterError("population", "must be at least 2");
    if (mu() < 1 || mu() > gamma()) throw ParameterError("parents", "must lie in [1, population]");
    if (max_evaluations < gamma())
        throw ParameterError("max_evaluations", "must allow at least one generation");
}

std::vector<double> default_weights(int mu)
{
    if (mu < 1) throw ParameterError("mu", "must be at least 1");
    const double l = std::log(mu + 1.0);
    const double denom = mu * l - std::lgamma(mu + 1.0);
    std::vector<double> w(static_cast<std::size_t>(mu));
    for (int i = 1; i <= mu; ++i) w[static_cast<std::size_t>(i - 1)] = (l - std::log(static_cast<double>(i))) / denom;
    return w;
}

BoundRepair repair_bounds(std::span<const double> x, std::span<const double> lower,
                          std::span<const double> upper)
{
    BoundRepair r;
    r.x.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        r.x[i] = std::clamp(x[i], lower[i], upper[i]);
        const double d = (x[i] - r.x[i]) / (upper[i] - lower[i]);
        r.penalty += d * d;
    }
    return r;
}

Cmaes::Cmaes(CmaesConfig config)
    : cfg_(std::move(config)), n_(cfg_.dim()), rng_(cfg_.seed)
{
    cfg_.validate();
    gamma_ = cfg_.gamma();
    mu_ = cfg_.mu();
    w_ = default_weights(mu_);
    double s2 = 0.0;
    for (double w : w_) s2 += w * w;
    mu_eff_ = 1.0 / s2;
    const double n = static_cast<double>(n_);
    cc_ = 4.0 / (n + 4.0);
    cs_ = (mu_eff_ + 2.0) / (n + mu_eff_ + 3.0);
    ds_ = 1.0 + 2.0 * std::max(0.0, std::sqrt((mu_eff_ - 1.0) / (n + 1.0)) - 1.0) + cs_;
    c1_ = 2.0 / ((n + 1.3) * (n + 1.3) + mu_eff_);
    cmu_ = std::min(1.0 - c1_, 2.0 * (mu_eff_ - 2.0 + 1.0 / mu_eff_) / ((n + 2.0) * (n + 2.0) + mu_eff_));
    chi_n_ = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));

    m_ = Eigen::Map<const Eigen::VectorXd>(cfg_.mean.data(), static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i)
        m_[static_cast<Eigen::Index>(i)] = std::clamp(m_[static_cast<Eigen::Index>(i)], cfg_.lower[i], cfg_.upper[i]);
    pc_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n_));
    ps_ = pc_;
    c_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
    sigma_ = cfg_.sigma0;
    double range = 0.0;
    for (std::size_t i = 0; i < n_; ++i) range = std::max(range, cfg_.upper[i] - cfg_.lower[i]);
    sigma_cap_ = 10.0 * range;
    decompose();
}

void Cmaes::decompose()
{
    c_ = 0.5 * (c_ + c_.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c_);
    if (es.info() != Eigen::Success) {
        // Repair: reset to the diagonal and retry once.
        Eigen::MatrixXd diag = c_.diagonal().cwiseAbs().asDiagonal();
        c_ = diag + 1e-14 * Eigen::MatrixXd::Identity(c_.rows(), c_.cols());
        es.compute(c_);
        if (es.info() != Eigen::Success) throw SolverError("covariance eigen decomposition failed");
    }
    Eigen::VectorXd ev = es.eigenvalues();
    const double floor = 1e-14 * std::max(c_.trace(), std::numeric_limits<double>::min());
    bool repaired = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (!(ev[i] >= floor)) {
            ev[i] = floor;
            repaired = true;
        }
    }
    b_ = es.eigenvectors();
    if (repaired) c_ = b_ * ev.asDiagonal() * b_.transpose();
    d_ = ev.cwiseSqrt();
    inv_sqrt_c_ = b_ * d_.cwiseInverse().asDiagonal() * b_.transpose();
}

std::vector<Candidate> Cmaes::ask()
{
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<Candidate> pop(static_cast<std::size_t>(gamma_));
    Eigen::VectorXd z(static_cast<Eigen::Index>(n_));
    for (auto& cand : pop) {
        for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = normal(rng_);
        const Eigen::VectorXd x = m_ + sigma_ * (b_ * (d_.cwiseProduct(z)));
        cand.raw.assign(x.data(), x.data() + x.size());
        auto rep = repair_bounds(cand.raw, cfg_.lower, cfg_.upper);
        cand.feasible = std::move(rep.x);
        cand.penalty = rep.penalty;
    }
    return pop;
}

void Cmaes::tell(const std::vector<Candidate>& pop, std::span<const double> fitness)
{
    if (pop.size() != static_cast<std::size_t>(gamma_) || fitness.size() != pop.size())
        throw ParameterError("fitness", "population and fitness sizes must equal gamma");
    for (double f : fitness)
        if (!std::isfinite(f)) throw ParameterError("fitness", "non-finite fitness value");

    std::vector<std::size_t> order(pop.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitness[a] < fitness[b]; });

    const auto n = static_cast<Eigen::Index>(n_);
    const Eigen::VectorXd m_old = m_;
    Eigen::MatrixXd y(n, mu_);
    Eigen::VectorXd m_new = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < mu_; ++i) {
        const auto& raw = pop[order[static_cast<std::size_t>(i)]].raw;
        const Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(raw.data(), n);
        y.col(i) = (x - m_old) / sigma_;
        m_new += w_[static_cast<std::size_t>(i)] * x;
    }
    for (Eigen::Index i = 0; i < n; ++i)
        m_new[i] = std::clamp(m_new[i], cfg_.lower[static_cast<std::size_t>(i)], cfg_.upper[static_cast<std::size_t>(i)]);
    const Eigen::VectorXd yw = (m_new - m_old) / sigma_;

    ps_ = (1.0 - cs_) * ps_ + std::sqrt(cs_ * (2.0 - cs_) * mu_eff_) * (inv_sqrt_c_ * yw);
    const double ps_norm = ps_.norm();
    const double decay = 1.0 - std::pow(1.0 - cs_, 2.0 * (gen_ + 1));
    const bool hsig = ps_norm / std::sqrt(decay) / chi_n_ < 1.4 + 2.0 / (static_cast<double>(n_) + 1.0);
    pc_ = (1.0 - cc_) * pc_;
    if (hsig) pc_ += std::sqrt(cc_ * (2.0 - cc_) * mu_eff_) * yw;

    Eigen::MatrixXd rank_mu = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < mu_; ++i) rank_mu += w_[static_cast<std::size_t>(i)] * y.col(i) * y.col(i).transpose();
    const double keep = 1.0 - c1_ - cmu_ + (hsig ? 0.0 : c1_ * cc_ * (2.0 - cc_));
    c_ = keep * c_ + c1_ * pc_ * pc_.transpose() + cmu_ * rank_mu;

    sigma_ *= std::exp(std::min(1.0, (cs_ / ds_) * (ps_norm / chi_n_ - 1.0)));
    sigma_ = std::clamp(sigma_, std::numeric_limits<double>::min(), sigma_cap_);

    m_ = m_new;
    ++gen_;
    decompose();
}

TerminationMonitor::TerminationMonitor(const CmaesConfig& config)
    : cfg_(config), best_seen_(std::numeric_limits<double>::infinity())
{
}

std::optional<std::string> TerminationMonitor::check(const Cmaes& es, std::span<const double> fitness,
                                                     double best_ever, long evaluations)
{
    const auto [lo, hi] = std::minmax_element(fitness.begin(), fitness.end());
    history_.push_back(*lo);
    if (best_ever < best_seen_) {
        best_seen_ = best_ever;
        since_improvement_ = 0;
    } else {
        ++since_improvement_;
    }
    if (cfg_.target && best_ever <= *cfg_.target) return "target";
    const int gamma = cfg_.gamma();
    if (evaluations + gamma > cfg_.max_evaluations) return "max_evaluations";

    const std::size_t window = 10 + static_cast<std::size_t>(std::ceil(30.0 * static_cast<double>(cfg_.dim()) / gamma));
    if (history_.size() >= window) {
        const auto first = history_.end() - static_cast<std::ptrdiff_t>(window);
        const auto [hlo, hhi] = std::minmax_element(first, history_.end());
        if (*hi - *lo < cfg_.tolfun && *hhi - *hlo < cfg_.tolfun) return "tolfun";
    }
    const double sd = std::sqrt(es.covariance().diagonal().maxCoeff());
    if (es.sigma() * sd < cfg_.tolx) return "tolx";
    if (since_improvement_ >= cfg_.stagnation_generations()) return "stagnation";
    return std::nullopt;
}

MinimizeResult minimize(const Objective& f, const CmaesConfig& config, int jobs)
{
    Cmaes es(config);
    TerminationMonitor monitor(es.config());
    MinimizeResult res;
    res.best_fitness = std::numeric_limits<double>::infinity();
    for (;;) {
        const auto pop = es.ask();
        const auto values = parallel_map(pop.size(), jobs, [&](std::size_t i) {
            return f(std::span<const double>(pop[i].feasible));
        });
        std::vector<double> ranked(pop.size());
        double sum = 0.0, gen_best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pop.size(); ++i) {
            ranked[i] = values[i] + pop[i].penalty;
            sum += values[i];
            gen_best = std::min(gen_best, values[i]);
            if (values[i] < res.best_fitness) {
                res.best_fitness = values[i];
                res.best_x = pop[i].feasible;
            }
        }
        res.evaluations += static_cast<long>(pop.size());
        es.tell(pop, ranked);
        res.trace.push_back(TraceRow{es.generation(), res.evaluations, gen_best,
                                     sum / static_cast<double>(pop.size()), es.sigma()});
        if (auto why = monitor.check(es, values, res.best_fitness, res.evaluations)) {
            res.termination = *why;
            break;
        }
    }
    return res;
}

std::string trace_csv(std::span<const TraceRow> trace)
{
    std::ostringstream os;
    os << "generation,evaluations,best_fitness,mean_fitness,sigma\n";
    for (const auto& r : trace)
        os << r.generation << ',' << r.evaluations << ',' << format_number(r.best_fitness) << ','
           << format_number(r.mean_fitness) << ',' << format_number(r.sigma) << '\n';
    return os.str();
}

} // namespace fracflood
