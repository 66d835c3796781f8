#pragma once

// Covariance matrix adaptation evolution strategy for box-bounded minimization.
// Population size is written gamma to keep lambda free for the pore-volume
// multiplier.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace fracflood {

struct CmaesConfig {
    std::vector<double> mean;  // initial mean; its size sets the dimension
    double sigma0 = 0.3;
    std::vector<double> lower, upper;
    int population = 0;        // gamma; 0 selects 4 + floor(3 ln n)
    int parents = 0;           // mu; 0 selects floor(gamma / 2)
    std::uint64_t seed = 1;
    long max_evaluations = 10000;
    std::optional<double> target; // stop once the best fitness reaches it
    double tolfun = 1e-12;
    double tolx = 1e-12;
    int stagnation = 0;        // generations without improvement; 0 selects 100 + 100 n^1.5 / gamma

    std::size_t dim() const noexcept { return mean.size(); }
    int gamma() const;
    int mu() const;
    int stagnation_generations() const;
    /// Throws ParameterError naming the offending field.
    void validate() const;
};

/// w_i = (ln(mu+1) - ln i) / (mu ln(mu+1) - ln(mu!)), i = 1..mu.
std::vector<double> default_weights(int mu);

struct BoundRepair {
    std::vector<double> x;
    double penalty = 0.0; // sum of squared range-normalized clamp distances
};
BoundRepair repair_bounds(std::span<const double> x, std::span<const double> lower,
                          std::span<const double> upper);

struct Candidate {
    std::vector<double> raw;      // as sampled
    std::vector<double> feasible; // clamped into the box
    double penalty = 0.0;
};

struct TraceRow {
    int generation = 0;
    long evaluations = 0;
    double best_fitness = 0.0; // best objective value in this generation
    double mean_fitness = 0.0;
    double sigma = 0.0;
};

class Cmaes {
public:
    explicit Cmaes(CmaesConfig config);

    const CmaesConfig& config() const noexcept { return cfg_; }
    const Eigen::VectorXd& mean() const noexcept { return m_; }
    const Eigen::MatrixXd& covariance() const noexcept { return c_; }
    double sigma() const noexcept { return sigma_; }
    int generation() const noexcept { return gen_; }
    const std::vector<double>& weights() const noexcept { return w_; }
    double mu_eff() const noexcept { return mu_eff_; }

    /// Samples gamma candidates m + sigma B D z from the internal random stream.
    std::vector<Candidate> ask();

    /// Ranks by fitness (penalties already included; ties by index) and
    /// updates mean, paths, covariance and step size. Throws ParameterError
    /// on non-finite fitness or a size mismatch.
    void tell(const std::vector<Candidate>& population, std::span<const double> fitness);

private:
    void decompose();

    CmaesConfig cfg_;
    std::size_t n_;
    int gamma_, mu_;
    std::vector<double> w_;
    double mu_eff_, cc_, cs_, c1_, cmu_, ds_, chi_n_;
    Eigen::VectorXd m_, pc_, ps_;
    Eigen::MatrixXd c_, b_, inv_sqrt_c_;
    Eigen::VectorXd d_;
    double sigma_;
    double sigma_cap_;
    int gen_ = 0;
    std::mt19937_64 rng_;
};

/// Termination tests applied after each tell: evaluation budget, target,
/// tolfun (flat generation and flat recent best history), tolx and stagnation.
class TerminationMonitor {
public:
    explicit TerminationMonitor(const CmaesConfig& config);
    /// `fitness` are the generation's objective values; returns the reason to stop, if any.
    std::optional<std::string> check(const Cmaes& es, std::span<const double> fitness,
                                     double best_ever, long evaluations);

private:
    const CmaesConfig& cfg_;
    std::vector<double> history_; // best fitness per generation
    double best_seen_;
    int since_improvement_ = 0;
};

struct MinimizeResult {
    std::vector<double> best_x;
    double best_fitness = 0.0;
    long evaluations = 0;
    std::vector<TraceRow> trace;
    std::string termination; // max_evaluations | target | tolfun | tolx | stagnation
};

using Objective = std::function<double(std::span<const double>)>;

/// Ask/tell loop; f is evaluated on the clamped candidates, possibly on
/// `jobs` threads, and results are consumed in candidate order.
MinimizeResult minimize(const Objective& f, const CmaesConfig& config, int jobs = 1);

std::string trace_csv(std::span<const TraceRow> trace);

} // namespace fracflood
