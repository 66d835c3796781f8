#include "linear_solver.hpp"

#include <cmath>

namespace fracflood::detail {

Ilu0& Ilu0::compute(const RowMatrix& a)
{
    lu_ = a;
    lu_.makeCompressed();
    const int n = static_cast<int>(lu_.rows());
    const int* outer = lu_.outerIndexPtr();
    const int* inner = lu_.innerIndexPtr();
    double* val = lu_.valuePtr();

    ok_ = true;
    diag_.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i)
        for (int q = outer[i]; q < outer[i + 1]; ++q)
            if (inner[q] == i) diag_[i] = q;

    std::vector<int> pos(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n && ok_; ++i) {
        for (int q = outer[i]; q < outer[i + 1]; ++q) pos[inner[q]] = q;
        for (int q = outer[i]; q < outer[i + 1] && inner[q] < i; ++q) {
            const int k = inner[q];
            val[q] /= val[diag_[k]];
            const double lik = val[q];
            for (int r = diag_[k] + 1; r < outer[k + 1]; ++r) {
                const int p = pos[inner[r]];
                if (p >= 0) val[p] -= lik * val[r];
            }
        }
        for (int q = outer[i]; q < outer[i + 1]; ++q) pos[inner[q]] = -1;
        if (diag_[i] < 0 || !std::isfinite(val[diag_[i]]) || val[diag_[i]] == 0.0) ok_ = false;
    }
    return *this;
}

void Ilu0::apply(double* x) const
{
    const int n = static_cast<int>(lu_.rows());
    const int* outer = lu_.outerIndexPtr();
    const int* inner = lu_.innerIndexPtr();
    const double* val = lu_.valuePtr();
    for (int i = 0; i < n; ++i) {
        double s = x[i];
        for (int q = outer[i]; q < diag_[i]; ++q) s -= val[q] * x[inner[q]];
        x[i] = s;
    }
    for (int i = n - 1; i >= 0; --i) {
        double s = x[i];
        for (int q = diag_[i] + 1; q < outer[i + 1]; ++q) s -= val[q] * x[inner[q]];
        x[i] = s / val[diag_[i]];
    }
}

bool LinearSolver::solve(const RowMatrix& jac, const Eigen::VectorXd& rhs, Eigen::VectorXd& x)
{
    krylov_.setTolerance(1e-10);
    krylov_.setMaxIterations(200);
    krylov_.compute(jac);
    if (krylov_.preconditioner().info() == Eigen::Success) {
        x = krylov_.solve(rhs);
        if (krylov_.info() == Eigen::Success && x.allFinite()) return true;
    }
    const Eigen::SparseMatrix<double> cols = jac;
    if (!direct_analyzed_) {
        direct_.analyzePattern(cols);
        direct_analyzed_ = true;
    }
    direct_.factorize(cols);
    if (direct_.info() != Eigen::Success) return false;
    x = direct_.solve(rhs);
    return x.allFinite();
}

} // namespace fracflood::detail
