#pragma once

// Newton linear solve: BiCGSTAB preconditioned by ILU(0) on a cell-blocked
// ordering, with a sparse direct LU fallback when the iteration stalls.

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <vector>

namespace fracflood::detail {

using RowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Zero fill-in incomplete LU in Eigen's preconditioner interface.
class Ilu0 {
public:
    using StorageIndex = int;
    using Scalar = double;
    using RealScalar = double;
    enum { ColsAtCompileTime = Eigen::Dynamic, MaxColsAtCompileTime = Eigen::Dynamic };

    Ilu0() = default;
    template <class M>
    Ilu0& analyzePattern(const M&) { return *this; }
    template <class M>
    Ilu0& factorize(const M& a) { return compute(a); }
    Ilu0& compute(const RowMatrix& a);

    template <class Rhs, class Dest>
    void _solve_impl(const Rhs& b, Dest& x) const
    {
        x = b;
        apply(x.data());
    }
    template <class Rhs>
    Eigen::Solve<Ilu0, Rhs> solve(const Eigen::MatrixBase<Rhs>& b) const
    {
        return Eigen::Solve<Ilu0, Rhs>(*this, b.derived());
    }
    Eigen::ComputationInfo info() const { return ok_ ? Eigen::Success : Eigen::NumericalIssue; }
    Eigen::Index rows() const { return lu_.rows(); }
    Eigen::Index cols() const { return lu_.cols(); }

private:
    void apply(double* x) const;

    RowMatrix lu_;
    std::vector<int> diag_;
    bool ok_ = false;
};

class LinearSolver {
public:
    /// Solves jac * x = rhs. Returns false when both routes fail. The
    /// preconditioner works best when coupled unknowns sit close together.
    bool solve(const RowMatrix& jac, const Eigen::VectorXd& rhs, Eigen::VectorXd& x);

private:
    Eigen::BiCGSTAB<RowMatrix, Ilu0> krylov_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> direct_;
    bool direct_analyzed_ = false;
};

} // namespace fracflood::detail
