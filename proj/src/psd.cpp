#include "ofd/psd.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>

namespace ofd::opt
{

namespace
{

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& S)
{
    if (S.rows() != S.cols())
        throw std::invalid_argument("matrix must be square");
    if (!S.allFinite())
        throw NonFiniteEntries("matrix has non-finite entries");
    const Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("eigendecomposition failed");
    return eig;
}

} // namespace

Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S)
{
    if (S.size() == 0)
        return S;
    const auto eig = decompose(S);
    const Eigen::VectorXd clamped = eig.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd R = eig.eigenvectors() * clamped.asDiagonal() * eig.eigenvectors().transpose();
    return 0.5 * (R + R.transpose());
}

Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& S)
{
    const auto eig = decompose(S);
    const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd inv_sqrt_pd(const Eigen::MatrixXd& S)
{
    const auto eig = decompose(S);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw std::domain_error("matrix is not positive definite");
    const Eigen::VectorXd inv_root = eig.eigenvalues().cwiseSqrt().cwiseInverse();
    return eig.eigenvectors() * inv_root.asDiagonal() * eig.eigenvectors().transpose();
}

double min_eigenvalue(const Eigen::MatrixXd& S)
{
    return decompose(S).eigenvalues().minCoeff();
}

double condition_number(const Eigen::MatrixXd& S)
{
    const auto eig = decompose(S);
    const double lo = eig.eigenvalues().cwiseAbs().minCoeff();
    const double hi = eig.eigenvalues().cwiseAbs().maxCoeff();
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

} // namespace ofd::opt
