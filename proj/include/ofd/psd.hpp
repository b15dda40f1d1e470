#pragma once

#include <Eigen/Dense>

#include <stdexcept>

namespace ofd::opt
{

class NonFiniteEntries : public std::invalid_argument
{
    public:
        using std::invalid_argument::invalid_argument;
};

// Nearest positive semidefinite matrix in Frobenius norm: the input is
// symmetrized, eigendecomposed and its negative eigenvalues clamped to zero.
Eigen::MatrixXd project_psd(const Eigen::MatrixXd& S);

// Symmetric square root and inverse square root of a positive definite matrix.
Eigen::MatrixXd sqrt_psd(const Eigen::MatrixXd& S);
Eigen::MatrixXd inv_sqrt_pd(const Eigen::MatrixXd& S);

double min_eigenvalue(const Eigen::MatrixXd& S);
double condition_number(const Eigen::MatrixXd& S);

} // namespace ofd::opt
