#pragma once

// Bounded-variable revised primal simplex shared by solve_lp and the branch
// and bound driver. Rows are stored as  A x + s = b  with one slack per row;
// a slack's bounds encode the row sense. The explicit basis inverse is kept
// dense and updated by elementary row operations.

#include "ofd/lp.hpp"

#include <Eigen/Dense>

#include <vector>

namespace ofd::opt::detail
{

class BoundedSimplex
{
    public:
        // validated: the caller already ran lp.validate()
        BoundedSimplex(const LinearProgram& lp, const LpOptions& options, bool validated = false);

        int num_rows() const { return m_; }
        int num_structural() const { return n_; }

        // replaces the structural bounds; the current basis is kept
        void set_bounds(const Eigen::VectorXd& lower, const Eigen::VectorXd& upper);

        // runs phase 1/2 from the current basis
        SolveResult solve();

        Basis basis() const;
        // false (and the current basis kept) when the shape does not match
        bool load_basis(const Basis& basis);

    private:
        enum class State : char { Basic, Lower, Upper, Zero };

        void place_nonbasic(int j);
        void compute_basic_values();
        void reinvert();
        double residual() const;
        bool primal_feasible(double tol) const;
        void fill_result(SolveResult& result) const;

        // column access: structural j < n_, slack j >= n_
        template<typename F> void for_column(int j, F&& f) const
        {
            if (j >= n_)
            {
                f(j - n_, 1.0);
                return;
            }
            for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
                f(row_index_[k], values_[k]);
        }

        LpOptions options_;
        int m_ = 0;
        int n_ = 0;
        int total_ = 0;
        double feas_tol_ = 0.0;
        long iteration_limit_ = 0;

        std::vector<int> col_start_;
        std::vector<int> row_index_;
        std::vector<double> values_;

        Eigen::VectorXd b_;
        Eigen::VectorXd cost_;   // size total_
        Eigen::VectorXd lo_;     // size total_
        Eigen::VectorXd hi_;
        Eigen::VectorXd x_;

        std::vector<int> head_;  // basic variable per row position
        std::vector<State> state_;
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> binv_;
        long pivots_since_check_ = 0;
        long total_iterations_ = 0;
};

} // namespace ofd::opt::detail
