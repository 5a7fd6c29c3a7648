// SPDX-License-Identifier: Apache-2.0
//
// risia: initial access optimization for RIS-assisted mmWave cells
// Copyright (C) 2026 The risia authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef RISIA_SDP_HPP
#define RISIA_SDP_HPP

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace risia::sdp
{

enum class Sense
{
    greater_equal,
    equal,
    less_equal
};

// tr(A X) + scalar_coeffs^T s  (sense)  bound
struct Constraint
{
    Eigen::MatrixXd a;
    Sense sense = Sense::equal;
    double bound = 0.0;
    Eigen::VectorXd scalar_coeffs; // empty = no auxiliary scalars involved
};

struct FixedEntry
{
    int row = 0;
    int col = 0;
    double value = 0.0;
};

// maximize tr(C X) + scalar_objective^T s
// subject to the constraints, the fixed entries, X >= 0 (PSD) and s >= 0.
//
// The auxiliary scalars s are 1x1 PSD blocks next to X; they carry slack-like
// quantities that appear linearly in the objective.
struct SdpProblem
{
    int dim = 0;
    Eigen::MatrixXd objective;
    std::vector<Constraint> constraints;
    std::vector<FixedEntry> fixed_entries;
    int num_scalars = 0;
    Eigen::VectorXd scalar_objective;
    std::optional<Eigen::MatrixXd> initial; // warm start for X

    // Throws std::invalid_argument on inconsistent sizes or asymmetric data.
    void validate() const;
};

enum class SolveStatus
{
    optimal,
    infeasible,
    max_iters
};

std::string to_string(SolveStatus status);

struct Residuals
{
    double primal = 0.0; // relative equality violation of the returned iterate
    double dual = 0.0;   // relative dual feasibility violation
    double gap = 0.0;    // relative duality gap
};

struct SdpSolution
{
    Eigen::MatrixXd x;       // PSD up to round-off
    Eigen::VectorXd scalars; // nonnegative auxiliary scalars
    double objective_value = 0.0;
    double dual_objective = 0.0; // upper bound on the optimum when converged
    SolveStatus status = SolveStatus::max_iters;
    Residuals residuals;
    int iterations = 0;
};

struct SolverSettings
{
    double tol = 1e-7;
    int max_iters = 50000;
    int divergence_window = 500;
    double rho = 1.0;
    bool adaptive_rho = true;
    int check_every = 10; // residuals are evaluated every k iterations
};

class numerical_error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Eigendecomposition of a self-adjoint matrix (real or complex), eigenvalues ascending.
// Eigen's tridiagonal QR can stop without converging on matrices with exactly repeated
// eigenvalues, depending on how the compiler vectorizes it. On failure the decomposition
// is retried on A + shift I (same eigenvectors) for a few shifts before giving up.
template <typename Matrix>
class SymmetricEigen
{
  public:
    SymmetricEigen() = default;

    SymmetricEigen(const Matrix &a, const char *what) { compute(a, what); }

    void compute(const Matrix &a, const char *what)
    {
        solver_.compute(a, Eigen::ComputeEigenvectors);
        if (solver_.info() == Eigen::Success)
        {
            eigenvalues_ = solver_.eigenvalues();
            return;
        }
        const double scale = a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
        if (std::isfinite(scale) && scale > 0.0)
            for (double fraction : {1.0 / 64.0, 1.0 / 8.0, 0.5})
            {
                const double shift = fraction * scale;
                solver_.compute(a + shift * Matrix::Identity(a.rows(), a.cols()), Eigen::ComputeEigenvectors);
                if (solver_.info() == Eigen::Success)
                {
                    eigenvalues_ = solver_.eigenvalues().array() - shift;
                    return;
                }
            }
        throw numerical_error(what);
    }

    const Eigen::VectorXd &eigenvalues() const { return eigenvalues_; }
    const Matrix &eigenvectors() const { return solver_.eigenvectors(); }

  private:
    Eigen::SelfAdjointEigenSolver<Matrix> solver_;
    Eigen::VectorXd eigenvalues_;
};

// ADMM on the standard form min c^T x, A x = b, x in (PSD x R_+): alternates the
// projection onto the affine set (cached pseudo-inverse of A A^T) with the
// projection onto the cone (eigenvalue clamp). Deterministic for fixed input.
SdpSolution solve(const SdpProblem &problem, const SolverSettings &settings = {});

// [[Re H, -Im H], [Im H, Re H]]; throws std::invalid_argument unless H is Hermitian within 1e-12.
Eigen::MatrixXd hermitian_to_real(const Eigen::MatrixXcd &h);

// Inverse of hermitian_to_real; averages the two copies of each block.
Eigen::MatrixXcd real_to_hermitian(const Eigen::MatrixXd &x);

// Frobenius-nearest PSD matrix. Throws numerical_error if the eigendecomposition fails.
Eigen::MatrixXd psd_project(const Eigen::MatrixXd &s);

// One line per nonzero: "<matrix-id> <row> <col> <value>", 1-based indices, upper
// triangle only. Matrix 0 is the objective, i = 1..m the constraints in order
// (fixed entries follow as unit matrices). Header lines start with '#'.
void dump_sparse(const SdpProblem &problem, std::ostream &out);

} // namespace risia::sdp

#endif
