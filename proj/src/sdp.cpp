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

#include "risia/sdp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>

namespace risia::sdp
{

namespace
{

constexpr double sqrt2 = 1.4142135623730951;

double max_asymmetry(const Eigen::MatrixXd &a)
{
    return (a - a.transpose()).cwiseAbs().maxCoeff();
}

// Packs the upper triangle column by column; off-diagonal entries carry sqrt(2)
// so that svec(A) . svec(B) = tr(A B) for symmetric A, B.
class SvecLayout
{
  public:
    explicit SvecLayout(int n) : n_(n), size_(n * (n + 1) / 2) {}

    int size() const { return size_; }
    int index(int i, int j) const
    {
        if (i > j)
            std::swap(i, j);
        return j * (j + 1) / 2 + i;
    }

    void pack(const Eigen::MatrixXd &m, double *out) const
    {
        int k = 0;
        for (int j = 0; j < n_; ++j)
        {
            for (int i = 0; i < j; ++i)
                out[k++] = sqrt2 * 0.5 * (m(i, j) + m(j, i));
            out[k++] = m(j, j);
        }
    }

    void unpack(const double *in, Eigen::MatrixXd &m) const
    {
        m.resize(n_, n_);
        int k = 0;
        for (int j = 0; j < n_; ++j)
        {
            for (int i = 0; i < j; ++i)
            {
                const double v = in[k++] / sqrt2;
                m(i, j) = v;
                m(j, i) = v;
            }
            m(j, j) = in[k++];
        }
    }

  private:
    int n_;
    int size_;
};

// Projection onto PSD(n) x R_+^k in svec coordinates.
class ConeProjector
{
  public:
    ConeProjector(int n, int num_nonneg) : layout_(n), n_(n), num_nonneg_(num_nonneg) {}

    void project(Eigen::VectorXd &v)
    {
        if (n_ > 0)
        {
            layout_.unpack(v.data(), work_);
            solver_.compute(work_, "Eigendecomposition failed in PSD projection.");
            const auto &evals = solver_.eigenvalues();
            const auto &evecs = solver_.eigenvectors();
            int first = 0;
            while (first < n_ && evals(first) <= 0.0)
                ++first;
            if (first == n_)
                work_.setZero();
            else
            {
                const int k = n_ - first;
                scaled_ = evecs.rightCols(k) * evals.tail(k).cwiseSqrt().asDiagonal();
                work_.noalias() = scaled_ * scaled_.transpose();
            }
            layout_.pack(work_, v.data());
        }
        auto tail = v.tail(num_nonneg_);
        tail = tail.cwiseMax(0.0);
    }

    // Norm of the component of v inside the cone.
    double positive_part_norm(const Eigen::VectorXd &v)
    {
        Eigen::VectorXd p = v;
        project(p);
        return p.norm();
    }

  private:
    SvecLayout layout_;
    int n_;
    int num_nonneg_;
    SymmetricEigen<Eigen::MatrixXd> solver_;
    Eigen::MatrixXd work_;
    Eigen::MatrixXd scaled_;
};

struct StandardForm
{
    Eigen::SparseMatrix<double, Eigen::RowMajor> a; // rows normalized to unit norm
    Eigen::VectorXd b;
    Eigen::VectorXd c;            // minimization objective, normalized
    double c_scale = 1.0;         // original ||c||
    Eigen::VectorXd scalar_scale; // auxiliary scalar k is stored as s_k / scalar_scale(k)
    int num_vars = 0;
    int num_nonneg = 0;
};

StandardForm to_standard_form(const SdpProblem &p)
{
    const SvecLayout layout(p.dim);
    const int nv = layout.size();
    int num_ineq = 0;
    for (const auto &con : p.constraints)
        if (con.sense != Sense::equal)
            ++num_ineq;

    StandardForm sf;
    sf.num_nonneg = p.num_scalars + num_ineq;
    sf.num_vars = nv + sf.num_nonneg;

    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> rhs;
    Eigen::VectorXd row(sf.num_vars);
    int slack_col = nv + p.num_scalars;
    int r = 0;

    // Scalars can live on a very different scale than X (e.g. an SNR next to unit-modulus
    // entries). Each one is rescaled so that its coefficients match the matrix part of the
    // rows it appears in (geometric mean over those rows).
    sf.scalar_scale = Eigen::VectorXd::Ones(p.num_scalars);
    {
        Eigen::VectorXd log_sum = Eigen::VectorXd::Zero(p.num_scalars);
        Eigen::VectorXi count = Eigen::VectorXi::Zero(p.num_scalars);
        for (const auto &con : p.constraints)
        {
            if (con.scalar_coeffs.size() == 0)
                continue;
            row.setZero();
            layout.pack(con.a, row.data());
            const double matrix_norm = row.head(nv).norm();
            if (matrix_norm == 0.0)
                continue;
            for (int k = 0; k < p.num_scalars; ++k)
                if (con.scalar_coeffs(k) != 0.0)
                {
                    log_sum(k) += std::log(matrix_norm / std::abs(con.scalar_coeffs(k)));
                    ++count(k);
                }
        }
        for (int k = 0; k < p.num_scalars; ++k)
            if (count(k) > 0)
                sf.scalar_scale(k) = std::exp(log_sum(k) / count(k));
    }

    auto push_row = [&](double bound)
    {
        const double norm = row.norm();
        if (norm == 0.0)
        {
            rhs.push_back(bound); // kept so that 0 = b != 0 is detected as inconsistent
            ++r;
            return;
        }
        for (int k = 0; k < sf.num_vars; ++k)
            if (row(k) != 0.0)
                triplets.emplace_back(r, k, row(k) / norm);
        rhs.push_back(bound / norm);
        ++r;
    };

    for (const auto &con : p.constraints)
    {
        row.setZero();
        layout.pack(con.a, row.data());
        if (con.scalar_coeffs.size() > 0)
            row.segment(nv, p.num_scalars) = con.scalar_coeffs.cwiseProduct(sf.scalar_scale);
        if (con.sense != Sense::equal)
        {
            // The slack is expressed in the units of the constraint it relaxes.
            const double sigma = row.norm() > 0.0 ? row.norm() : 1.0;
            row(slack_col++) = con.sense == Sense::greater_equal ? -sigma : sigma;
        }
        push_row(con.bound);
    }
    for (const auto &fe : p.fixed_entries)
    {
        row.setZero();
        row(layout.index(fe.row, fe.col)) = fe.row == fe.col ? 1.0 : 1.0 / sqrt2;
        push_row(fe.value);
    }

    sf.a.resize(r, sf.num_vars);
    sf.a.setFromTriplets(triplets.begin(), triplets.end());
    sf.b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), r);

    sf.c = Eigen::VectorXd::Zero(sf.num_vars);
    layout.pack(p.objective, sf.c.data());
    if (p.num_scalars > 0 && p.scalar_objective.size() > 0)
        sf.c.segment(nv, p.num_scalars) = p.scalar_objective.cwiseProduct(sf.scalar_scale);
    sf.c = -sf.c;
    const double cn = sf.c.norm();
    if (cn > 0.0)
    {
        sf.c /= cn;
        sf.c_scale = cn;
    }
    return sf;
}

} // namespace

std::string to_string(SolveStatus status)
{
    switch (status)
    {
    case SolveStatus::optimal:
        return "optimal";
    case SolveStatus::infeasible:
        return "infeasible";
    case SolveStatus::max_iters:
        return "max_iters";
    }
    return "unknown";
}

void SdpProblem::validate() const
{
    if (dim < 0 || num_scalars < 0)
        throw std::invalid_argument("SDP dimensions cannot be negative.");
    auto check_matrix = [&](const Eigen::MatrixXd &m, const char *what)
    {
        if (m.rows() != dim || m.cols() != dim)
            throw std::invalid_argument(std::string(what) + " has inconsistent dimensions.");
        if (dim > 0 && max_asymmetry(m) > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()))
            throw std::invalid_argument(std::string(what) + " is not symmetric.");
    };
    check_matrix(objective, "Objective matrix");
    if (num_scalars > 0 && scalar_objective.size() != 0 && scalar_objective.size() != num_scalars)
        throw std::invalid_argument("Scalar objective length must equal the number of scalars.");
    for (const auto &con : constraints)
    {
        check_matrix(con.a, "Constraint matrix");
        if (con.scalar_coeffs.size() != 0 && con.scalar_coeffs.size() != num_scalars)
            throw std::invalid_argument("Constraint scalar coefficients have inconsistent length.");
        if (!std::isfinite(con.bound))
            throw std::invalid_argument("Constraint bound must be finite.");
    }
    for (const auto &fe : fixed_entries)
        if (fe.row < 0 || fe.col < 0 || fe.row >= dim || fe.col >= dim || !std::isfinite(fe.value))
            throw std::invalid_argument("Fixed entry out of range.");
    if (initial && (initial->rows() != dim || initial->cols() != dim))
        throw std::invalid_argument("Initial iterate has inconsistent dimensions.");
}

SdpSolution solve(const SdpProblem &problem, const SolverSettings &settings)
{
    problem.validate();
    if (!(settings.tol > 0.0) || settings.max_iters < 1)
        throw std::invalid_argument("Solver tolerance must be positive and max_iters at least 1.");

    const StandardForm sf = to_standard_form(problem);
    const SvecLayout layout(problem.dim);
    const int nv = layout.size();
    const int d = sf.num_vars;
    const int m = static_cast<int>(sf.b.size());
    const Eigen::SparseMatrix<double, Eigen::ColMajor> at = sf.a.transpose();

    SdpSolution sol;

    auto finish = [&](const Eigen::VectorXd &z, const Eigen::VectorXd &y)
    {
        layout.unpack(z.data(), sol.x);
        sol.scalars = z.segment(nv, problem.num_scalars).cwiseProduct(sf.scalar_scale);
        sol.objective_value = problem.dim > 0 ? (problem.objective.cwiseProduct(sol.x)).sum() : 0.0;
        if (problem.num_scalars > 0 && problem.scalar_objective.size() > 0)
            sol.objective_value += problem.scalar_objective.dot(sol.scalars);
        sol.dual_objective = y.size() > 0 ? -sf.c_scale * sf.b.dot(y) : 0.0;
        return sol;
    };

    // Pseudo-inverse of A A^T; rank-deficient but consistent systems are fine.
    Eigen::MatrixXd gram = Eigen::MatrixXd(sf.a * at);
    Eigen::MatrixXd gram_pinv = Eigen::MatrixXd::Zero(m, m);
    if (m > 0)
    {
        const SymmetricEigen<Eigen::MatrixXd> es(gram, "Eigendecomposition of the constraint Gram matrix failed.");
        const double cutoff = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        Eigen::VectorXd inv = es.eigenvalues();
        for (int i = 0; i < m; ++i)
            inv(i) = inv(i) > cutoff ? 1.0 / inv(i) : 0.0;
        gram_pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
    }

    // Inconsistent equalities: the affine set itself is empty.
    {
        const Eigen::VectorXd x0 = at * (gram_pinv * sf.b);
        const Eigen::VectorXd res = sf.a * x0 - sf.b;
        if (res.norm() > 1e-9 * (1.0 + sf.b.norm()))
        {
            sol.status = SolveStatus::infeasible;
            sol.residuals.primal = res.norm() / (1.0 + sf.b.norm());
            return finish(x0, Eigen::VectorXd::Zero(m));
        }
    }

    ConeProjector cone(problem.dim, sf.num_nonneg);

    Eigen::VectorXd z = Eigen::VectorXd::Zero(d);
    if (problem.initial)
    {
        layout.pack(*problem.initial, z.data());
        cone.project(z);
    }
    Eigen::VectorXd u = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd x(d), w(d), z_prev(d), y(m), best_z = z, best_y = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd affine_res(m);
    double rho = settings.rho;
    double best_score = std::numeric_limits<double>::infinity();
    Residuals best_res{1.0, 1.0, 1.0};

    // Divergence monitor state, sampled every `window` iterations.
    const int window = std::max(settings.divergence_window, settings.check_every);
    Eigen::VectorXd y_anchor = Eigen::VectorXd::Zero(m);
    double gap_anchor = -1.0;
    int plateau_count = 0;

    const double norm_b = sf.b.norm();

    int it = 0;
    for (it = 1; it <= settings.max_iters; ++it)
    {
        w = z - u - sf.c / rho;
        affine_res.noalias() = sf.a * w;
        affine_res -= sf.b;
        const Eigen::VectorXd mu = gram_pinv * affine_res;
        x = w;
        x.noalias() -= at * mu;

        z_prev = z;
        z = x + u;
        cone.project(z);
        u += x - z;

        const bool check = it % settings.check_every == 0 || it == settings.max_iters;
        if (!check)
            continue;

        y = -rho * mu;
        const Eigen::VectorXd s = -rho * u;
        const Eigen::VectorXd aty = at * y;
        Residuals res;
        res.primal = (sf.a * z - sf.b).norm() / (1.0 + norm_b);
        res.dual = (sf.c - aty - s).norm() / (1.0 + sf.c.norm());
        const double pobj = sf.c.dot(z);
        const double dobj = sf.b.dot(y);
        res.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));

        const double score = std::max({res.primal, res.dual, res.gap});
        if (score < best_score)
        {
            best_score = score;
            best_res = res;
            best_z = z;
            best_y = y;
        }
        if (res.primal <= settings.tol && res.dual <= settings.tol && res.gap <= settings.tol)
        {
            sol.status = SolveStatus::optimal;
            sol.residuals = res;
            sol.iterations = it;
            return finish(z, y);
        }

        // Infeasibility: the gap between affine set and cone stops shrinking while
        // the dual iterate runs off along a Farkas direction.
        if (it % window == 0)
        {
            const double gap_now = (x - z).norm();
            if (gap_anchor > 0.0 && gap_now > 1e3 * settings.tol && std::abs(gap_now - gap_anchor) <= 1e-2 * gap_now)
            {
                const Eigen::VectorXd dir = y - y_anchor;
                const Eigen::VectorXd atd = at * dir;
                const double bd = sf.b.dot(dir);
                if (bd > 0.0 && cone.positive_part_norm(atd) <= 1e-2 * atd.norm())
                    ++plateau_count;
                else
                    plateau_count = 0;
            }
            else
                plateau_count = 0;
            if (plateau_count >= 2)
            {
                sol.status = SolveStatus::infeasible;
                sol.residuals = res;
                sol.iterations = it;
                return finish(z, y);
            }
            gap_anchor = gap_now;
            y_anchor = y;
        }

        // Residual balancing; the affine projection does not depend on rho.
        if (settings.adaptive_rho && it % (5 * settings.check_every) == 0)
        {
            const double rp = (x - z).norm() / std::max({x.norm(), z.norm(), 1e-12});
            const double rd = (rho * (z - z_prev)).norm() / std::max({sf.c.norm(), s.norm(), aty.norm(), 1e-12});
            if (rp > 0.0 && rd > 0.0)
            {
                const double ratio = std::sqrt(rp / rd);
                if (ratio > 5.0 || ratio < 0.2)
                {
                    const double new_rho = std::clamp(rho * ratio, 1e-6, 1e6);
                    u *= rho / new_rho;
                    rho = new_rho;
                }
            }
        }
    }

    sol.status = SolveStatus::max_iters;
    sol.residuals = best_res;
    sol.iterations = settings.max_iters;
    return finish(best_z, best_y);
}

Eigen::MatrixXd hermitian_to_real(const Eigen::MatrixXcd &h)
{
    if (h.rows() != h.cols())
        throw std::invalid_argument("Hermitian embedding requires a square matrix.");
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    if (h.size() > 0 && (h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("Matrix is not Hermitian.");
    const Eigen::Index n = h.rows();
    Eigen::MatrixXd out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = h.real();
    out.topRightCorner(n, n) = -h.imag();
    out.bottomLeftCorner(n, n) = h.imag();
    out.bottomRightCorner(n, n) = h.real();
    return out;
}

Eigen::MatrixXcd real_to_hermitian(const Eigen::MatrixXd &x)
{
    if (x.rows() != x.cols() || x.rows() % 2 != 0)
        throw std::invalid_argument("Real embedding must be square with even dimension.");
    const Eigen::Index n = x.rows() / 2;
    const Eigen::MatrixXd re = 0.5 * (x.topLeftCorner(n, n) + x.bottomRightCorner(n, n));
    const Eigen::MatrixXd im = 0.5 * (x.bottomLeftCorner(n, n) - x.topRightCorner(n, n));
    Eigen::MatrixXcd h(n, n);
    h.real() = re;
    h.imag() = im;
    return 0.5 * (h + h.adjoint());
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd &s)
{
    if (s.rows() != s.cols())
        throw std::invalid_argument("PSD projection requires a square matrix.");
    if (s.size() == 0)
        return s;
    const Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    const SymmetricEigen<Eigen::MatrixXd> es(sym, "Eigendecomposition failed in PSD projection.");
    const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd p = es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
    return 0.5 * (p + p.transpose());
}

void dump_sparse(const SdpProblem &problem, std::ostream &out)
{
    problem.validate();
    const auto old_precision = out.precision();
    out << std::setprecision(17);
    out << "# dim " << problem.dim << "\n";
    out << "# constraints " << problem.constraints.size() << " fixed " << problem.fixed_entries.size()
        << " scalars " << problem.num_scalars << "\n";
    out << "# sense/bound lines: b <id> <sense> <bound>; scalar lines: s <id> <index> <value>\n";

    auto dump_matrix = [&](int id, const Eigen::MatrixXd &a)
    {
        for (int j = 0; j < a.cols(); ++j)
            for (int i = 0; i <= j; ++i)
                if (a(i, j) != 0.0)
                    out << id << " " << i + 1 << " " << j + 1 << " " << a(i, j) << "\n";
    };
    dump_matrix(0, problem.objective);
    for (int k = 0; k < problem.scalar_objective.size(); ++k)
        if (problem.scalar_objective(k) != 0.0)
            out << "s 0 " << k + 1 << " " << problem.scalar_objective(k) << "\n";

    int id = 1;
    for (const auto &con : problem.constraints)
    {
        dump_matrix(id, con.a);
        for (int k = 0; k < con.scalar_coeffs.size(); ++k)
            if (con.scalar_coeffs(k) != 0.0)
                out << "s " << id << " " << k + 1 << " " << con.scalar_coeffs(k) << "\n";
        const char *sense = con.sense == Sense::equal ? "=" : (con.sense == Sense::greater_equal ? ">=" : "<=");
        out << "b " << id << " " << sense << " " << con.bound << "\n";
        ++id;
    }
    for (const auto &fe : problem.fixed_entries)
    {
        const int i = std::min(fe.row, fe.col);
        const int j = std::max(fe.row, fe.col);
        out << id << " " << i + 1 << " " << j + 1 << " " << (i == j ? 1.0 : 0.5) << "\n";
        out << "b " << id << " = " << fe.value << "\n";
        ++id;
    }
    out.precision(old_precision);
}

} // namespace risia::sdp
