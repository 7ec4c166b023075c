#ifndef SYMTENSOR_SDP_HPP
#define SYMTENSOR_SDP_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>

#include "symtensor/tensor.hpp"

namespace symtensor
{

///
/// Dense symmetric matrix in packed upper-triangle storage. Symmetry holds
/// by construction: (i,j) and (j,i) address the same cell.
///
class SymMatrix
{
public:
    SymMatrix() = default;

    explicit SymMatrix(std::size_t n) : n_(n), packed_(n * (n + 1) / 2, 0.0) {}

    /// Symmetrizes (M + M^T) / 2.
    static SymMatrix from_dense(const Matrix& m)
    {
        if (m.rows() != m.cols())
        {
            throw shape_error("SymMatrix::from_dense needs a square matrix");
        }
        SymMatrix s(static_cast<std::size_t>(m.rows()));
        for (std::size_t i = 0; i < s.n_; ++i)
        {
            for (std::size_t j = i; j < s.n_; ++j)
            {
                const auto ii = static_cast<Eigen::Index>(i);
                const auto jj = static_cast<Eigen::Index>(j);
                s.packed_[s.offset(i, j)] = 0.5 * (m(ii, jj) + m(jj, ii));
            }
        }
        return s;
    }

    static SymMatrix identity(std::size_t n)
    {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i)
        {
            s(i, i) = 1.0;
        }
        return s;
    }

    std::size_t size() const noexcept { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return packed_[offset(i, j)]; }
    double& operator()(std::size_t i, std::size_t j) { return packed_[offset(i, j)]; }

    Matrix to_dense() const
    {
        Matrix m(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
        for (std::size_t i = 0; i < n_; ++i)
        {
            for (std::size_t j = i; j < n_; ++j)
            {
                const double v = (*this)(i, j);
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
                m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
            }
        }
        return m;
    }

    double frobenius_norm() const { return to_dense().norm(); }

    /// trace(A B) for symmetric A, B.
    friend double trace_product(const SymMatrix& a, const SymMatrix& b)
    {
        if (a.n_ != b.n_)
        {
            throw shape_error("trace_product: size mismatch");
        }
        double s = 0.0;
        for (std::size_t i = 0; i < a.n_; ++i)
        {
            for (std::size_t j = i; j < a.n_; ++j)
            {
                s += (i == j ? 1.0 : 2.0) * a(i, j) * b(i, j);
            }
        }
        return s;
    }

    SymMatrix operator+(const SymMatrix& b) const { return combine(b, 1.0); }
    SymMatrix operator-(const SymMatrix& b) const { return combine(b, -1.0); }

    SymMatrix operator*(double s) const
    {
        SymMatrix r(*this);
        for (double& v : r.packed_)
        {
            v *= s;
        }
        return r;
    }

private:
    std::size_t offset(std::size_t i, std::size_t j) const
    {
        if (i > j)
        {
            std::swap(i, j);
        }
        if (j >= n_)
        {
            throw std::out_of_range("SymMatrix index out of range");
        }
        // row-major upper triangle
        return i * n_ - i * (i + 1) / 2 + j;
    }

    SymMatrix combine(const SymMatrix& b, double sign) const
    {
        if (b.n_ != n_)
        {
            throw shape_error("SymMatrix size mismatch");
        }
        SymMatrix r(*this);
        for (std::size_t k = 0; k < packed_.size(); ++k)
        {
            r.packed_[k] += sign * b.packed_[k];
        }
        return r;
    }

    std::size_t n_ = 0;
    std::vector<double> packed_;
};

struct SymEigen
{
    Vector values;  ///< ascending
    Matrix vectors; ///< orthonormal columns, matching values
};

///
/// Symmetric eigendecomposition by cyclic Jacobi rotations (at most 30 sweeps).
///
inline SymEigen eig_sym(const SymMatrix& m)
{
    const auto n = static_cast<Eigen::Index>(m.size());
    if (n < 1)
    {
        throw shape_error("eig_sym: empty matrix");
    }
    Matrix a = m.to_dense();
    Matrix v = Matrix::Identity(n, n);
    const double fro = a.norm();
    constexpr int max_sweeps = 30;

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            for (Eigen::Index j = 0; j < n; ++j)
            {
                if (i != j)
                {
                    s += a(i, j) * a(i, j);
                }
            }
        }
        return std::sqrt(s);
    };

    int sweep = 0;
    for (; sweep <= max_sweeps; ++sweep)
    {
        if (fro == 0.0 || off_norm() <= 1e-15 * fro)
        {
            break;
        }
        if (sweep == max_sweeps)
        {
            throw std::runtime_error("eig_sym: Jacobi iteration did not converge in 30 sweeps");
        }
        for (Eigen::Index p = 0; p < n - 1; ++p)
        {
            for (Eigen::Index q = p + 1; q < n; ++q)
            {
                const double apq = a(p, q);
                if (apq == 0.0)
                {
                    continue;
                }
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = tau >= 0.0 ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                            : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k)
                {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k)
                {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k)
                {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(),
              [&](Eigen::Index x, Eigen::Index y) { return a(x, x) < a(y, y); });
    SymEigen out{Vector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k)
    {
        const auto src = order[static_cast<std::size_t>(k)];
        out.values[k] = a(src, src);
        out.vectors.col(k) = v.col(src);
    }
    return out;
}

inline double min_eigenvalue(const SymMatrix& m) { return eig_sym(m).values[0]; }

/// Frobenius-nearest PSD matrix (negative eigenvalues clipped to zero).
inline SymMatrix project_psd(const SymMatrix& m)
{
    const auto e = eig_sym(m);
    const Vector clipped = e.values.cwiseMax(0.0);
    return SymMatrix::from_dense(e.vectors * clipped.asDiagonal() * e.vectors.transpose());
}

///
/// Linear map L from N x N symmetric matrices to R^K where every upper
/// cell (i, j) feeds exactly one row: L(G)_r = sum over ordered cells of
/// G_ij (off-diagonal cells count twice). Its adjoint sends b to the matrix
/// with cell (i, j) equal to b_row(i,j), which is the moment-matrix shape.
///
class AffineSystem
{
public:
    static constexpr std::size_t no_row = static_cast<std::size_t>(-1);

    AffineSystem(std::size_t n, std::size_t k, Vector target)
        : n_(n), k_(k), row_of_(n * (n + 1) / 2, no_row), target_(std::move(target))
    {
        if (target_.size() != static_cast<Eigen::Index>(k_))
        {
            throw shape_error("affine system target length does not match row count");
        }
    }

    void assign(std::size_t i, std::size_t j, std::size_t row)
    {
        if (row >= k_)
        {
            throw shape_error("affine system row out of range");
        }
        row_of_[offset(i, j)] = row;
    }

    std::size_t size() const noexcept { return n_; }
    std::size_t rows() const noexcept { return k_; }
    const Vector& target() const noexcept { return target_; }

    AffineSystem with_target(Vector c) const
    {
        AffineSystem s(*this);
        if (c.size() != target_.size())
        {
            throw shape_error("affine system target length mismatch");
        }
        s.target_ = std::move(c);
        return s;
    }

    std::size_t row(std::size_t i, std::size_t j) const { return row_of_[offset(i, j)]; }

    /// Every cell assigned to some row.
    bool complete() const
    {
        return std::none_of(row_of_.begin(), row_of_.end(),
                            [](std::size_t r) { return r == no_row; });
    }

    Vector apply(const SymMatrix& g) const
    {
        check(g);
        Vector out = Vector::Zero(static_cast<Eigen::Index>(k_));
        for (std::size_t i = 0; i < n_; ++i)
        {
            for (std::size_t j = i; j < n_; ++j)
            {
                out[static_cast<Eigen::Index>(row(i, j))] += (i == j ? 1.0 : 2.0) * g(i, j);
            }
        }
        return out;
    }

    SymMatrix adjoint(const Vector& b) const
    {
        if (b.size() != static_cast<Eigen::Index>(k_))
        {
            throw shape_error("adjoint: vector length mismatch");
        }
        SymMatrix m(n_);
        for (std::size_t i = 0; i < n_; ++i)
        {
            for (std::size_t j = i; j < n_; ++j)
            {
                m(i, j) = b[static_cast<Eigen::Index>(row(i, j))];
            }
        }
        return m;
    }

    /// Number of ordered cells feeding each row (L L^* is this diagonal).
    Vector row_weights() const
    {
        Vector w = Vector::Zero(static_cast<Eigen::Index>(k_));
        for (std::size_t i = 0; i < n_; ++i)
        {
            for (std::size_t j = i; j < n_; ++j)
            {
                w[static_cast<Eigen::Index>(row(i, j))] += (i == j ? 1.0 : 2.0);
            }
        }
        return w;
    }

    /// Frobenius projection onto {G : L(G) = c}; L L^* is diagonal, so the
    /// pseudo-inverse correction is a per-row uniform shift.
    SymMatrix project(const SymMatrix& g, const Vector& c) const
    {
        const Vector w = row_weights();
        const Vector r = c - apply(g);
        Vector lambda = Vector::Zero(r.size());
        for (Eigen::Index k = 0; k < r.size(); ++k)
        {
            if (w[k] > 0.0)
            {
                lambda[k] = r[k] / w[k];
            }
        }
        return g + adjoint(lambda);
    }

    SymMatrix project(const SymMatrix& g) const { return project(g, target_); }

    /// Minimum-norm solution of L(G) = target.
    SymMatrix particular() const { return project(SymMatrix(n_)); }

    /// Frobenius-orthonormal basis of {G : L(G) = 0}.
    std::vector<SymMatrix> null_basis() const
    {
        std::vector<std::vector<std::pair<std::size_t, std::size_t>>> cells(k_);
        for (std::size_t i = 0; i < n_; ++i)
        {
            for (std::size_t j = i; j < n_; ++j)
            {
                cells[row(i, j)].emplace_back(i, j);
            }
        }
        std::vector<SymMatrix> basis;
        for (const auto& group : cells)
        {
            const auto s = static_cast<Eigen::Index>(group.size());
            if (s < 2)
            {
                continue;
            }
            // In coordinates sqrt(w_c) g_c the Frobenius norm is Euclidean and
            // the constraint is a . x = 0 with a_c = sqrt(w_c).
            Vector a(s);
            for (Eigen::Index c = 0; c < s; ++c)
            {
                const auto [i, j] = group[static_cast<std::size_t>(c)];
                a[c] = i == j ? 1.0 : std::sqrt(2.0);
            }
            Eigen::HouseholderQR<Matrix> qr(a);
            const Matrix q = qr.householderQ() * Matrix::Identity(s, s);
            for (Eigen::Index col = 1; col < s; ++col)
            {
                SymMatrix b(n_);
                for (Eigen::Index c = 0; c < s; ++c)
                {
                    const auto [i, j] = group[static_cast<std::size_t>(c)];
                    b(i, j) = q(c, col) / a[c];
                }
                basis.push_back(std::move(b));
            }
        }
        return basis;
    }

private:
    std::size_t offset(std::size_t i, std::size_t j) const
    {
        if (i > j)
        {
            std::swap(i, j);
        }
        if (j >= n_)
        {
            throw std::out_of_range("AffineSystem cell out of range");
        }
        return i * n_ - i * (i + 1) / 2 + j;
    }

    void check(const SymMatrix& g) const
    {
        if (g.size() != n_)
        {
            throw shape_error("affine system: matrix size " + std::to_string(g.size()) +
                              " does not match " + std::to_string(n_));
        }
    }

    std::size_t n_;
    std::size_t k_;
    std::vector<std::size_t> row_of_;
    Vector target_;
};

enum class SdpStatus
{
    feasible,
    infeasible,
    inconclusive
};

inline const char* to_string(SdpStatus s)
{
    switch (s)
    {
    case SdpStatus::feasible: return "feasible";
    case SdpStatus::infeasible: return "infeasible";
    case SdpStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

struct SdpResiduals
{
    double affine = 0.0; ///< ||L(G) - c|| / max(1, ||c||)
    double cone = 0.0;   ///< max(0, -lambda_min) relative to the data scale
    double gap = 0.0;    ///< alternating-projection gap or barrier duality gap
};

struct SdpOutcome
{
    SdpStatus status = SdpStatus::inconclusive;
    std::optional<SymMatrix> primal;
    std::optional<Vector> dual;
    double value = 0.0;
    SdpResiduals residuals;
    int iterations = 0;
};

struct FeasibilityOptions
{
    double tol = 1e-8;
    int max_iter = 50000;
    int check_every = 10;
    int stall_window = 2000;
};

///
/// Dykstra alternating projections between {L(G) = c} and the PSD cone.
///
/// The data are pre-scaled to unit max coefficient. Returns feasible once
/// the affine projection of the iterate has lambda_min >= -tol (relative);
/// returns inconclusive when the gap between the two iterates stops
/// shrinking over a full window. Never reports infeasible.
///
inline SdpOutcome solve_feasibility(const AffineSystem& sys, FeasibilityOptions opt = {})
{
    SdpOutcome out;
    const Vector& c = sys.target();
    const double scale = c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
    if (scale == 0.0)
    {
        out.status = SdpStatus::feasible;
        out.primal = SymMatrix(sys.size());
        return out;
    }
    const Vector cs = c / scale;
    const double cnorm = std::max(1.0, cs.norm());

    SymMatrix x = sys.project(SymMatrix(sys.size()), cs);
    SymMatrix p(sys.size());
    SymMatrix q(sys.size());
    double window_gap = std::numeric_limits<double>::infinity();
    double gap = window_gap;

    for (int it = 1; it <= opt.max_iter; ++it)
    {
        const SymMatrix y = sys.project(x + p, cs);
        p = x + p - y;
        const SymMatrix xn = project_psd(y + q);
        q = y + q - xn;
        gap = (y - xn).frobenius_norm();
        x = xn;
        out.iterations = it;

        if (it % opt.check_every == 0 || it == 1)
        {
            const SymMatrix candidate = sys.project(x, cs);
            const double lmin = min_eigenvalue(candidate);
            if (lmin >= -opt.tol)
            {
                out.status = SdpStatus::feasible;
                out.primal = candidate * scale;
                out.residuals.affine = (sys.apply(candidate) - cs).norm() / cnorm;
                out.residuals.cone = std::max(0.0, -lmin);
                out.residuals.gap = gap;
                return out;
            }
        }
        if (it % opt.stall_window == 0)
        {
            if (gap > opt.tol && gap > 0.5 * window_gap)
            {
                break;
            }
            window_gap = gap;
        }
    }
    const SymMatrix candidate = sys.project(x, cs);
    out.status = SdpStatus::inconclusive;
    out.primal = candidate * scale;
    out.residuals.affine = (sys.apply(candidate) - cs).norm() / cnorm;
    out.residuals.cone = std::max(0.0, -min_eigenvalue(candidate));
    out.residuals.gap = gap;
    return out;
}

namespace detail
{

///
/// minimize f.z subject to F0 + sum_i z_i F_i > 0 and E z = e, by a
/// log-det barrier path-following method started from a strictly feasible
/// z0 with E z0 = e.
///
struct LmiProblem
{
    Matrix f0;
    std::vector<Matrix> fi;
    Vector f;
    Matrix eq;     ///< may have zero rows
    Vector eq_rhs;
};

struct LmiResult
{
    Vector z;
    double objective = 0.0;
    double gap = 0.0; ///< N / tau bound on the duality gap at exit
    int newton_steps = 0;
    bool converged = false;
    Matrix dual; ///< F(z)^{-1} / tau
};

inline Matrix lmi_value(const LmiProblem& p, const Vector& z)
{
    Matrix f = p.f0;
    for (std::size_t i = 0; i < p.fi.size(); ++i)
    {
        f += z[static_cast<Eigen::Index>(i)] * p.fi[i];
    }
    return f;
}

inline LmiResult solve_lmi(const LmiProblem& p, Vector z, double gap_tol, int max_newton,
                           const std::function<bool(const Vector&)>& stop_early = {})
{
    const auto d = static_cast<Eigen::Index>(p.fi.size());
    const double nmat = static_cast<double>(p.f0.rows());
    const Eigen::Index neq = p.eq.rows();
    LmiResult res;
    double tau = 1.0;
    constexpr double mu = 8.0;

    auto barrier = [&](const Vector& x, double t, double& value) {
        const Matrix f = lmi_value(p, x);
        Eigen::LLT<Matrix> llt(f);
        if (llt.info() != Eigen::Success)
        {
            return false;
        }
        const Matrix l = llt.matrixL();
        double logdet = 0.0;
        for (Eigen::Index i = 0; i < l.rows(); ++i)
        {
            if (!(l(i, i) > 0.0))
            {
                return false;
            }
            logdet += 2.0 * std::log(l(i, i));
        }
        value = t * p.f.dot(x) - logdet;
        return std::isfinite(value);
    };

    double phi = 0.0;
    if (!barrier(z, tau, phi))
    {
        throw std::invalid_argument("solve_lmi: starting point is not strictly feasible");
    }

    while (res.newton_steps < max_newton)
    {
        // centering
        for (int inner = 0; inner < 100 && res.newton_steps < max_newton; ++inner)
        {
            const Matrix f = lmi_value(p, z);
            Eigen::LLT<Matrix> llt(f);
            std::vector<Matrix> a(static_cast<std::size_t>(d));
            Vector g(d);
            for (Eigen::Index i = 0; i < d; ++i)
            {
                Matrix t = llt.matrixL().solve(p.fi[static_cast<std::size_t>(i)]);
                a[static_cast<std::size_t>(i)] = llt.matrixL().solve(t.transpose());
                g[i] = tau * p.f[i] - a[static_cast<std::size_t>(i)].trace();
            }
            Matrix h(d, d);
            for (Eigen::Index i = 0; i < d; ++i)
            {
                for (Eigen::Index j = i; j < d; ++j)
                {
                    h(i, j) = (a[static_cast<std::size_t>(i)].array() *
                               a[static_cast<std::size_t>(j)].array())
                                  .sum();
                    h(j, i) = h(i, j);
                }
            }
            Matrix kkt = Matrix::Zero(d + neq, d + neq);
            kkt.topLeftCorner(d, d) = h;
            if (neq > 0)
            {
                kkt.topRightCorner(d, neq) = p.eq.transpose();
                kkt.bottomLeftCorner(neq, d) = p.eq;
            }
            Vector rhs = Vector::Zero(d + neq);
            rhs.head(d) = -g;
            const Vector sol = kkt.completeOrthogonalDecomposition().solve(rhs);
            const Vector step = sol.head(d);
            const double decrement = step.dot(h * step);
            ++res.newton_steps;
            if (!(decrement > 1e-12) || !step.allFinite())
            {
                break;
            }
            double s = 1.0;
            double next = 0.0;
            const double slope = g.dot(step);
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls)
            {
                const Vector trial = z + s * step;
                if (barrier(trial, tau, next) && next <= phi + 1e-4 * s * slope)
                {
                    z = trial;
                    phi = next;
                    moved = true;
                    break;
                }
                s *= 0.5;
            }
            if (!moved || decrement < 1e-10)
            {
                break;
            }
        }
        res.gap = nmat / tau;
        if (stop_early && stop_early(z))
        {
            break;
        }
        if (res.gap <= gap_tol)
        {
            res.converged = true;
            break;
        }
        tau *= mu;
        barrier(z, tau, phi);
    }
    res.z = z;
    res.objective = p.f.dot(z);
    const Matrix f = lmi_value(p, z);
    res.dual = f.llt().solve(Matrix::Identity(f.rows(), f.cols())) / tau;
    return res;
}

inline std::vector<Matrix> dense_all(const std::vector<SymMatrix>& v)
{
    std::vector<Matrix> out;
    out.reserve(v.size());
    for (const auto& s : v)
    {
        out.push_back(s.to_dense());
    }
    return out;
}

} // namespace detail

struct MaxMinEig
{
    double t = 0.0;      ///< largest certified lambda_min over {L(G) = c}
    SymMatrix gram;      ///< a Gram matrix attaining t (up to the gap)
    double gap = 0.0;    ///< duality-gap bound, in the units of c
    double affine_residual = 0.0;
    bool converged = false;
};

/// Raised by max_min_eig when no PSD matrix satisfies the affine system.
class infeasible_system : public std::runtime_error
{
public:
    infeasible_system(const std::string& what, double t) : std::runtime_error(what), t_star(t) {}
    double t_star;
};

///
/// max t subject to L(G) = c and G - t I PSD, solved over the null-space
/// parameterization G = G0 + sum y_i B_i with a log-det barrier. Never
/// throws on infeasibility; see max_min_eig for the checked variant.
///
inline MaxMinEig max_min_eig_unchecked(const AffineSystem& sys, double gap_tol = 1e-11)
{
    const Vector& c = sys.target();
    const double scale = c.size() == 0 ? 0.0 : c.cwiseAbs().maxCoeff();
    if (scale == 0.0)
    {
        // every diagonal cell of a complete system is pinned to zero
        MaxMinEig zero;
        zero.gram = SymMatrix(sys.size());
        zero.converged = true;
        return zero;
    }
    const double unit = scale;
    const AffineSystem scaled = sys.with_target(c / unit);

    const SymMatrix g0 = scaled.particular();
    const auto basis = scaled.null_basis();
    const auto nb = static_cast<Eigen::Index>(basis.size());
    const auto n = static_cast<Eigen::Index>(sys.size());

    detail::LmiProblem p;
    p.f0 = g0.to_dense();
    p.fi = detail::dense_all(basis);
    p.fi.push_back(-Matrix::Identity(n, n));
    p.f = Vector::Zero(nb + 1);
    p.f[nb] = -1.0;
    p.eq = Matrix(0, nb + 1);
    p.eq_rhs = Vector(0);

    Vector z = Vector::Zero(nb + 1);
    z[nb] = min_eigenvalue(g0) - 1.0;
    // the optimum is bounded for complete systems; cap runaway iterates
    auto runaway = [nb](const Vector& x) { return x[nb] > 1e8; };
    const auto r = detail::solve_lmi(p, z, gap_tol, 4000, runaway);

    Matrix g = p.f0;
    for (Eigen::Index i = 0; i < nb; ++i)
    {
        g += r.z[i] * p.fi[static_cast<std::size_t>(i)];
    }
    MaxMinEig out;
    out.gram = SymMatrix::from_dense(g) * unit;
    out.t = min_eigenvalue(out.gram);
    out.gap = r.gap * unit;
    out.converged = r.converged;
    out.affine_residual = (sys.apply(out.gram) - c).norm() / std::max(1.0, c.norm());
    return out;
}

/// Checked variant: throws infeasible_system when t* < -tol * scale.
inline MaxMinEig max_min_eig(const AffineSystem& sys, double tol = 1e-8)
{
    auto r = max_min_eig_unchecked(sys);
    const double scale = sys.target().size() == 0 ? 0.0 : sys.target().cwiseAbs().maxCoeff();
    if (r.t < -tol * std::max(scale, 1e-300) && scale > 0.0)
    {
        throw infeasible_system("max_min_eig: affine system has no PSD solution (t* = " +
                                    std::to_string(r.t) + ")",
                                r.t);
    }
    return r;
}

struct SpectrahedronOptions
{
    double tol = 1e-8;
    int max_iter = 4000; ///< Newton steps across both phases
};

///
/// min <objective, b> subject to M(b) = L^*(b) PSD and trace M(b) = 1.
///
/// A phase-one barrier solve finds a strictly interior start; phase two
/// follows the central path. The result's dual holds b, primal holds M(b),
/// and value the objective. Status is feasible when the final M(b) passes an
/// independent eigenvalue re-check, inconclusive otherwise.
///
inline SdpOutcome minimize_linear_over_spectrahedron(const Vector& objective,
                                                     const AffineSystem& sys,
                                                     SpectrahedronOptions opt = {})
{
    const auto k = static_cast<Eigen::Index>(sys.rows());
    const auto n = static_cast<Eigen::Index>(sys.size());
    if (objective.size() != k)
    {
        throw shape_error("minimize_linear_over_spectrahedron: objective length mismatch");
    }
    SdpOutcome out;

    std::vector<Matrix> mi;
    Vector trace_row = Vector::Zero(k);
    for (Eigen::Index r = 0; r < k; ++r)
    {
        Vector e = Vector::Zero(k);
        e[r] = 1.0;
        mi.push_back(sys.adjoint(e).to_dense());
        trace_row[r] = mi.back().trace();
    }
    Eigen::Index seed_row = -1;
    for (Eigen::Index r = 0; r < k; ++r)
    {
        if (trace_row[r] > 0.0)
        {
            seed_row = r;
            break;
        }
    }
    if (seed_row < 0)
    {
        return out; // no diagonal cells: the normalization cannot hold
    }

    // phase one: max t s.t. M(b) - t I > 0, trace M(b) = 1
    detail::LmiProblem p1;
    p1.f0 = Matrix::Zero(n, n);
    p1.fi = mi;
    p1.fi.push_back(-Matrix::Identity(n, n));
    p1.f = Vector::Zero(k + 1);
    p1.f[k] = -1.0;
    p1.eq = Matrix::Zero(1, k + 1);
    p1.eq.block(0, 0, 1, k) = trace_row.transpose();
    p1.eq_rhs = Vector::Ones(1);
    Vector z1 = Vector::Zero(k + 1);
    z1[seed_row] = 1.0 / trace_row[seed_row];
    z1[k] = std::min(0.0, min_eigenvalue(sys.adjoint(z1.head(k)))) - 1.0;
    auto interior = [k](const Vector& z) { return z[k] > 1e-3; };
    const auto r1 = detail::solve_lmi(p1, z1, 1e-9, opt.max_iter / 2, interior);
    if (!(r1.z[k] > 0.0))
    {
        out.iterations = r1.newton_steps;
        return out; // empty interior
    }

    const double oscale = objective.size() == 0 ? 0.0 : objective.cwiseAbs().maxCoeff();
    Vector b = r1.z.head(k);
    int steps = r1.newton_steps;
    double gap = 0.0;
    if (oscale > 0.0)
    {
        detail::LmiProblem p2;
        p2.f0 = Matrix::Zero(n, n);
        p2.fi = mi;
        p2.f = objective / oscale;
        p2.eq = trace_row.transpose();
        p2.eq_rhs = Vector::Ones(1);
        const auto r2 = detail::solve_lmi(p2, b, opt.tol * 1e-3, opt.max_iter, {});
        b = r2.z;
        steps += r2.newton_steps;
        gap = r2.gap * oscale;
    }

    const SymMatrix m = sys.adjoint(b);
    const double lmin = min_eigenvalue(m);
    out.primal = m;
    out.dual = b;
    out.value = objective.dot(b);
    out.iterations = steps;
    out.residuals.gap = gap;
    out.residuals.cone = std::max(0.0, -lmin);
    out.residuals.affine = std::abs(trace_row.dot(b) - 1.0);
    out.status = lmin >= -opt.tol * std::max(1.0, m.frobenius_norm()) ? SdpStatus::feasible
                                                                       : SdpStatus::inconclusive;
    return out;
}

} // namespace symtensor

#endif // SYMTENSOR_SDP_HPP
