#ifndef SYMTENSOR_SPECTRAL_HPP
#define SYMTENSOR_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/LU>

#include "symtensor/random.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor
{

class unsupported_order : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

/// Scale used by all relative thresholds: the largest |entry|.
inline double scale(const SymmetricTensor& a) { return a.max_abs(); }

struct HEigenPair
{
    double lambda = 0.0;
    Vector x;                  ///< sum_i x_i^m == 1
    double kkt_residual = 0.0; ///< ||A x^{m-1} - lambda x^{[m-1]}||_inf
    bool converged = false;    ///< kkt_residual <= 1e-8 * max(1, scale(A))
    int restarts_used = 0;
};

enum class ProbeStatus
{
    positive,
    zero_boundary,
    negative_witness
};

inline const char* to_string(ProbeStatus s)
{
    switch (s)
    {
    case ProbeStatus::positive: return "positive";
    case ProbeStatus::zero_boundary: return "zero_boundary";
    case ProbeStatus::negative_witness: return "negative_witness";
    }
    return "?";
}

struct ProbeReport
{
    double min_value = 0.0;
    Vector argmin;
    ProbeStatus status = ProbeStatus::zero_boundary;
    int restarts_used = 0;
    double threshold = 0.0; ///< zero band half-width, 1e-8 * scale of the equilibrated tensor
    Vector scaling;         ///< equilibration d; min_value == eval(A, argmin)
};

struct SearchOptions
{
    int restarts = 0; ///< 0 selects 8 n
    std::uint64_t seed = 0;
    int max_iter = 5000;
    double grad_tol = 1e-10;
};

namespace detail
{

inline Vector entrywise_pow(const Vector& x, int p)
{
    Vector y(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
    {
        y[i] = std::pow(x[i], p);
    }
    return y;
}

/// Radial projection onto {sum x_i^m = 1}; m even.
inline Vector to_sphere(const Vector& x, int m)
{
    const double s = entrywise_pow(x, m).sum();
    return x / std::pow(s, 1.0 / m);
}

/// Euclidean projection onto the standard simplex.
inline Vector to_simplex(const Vector& v)
{
    Vector u = v;
    std::sort(u.data(), u.data() + u.size(), std::greater<double>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i)
    {
        cumulative += u[i];
        const double t = (cumulative - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0)
        {
            theta = t;
        }
    }
    return (v.array() - theta).cwiseMax(0.0).matrix();
}

/// Starting points: the first half random, the rest coordinate vectors then
/// sign patterns (1, +-1, ..., +-1).
inline std::vector<Vector> sphere_starts(int n, int count, std::uint64_t seed)
{
    std::vector<Vector> starts;
    const int random_count = count - count / 2;
    for (int r = 0; r < random_count; ++r)
    {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(r));
        starts.push_back(random_normal(rng, n));
    }
    std::vector<Vector> structured;
    for (int i = 0; i < n; ++i)
    {
        structured.push_back(Vector::Unit(n, i));
    }
    const std::uint64_t patterns = n >= 20 ? (1u << 19) : (std::uint64_t{1} << (n - 1));
    for (std::uint64_t mask = 0; mask < patterns; ++mask)
    {
        Vector v = Vector::Ones(n);
        for (int i = 1; i < n; ++i)
        {
            if ((mask >> (i - 1)) & 1u)
            {
                v[i] = -1.0;
            }
        }
        structured.push_back(v);
        if (structured.size() >= static_cast<std::size_t>(count))
        {
            break;
        }
    }
    for (int r = random_count, k = 0; r < count; ++r, ++k)
    {
        if (k < static_cast<int>(structured.size()))
        {
            starts.push_back(structured[static_cast<std::size_t>(k)]);
        }
        else
        {
            auto rng = make_stream(seed, static_cast<std::uint64_t>(r));
            starts.push_back(random_normal(rng, n));
        }
    }
    return starts;
}

/// KKT residual of (lambda, x) with lambda = A x^m / sum x^m.
inline double kkt_residual(const SymmetricTensor& a, const Vector& x, double lambda)
{
    return (grad(a, x) - lambda * entrywise_pow(x, a.order() - 1)).cwiseAbs().maxCoeff();
}

/// Newton step on F(x, l) = [A x^{m-1} - l x^{[m-1]}; sum x^m - 1].
inline bool kkt_newton_step(const SymmetricTensor& a, Vector& x, double& lambda)
{
    const int m = a.order();
    const auto n = x.size();
    Matrix j = Matrix::Zero(n + 1, n + 1);
    const Vector xm2 = entrywise_pow(x, m - 2);
    const Vector xm1 = entrywise_pow(x, m - 1);
    j.topLeftCorner(n, n) = (m - 1.0) * hessian(a, x);
    j.topLeftCorner(n, n).diagonal() -= (m - 1.0) * lambda * xm2;
    j.block(0, n, n, 1) = -xm1;
    j.block(n, 0, 1, n) = m * xm1.transpose();
    Vector f(n + 1);
    f.head(n) = grad(a, x) - lambda * xm1;
    f[n] = entrywise_pow(x, m).sum() - 1.0;
    Eigen::FullPivLU<Matrix> lu(j);
    if (!lu.isInvertible())
    {
        return false;
    }
    const Vector d = lu.solve(-f);
    if (!d.allFinite())
    {
        return false;
    }
    x += d.head(n);
    lambda += d[n];
    return true;
}

/// Local minimization of A x^m on the m-sphere from x0 (A pre-normalized).
inline Vector sphere_descent(const SymmetricTensor& a, Vector x, const SearchOptions& opt)
{
    const int m = a.order();
    x = to_sphere(x, m);
    double f = eval(a, x);
    for (int it = 0; it < opt.max_iter; ++it)
    {
        const Vector g = grad(a, x);
        const Vector c = entrywise_pow(x, m - 1);
        const Vector d = g - (g.dot(c) / c.squaredNorm()) * c;
        const double dn = d.norm();
        if (dn <= opt.grad_tol)
        {
            break;
        }
        // a Newton step on the KKT system is taken whenever it decreases f;
        // otherwise fall back to Armijo on the projected gradient
        Vector xn = x;
        double ln = f;
        if (kkt_newton_step(a, xn, ln) && xn.allFinite() && xn.norm() > 0.0)
        {
            xn = to_sphere(xn, m);
            const double fn = eval(a, xn);
            if (fn < f - 1e-4 * dn * (xn - x).norm())
            {
                x = xn;
                f = fn;
                continue;
            }
        }
        double step = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls)
        {
            const Vector trial = to_sphere(x - step * d, m);
            const double ft = eval(a, trial);
            if (ft <= f - 1e-4 * step * dn * dn)
            {
                x = trial;
                f = ft;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved)
        {
            break;
        }
    }
    return x;
}

/// Newton polish on the KKT system, keeping the iterate with smallest residual.
inline void kkt_refine(const SymmetricTensor& a, Vector& x, double& lambda, double& residual)
{
    const int m = a.order();
    residual = kkt_residual(a, x, lambda);
    for (int it = 0; it < 50 && residual > 0.0; ++it)
    {
        Vector xn = x;
        double ln = lambda;
        if (!kkt_newton_step(a, xn, ln) || !xn.allFinite())
        {
            break;
        }
        xn = to_sphere(xn, m);
        ln = eval(a, xn);
        const double rn = kkt_residual(a, xn, ln);
        if (!(rn < residual) || ln > lambda + 1e-12 * (1.0 + std::abs(lambda)))
        {
            break;
        }
        x = xn;
        lambda = ln;
        residual = rn;
    }
}

/// Local minimization of A x^m over the simplex by projected gradient.
inline Vector simplex_descent(const SymmetricTensor& a, Vector x, const SearchOptions& opt)
{
    x = to_simplex(x);
    double f = eval(a, x);
    const double m = a.order();
    for (int it = 0; it < opt.max_iter; ++it)
    {
        const Vector g = m * grad(a, x);
        if ((x - to_simplex(x - g)).norm() <= opt.grad_tol)
        {
            break;
        }
        double step = 1.0;
        bool moved = false;
        for (int ls = 0; ls < 60; ++ls)
        {
            const Vector trial = to_simplex(x - step * g);
            const double ft = eval(a, trial);
            if (ft <= f - 1e-4 / step * (trial - x).squaredNorm())
            {
                moved = (trial - x).norm() > 0.0;
                x = trial;
                f = ft;
                break;
            }
            step *= 0.5;
        }
        if (!moved)
        {
            break;
        }
    }
    return x;
}

inline void for_each_grid_point(int n, int steps, const auto& visit)
{
    std::vector<int> k(static_cast<std::size_t>(n), 0);
    auto rec = [&](auto&& self, int pos, int remaining) -> void {
        if (pos == n - 1)
        {
            k[static_cast<std::size_t>(pos)] = remaining;
            Vector x(n);
            for (int i = 0; i < n; ++i)
            {
                x[i] = static_cast<double>(k[static_cast<std::size_t>(i)]) / steps;
            }
            visit(x);
            return;
        }
        for (int v = remaining; v >= 0; --v)
        {
            k[static_cast<std::size_t>(pos)] = v;
            self(self, pos + 1, remaining - v);
        }
    };
    rec(rec, 0, steps);
}

inline ProbeStatus classify(double value, double threshold)
{
    if (value > threshold)
    {
        return ProbeStatus::positive;
    }
    if (value < -threshold)
    {
        return ProbeStatus::negative_witness;
    }
    return ProbeStatus::zero_boundary;
}

inline void require_even(const SymmetricTensor& a, const char* what)
{
    if (a.order() % 2 != 0)
    {
        throw unsupported_order(std::string(what) + " needs even order, got " +
                                std::to_string(a.order()));
    }
}

} // namespace detail

///
/// Smallest H-eigenvalue for even m: the minimum of A x^m over
/// sum_i x_i^m = 1, found by multi-start local search (Newton steps on the
/// KKT system when they descend, Armijo projected gradient otherwise) and
/// finished with Newton refinement.
///
inline HEigenPair min_h_eigenvalue(const SymmetricTensor& a, SearchOptions opt = {})
{
    detail::require_even(a, "min_h_eigenvalue");
    const int n = a.dim();
    const int restarts = opt.restarts > 0 ? opt.restarts : 8 * n;
    const double s = scale(a);
    HEigenPair best;
    best.restarts_used = restarts;
    if (s == 0.0)
    {
        best.x = detail::to_sphere(Vector::Unit(n, 0), a.order());
        best.converged = true;
        return best;
    }
    const SymmetricTensor unit = a * (1.0 / s);
    best.lambda = std::numeric_limits<double>::infinity();
    best.kkt_residual = std::numeric_limits<double>::infinity();
    for (const Vector& x0 : detail::sphere_starts(n, restarts, opt.seed))
    {
        Vector x = detail::sphere_descent(unit, x0, opt);
        double lambda = eval(unit, x);
        double residual = 0.0;
        detail::kkt_refine(unit, x, lambda, residual);
        if (lambda < best.lambda)
        {
            best.lambda = lambda;
            best.x = x;
            best.kkt_residual = residual;
        }
    }
    best.lambda *= s;
    best.kkt_residual = detail::kkt_residual(a, best.x, best.lambda);
    best.converged = best.kkt_residual <= 1e-8 * std::max(1.0, s);
    return best;
}

///
/// Numerical PD probe; only a negative_witness is a certificate. The status
/// is decided on the equilibrated tensor E = scale_variables(A, d), whose
/// positivity is equivalent to that of A; argmin is returned in A's
/// coordinates, so eval(A, argmin) == min_value.
///
inline ProbeReport numeric_pd_check(const SymmetricTensor& a, SearchOptions opt = {})
{
    detail::require_even(a, "numeric_pd_check");
    ProbeReport r;
    r.scaling = equilibration_scale(a);
    const SymmetricTensor e = scale_variables(a, r.scaling);
    const auto pair = min_h_eigenvalue(e, opt);
    r.argmin = r.scaling.cwiseProduct(pair.x);
    r.min_value = eval(e, pair.x);
    r.restarts_used = pair.restarts_used;
    r.threshold = 1e-8 * scale(e);
    r.status = detail::classify(r.min_value, r.threshold);
    return r;
}

///
/// Minimum of A x^m over the standard simplex: multi-start projected
/// gradient plus a grid sweep with step 1/8, the best grid point refined.
/// As in numeric_pd_check the search runs on the equilibrated tensor.
///
inline ProbeReport copositive_min(const SymmetricTensor& original, SearchOptions opt = {})
{
    const int n = original.dim();
    const int restarts = opt.restarts > 0 ? opt.restarts : 8 * n;
    ProbeReport r;
    r.scaling = equilibration_scale(original);
    const SymmetricTensor a = scale_variables(original, r.scaling);
    const double s = scale(a);
    r.restarts_used = restarts;
    r.threshold = 1e-8 * s;
    if (s == 0.0)
    {
        r.argmin = r.scaling.cwiseProduct(Vector::Constant(n, 1.0 / n));
        return r;
    }
    const SymmetricTensor unit = a * (1.0 / s);

    double best = std::numeric_limits<double>::infinity();
    Vector best_x;
    auto consider = [&](const Vector& x) {
        const double v = eval(unit, x);
        if (v < best)
        {
            best = v;
            best_x = x;
        }
    };

    constexpr int grid = 8;
    if (binomial(static_cast<std::size_t>(grid + n - 1), static_cast<std::size_t>(n - 1)) <= 50000)
    {
        detail::for_each_grid_point(n, grid, consider);
        consider(detail::simplex_descent(unit, best_x, opt));
    }
    for (int i = 0; i < n; ++i)
    {
        consider(Vector::Unit(n, i));
    }
    for (int k = 0; k < restarts; ++k)
    {
        auto rng = make_stream(opt.seed, static_cast<std::uint64_t>(k));
        std::exponential_distribution<double> expo(1.0);
        Vector x0(n);
        for (int i = 0; i < n; ++i)
        {
            x0[i] = expo(rng);
        }
        consider(detail::simplex_descent(unit, x0 / x0.sum(), opt));
    }
    r.argmin = r.scaling.cwiseProduct(best_x);
    r.min_value = eval(a, best_x);
    r.status = detail::classify(r.min_value, r.threshold);
    return r;
}

/// Strict copositivity: the simplex minimum exceeds 1e-8 * scale(A).
inline bool strict_cop_check(const SymmetricTensor& a, SearchOptions opt = {})
{
    return copositive_min(a, opt).status == ProbeStatus::positive;
}

} // namespace symtensor

#endif // SYMTENSOR_SPECTRAL_HPP
