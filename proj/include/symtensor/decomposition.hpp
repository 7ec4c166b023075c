#ifndef SYMTENSOR_DECOMPOSITION_HPP
#define SYMTENSOR_DECOMPOSITION_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/Polynomials>

#include "symtensor/tensor.hpp"

namespace symtensor
{

class not_hankel : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

///
/// Generating vector h of a Hankel tensor in S_{m,n}; length (n-1) m + 1.
/// Entry a_{i_1...i_m} equals h[i_1 + ... + i_m] with 0-based indices.
///
struct GeneratingVector
{
    int order = 0;
    int dim = 0;
    Vector values;

    GeneratingVector() = default;

    GeneratingVector(int m, int n, Vector h) : order(m), dim(n), values(std::move(h))
    {
        if (m < 2 || n < 2)
        {
            throw shape_error("generating vector needs order >= 2 and dim >= 2");
        }
        const auto expected = static_cast<Eigen::Index>((n - 1) * m + 1);
        if (values.size() != expected)
        {
            throw shape_error("generating vector has length " + std::to_string(values.size()) +
                              ", expected (n-1)m+1 = " + std::to_string(expected));
        }
    }

    Eigen::Index size() const noexcept { return values.size(); }
};

inline SymmetricTensor hankel_from_generating(const GeneratingVector& h)
{
    SymmetricTensor zero(h.order, h.dim);
    Vector v(static_cast<Eigen::Index>(zero.size()));
    for (std::size_t i = 0; i < zero.size(); ++i)
    {
        v[static_cast<Eigen::Index>(i)] = h.values[zero.indices()[i].position_sum()];
    }
    return SymmetricTensor(h.order, h.dim, std::move(v));
}

/// Inverse of hankel_from_generating; throws not_hankel when two entries on
/// the same index-sum level differ by more than 1e-12 relative to max|A|.
inline GeneratingVector generating_from_hankel(const SymmetricTensor& a)
{
    const int length = (a.dim() - 1) * a.order() + 1;
    Vector h = Vector::Zero(length);
    std::vector<bool> seen(static_cast<std::size_t>(length), false);
    const double tol = 1e-12 * std::max(a.max_abs(), 1e-300);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        const int s = a.indices()[i].position_sum();
        if (!seen[static_cast<std::size_t>(s)])
        {
            seen[static_cast<std::size_t>(s)] = true;
            h[s] = a[i];
        }
        else if (std::abs(h[s] - a[i]) > tol)
        {
            throw not_hankel("tensor is not Hankel: entries with index sum " + std::to_string(s) +
                             " differ (" + std::to_string(h[s]) + " vs " +
                             std::to_string(a[i]) + ")");
        }
    }
    return GeneratingVector(a.order(), a.dim(), std::move(h));
}

/// (1, u, u^2, ..., u^{n-1}).
inline Vector vandermonde_vector(double u, int n)
{
    if (n < 2)
    {
        throw shape_error("vandermonde_vector needs n >= 2");
    }
    Vector v(n);
    v[0] = 1.0;
    for (int i = 1; i < n; ++i)
    {
        v[i] = v[i - 1] * u;
    }
    return v;
}

///
/// sum_j alpha_j (1, u_j, ..., u_j^{n-1})^m, plus an optional weight on
/// e_n^m standing for the node at infinity.
///
struct VandermondeDecomposition
{
    int order = 0;
    int dim = 0;
    std::vector<double> nodes;
    std::vector<double> weights;
    std::optional<double> infinity_weight;

    std::size_t rank() const noexcept { return nodes.size() + (infinity_weight ? 1 : 0); }

    void validate() const
    {
        if (nodes.size() != weights.size())
        {
            throw shape_error("Vandermonde decomposition: nodes and weights differ in length");
        }
        for (std::size_t i = 0; i < nodes.size(); ++i)
        {
            for (std::size_t j = i + 1; j < nodes.size(); ++j)
            {
                if (nodes[i] == nodes[j])
                {
                    throw std::invalid_argument("Vandermonde decomposition: repeated node " +
                                                std::to_string(nodes[i]));
                }
            }
        }
    }

    /// The equivalent weighted power list (the infinity node becomes e_n).
    DecompositionList as_list() const
    {
        std::vector<Vector> vs;
        std::vector<double> ws = weights;
        for (double u : nodes)
        {
            vs.push_back(vandermonde_vector(u, dim));
        }
        if (infinity_weight)
        {
            vs.push_back(Vector::Unit(dim, dim - 1));
            ws.push_back(*infinity_weight);
        }
        return DecompositionList(dim, std::move(vs), std::move(ws));
    }

    /// h_i = sum_j alpha_j u_j^i (0-based) plus the infinity weight on the last entry.
    GeneratingVector generating() const
    {
        const int length = (dim - 1) * order + 1;
        Vector h = Vector::Zero(length);
        for (std::size_t j = 0; j < nodes.size(); ++j)
        {
            double p = 1.0;
            for (int i = 0; i < length; ++i)
            {
                h[i] += weights[j] * p;
                p *= nodes[j];
            }
        }
        if (infinity_weight)
        {
            h[length - 1] += *infinity_weight;
        }
        return GeneratingVector(order, dim, std::move(h));
    }
};

inline SymmetricTensor build_from_vandermonde(const VandermondeDecomposition& v)
{
    v.validate();
    return from_weighted_powers(v.as_list(), v.order);
}

/// All weights, including the infinity weight, nonnegative.
inline bool is_complete_hankel(const VandermondeDecomposition& v)
{
    const bool finite_ok =
        std::all_of(v.weights.begin(), v.weights.end(), [](double w) { return w >= 0.0; });
    return finite_ok && (!v.infinity_weight || *v.infinity_weight >= 0.0);
}

enum class PronyStatus
{
    ok,
    rank_overflow,   ///< numerical rank r with 2r > len(h): nodes not identifiable
    complex_nodes,   ///< annihilating polynomial has non-real roots
    confluent_nodes, ///< two nodes closer than the distinctness tolerance
    poor_fit         ///< reconstruction residual above tolerance
};

inline const char* to_string(PronyStatus s)
{
    switch (s)
    {
    case PronyStatus::ok: return "ok";
    case PronyStatus::rank_overflow: return "rank_overflow";
    case PronyStatus::complex_nodes: return "complex_nodes";
    case PronyStatus::confluent_nodes: return "confluent_nodes";
    case PronyStatus::poor_fit: return "poor_fit";
    }
    return "?";
}

struct PronyResult
{
    PronyStatus status = PronyStatus::ok;
    VandermondeDecomposition decomposition;
    int rank = 0;
    Vector singular_values;      ///< of the balanced Hankel matrix, descending
    double balance = 1.0;        ///< c in h_i -> c^i h_i
    double residual = 0.0;       ///< relative, balanced coordinates
    double residual_original = 0.0;
    std::string message;

    bool ok() const noexcept { return status == PronyStatus::ok; }
};

namespace detail
{

/// c chosen from the least-squares slope of log|h_i| so that c^i h_i is level.
inline double balance_factor(const Vector& h)
{
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (Eigen::Index i = 0; i < h.size(); ++i)
    {
        if (h[i] != 0.0)
        {
            const double x = static_cast<double>(i);
            const double y = std::log(std::abs(h[i]));
            n += 1;
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
    }
    const double den = n * sxx - sx * sx;
    if (n < 2 || den <= 0.0)
    {
        return 1.0;
    }
    return std::exp(-(n * sxy - sx * sy) / den);
}

inline Matrix hankel_matrix(const Vector& h, Eigen::Index rows, Eigen::Index cols)
{
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
    {
        for (Eigen::Index j = 0; j < cols; ++j)
        {
            m(i, j) = h[i + j];
        }
    }
    return m;
}

/// Prony on an already balanced, unit-scaled sequence with a known rank.
inline PronyResult prony_fixed_rank(const Vector& hb, int r, double tol)
{
    PronyResult out;
    out.rank = r;
    const Eigen::Index length = hb.size();
    if (r == 0)
    {
        return out;
    }
    const Matrix k = hankel_matrix(hb, length - r, r + 1);
    Eigen::JacobiSVD<Matrix> svd(k, Eigen::ComputeFullV);
    Vector p = svd.matrixV().col(r);

    bool has_infinity = false;
    int degree = r;
    if (std::abs(p[r]) <= 1e-8 * p.norm())
    {
        has_infinity = true;
        degree = r - 1;
        if (degree > 0 && std::abs(p[degree]) <= 1e-8 * p.norm())
        {
            out.status = PronyStatus::confluent_nodes;
            out.message = "repeated node at infinity";
            return out;
        }
    }

    std::vector<double> nodes;
    if (degree > 0)
    {
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
        solver.compute(p.head(degree + 1));
        for (const auto& z : solver.roots())
        {
            if (std::abs(z.imag()) > 1e-8 * (1.0 + std::abs(z)))
            {
                out.status = PronyStatus::complex_nodes;
                out.message = "annihilating polynomial has a complex root " +
                              std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                              std::to_string(z.imag()) + "i";
                return out;
            }
            nodes.push_back(z.real());
        }
    }
    std::sort(nodes.begin(), nodes.end());
    double umax = 0.0;
    for (double u : nodes)
    {
        umax = std::max(umax, std::abs(u));
    }
    for (std::size_t j = 1; j < nodes.size(); ++j)
    {
        if (nodes[j] - nodes[j - 1] <= 1e-8 * (1.0 + umax))
        {
            out.status = PronyStatus::confluent_nodes;
            out.message = "nodes " + std::to_string(nodes[j - 1]) + " and " +
                          std::to_string(nodes[j]) + " coincide within tolerance";
            return out;
        }
    }

    const auto cols = static_cast<Eigen::Index>(nodes.size()) + (has_infinity ? 1 : 0);
    Matrix v = Matrix::Zero(length, cols);
    for (std::size_t j = 0; j < nodes.size(); ++j)
    {
        double pw = 1.0;
        for (Eigen::Index i = 0; i < length; ++i)
        {
            v(i, static_cast<Eigen::Index>(j)) = pw;
            pw *= nodes[j];
        }
    }
    if (has_infinity)
    {
        v(length - 1, cols - 1) = 1.0;
    }
    const Vector w = v.completeOrthogonalDecomposition().solve(hb);
    out.residual = (v * w - hb).norm() / std::max(hb.norm(), 1e-300);
    out.decomposition.nodes = nodes;
    out.decomposition.weights.assign(w.data(), w.data() + nodes.size());
    if (has_infinity)
    {
        out.decomposition.infinity_weight = w[cols - 1];
    }
    if (out.residual > 100.0 * tol)
    {
        out.status = PronyStatus::poor_fit;
        out.message = "reconstruction residual " + std::to_string(out.residual);
    }
    return out;
}

/// Maps a balanced decomposition (nodes c u, weights / s) back to h's scale.
inline void unbalance(PronyResult& r, double c, double s, Eigen::Index length)
{
    for (double& u : r.decomposition.nodes)
    {
        u /= c;
    }
    for (double& w : r.decomposition.weights)
    {
        w *= s;
    }
    if (r.decomposition.infinity_weight)
    {
        *r.decomposition.infinity_weight *= s / std::pow(c, static_cast<double>(length - 1));
    }
}

} // namespace detail

///
/// Vandermonde decomposition of a generating vector by Prony's method.
///
/// The sequence is first balanced (h_i -> c^i h_i, nodes scale by c,
/// weights unchanged) and normalized. The numerical rank r of the
/// near-square Hankel matrix uses the threshold tol * sigma_1; the nodes are
/// the roots of the null vector of the (L - r) x (r + 1) Hankel matrix
/// (a vanishing leading coefficient signals the node at infinity), and the
/// weights solve the Vandermonde least-squares system. When 2r > L the
/// decomposition is not unique and rank_overflow is returned.
///
inline PronyResult prony_decompose(const GeneratingVector& h, double tol = 1e-10)
{
    if (!(tol > 0.0))
    {
        throw std::invalid_argument("prony_decompose: tol must be positive");
    }
    const Eigen::Index length = h.size();
    PronyResult out;
    out.decomposition.order = h.order;
    out.decomposition.dim = h.dim;
    if (h.values.cwiseAbs().maxCoeff() == 0.0)
    {
        out.singular_values = Vector::Zero(1);
        return out;
    }

    const double c = detail::balance_factor(h.values);
    Vector hb(length);
    double pw = 1.0;
    for (Eigen::Index i = 0; i < length; ++i)
    {
        hb[i] = pw * h.values[i];
        pw *= c;
    }
    const double s = hb.cwiseAbs().maxCoeff();
    hb /= s;
    out.balance = c;

    const Eigen::Index rows = length / 2 + 1;
    const Matrix hm = detail::hankel_matrix(hb, rows, length - rows + 1);
    Eigen::JacobiSVD<Matrix> svd(hm);
    out.singular_values = svd.singularValues();
    int r = 0;
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
    {
        if (out.singular_values[i] > tol * out.singular_values[0])
        {
            ++r;
        }
    }
    out.rank = r;
    if (2 * r > length)
    {
        out.status = PronyStatus::rank_overflow;
        out.message = "numerical rank " + std::to_string(r) + " exceeds " +
                      std::to_string(length / 2) + " for a length-" + std::to_string(length) +
                      " generating vector; the Vandermonde decomposition is not unique";
        return out;
    }

    PronyResult fit = detail::prony_fixed_rank(hb, r, tol);
    fit.singular_values = out.singular_values;
    fit.balance = c;
    fit.decomposition.order = h.order;
    fit.decomposition.dim = h.dim;
    if (fit.status == PronyStatus::complex_nodes || fit.status == PronyStatus::confluent_nodes)
    {
        fit.decomposition.nodes.clear();
        fit.decomposition.weights.clear();
        fit.decomposition.infinity_weight.reset();
        return fit;
    }
    detail::unbalance(fit, c, s, length);
    const Vector rebuilt = fit.decomposition.generating().values;
    fit.residual_original = (rebuilt - h.values).norm() / h.values.norm();
    return fit;
}

///
/// Nonnegative Vandermonde decomposition anchored at node 0 for a generating
/// vector whose square Hankel moment matrix is positive definite (full
/// rank, where plain Prony is not unique). Removing the largest multiple of
/// e_1 that keeps the moment matrix PSD leaves a rank-deficient sequence
/// with a unique decomposition. Only defined for odd-length h.
///
inline PronyResult anchored_vandermonde(const GeneratingVector& h, double tol = 1e-10)
{
    const Eigen::Index length = h.size();
    PronyResult out;
    out.decomposition.order = h.order;
    out.decomposition.dim = h.dim;
    if (length % 2 == 0)
    {
        throw shape_error("anchored_vandermonde needs an odd-length generating vector");
    }
    const double c = detail::balance_factor(h.values);
    Vector hb(length);
    double pw = 1.0;
    for (Eigen::Index i = 0; i < length; ++i)
    {
        hb[i] = pw * h.values[i];
        pw *= c;
    }
    const double s = hb.cwiseAbs().maxCoeff();
    if (s == 0.0)
    {
        return out;
    }
    hb /= s;
    const Eigen::Index d = length / 2;
    const Matrix hm = detail::hankel_matrix(hb, d + 1, d + 1);
    Eigen::LLT<Matrix> llt(hm);
    if (llt.info() != Eigen::Success)
    {
        out.status = PronyStatus::poor_fit;
        out.message = "moment matrix is not positive definite";
        return out;
    }
    const Vector e0 = Vector::Unit(d + 1, 0);
    const double beta = 1.0 / e0.dot(llt.solve(e0));
    Vector reduced = hb;
    reduced[0] -= beta;

    PronyResult fit = detail::prony_fixed_rank(reduced, static_cast<int>(d), tol);
    fit.balance = c;
    fit.decomposition.order = h.order;
    fit.decomposition.dim = h.dim;
    if (!fit.ok())
    {
        return fit;
    }
    fit.decomposition.nodes.insert(fit.decomposition.nodes.begin(), 0.0);
    fit.decomposition.weights.insert(fit.decomposition.weights.begin(), beta);
    std::vector<std::size_t> order(fit.decomposition.nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        order[i] = i;
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return fit.decomposition.nodes[a] < fit.decomposition.nodes[b];
    });
    VandermondeDecomposition sorted = fit.decomposition;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        sorted.nodes[i] = fit.decomposition.nodes[order[i]];
        sorted.weights[i] = fit.decomposition.weights[order[i]];
    }
    fit.decomposition = sorted;
    for (std::size_t j = 1; j < sorted.nodes.size(); ++j)
    {
        if (sorted.nodes[j] - sorted.nodes[j - 1] <= 1e-8)
        {
            fit.status = PronyStatus::confluent_nodes;
            fit.message = "anchor node coincides with a recovered node";
            return fit;
        }
    }
    detail::unbalance(fit, c, s, length);
    const Vector rebuilt = fit.decomposition.generating().values;
    fit.residual_original = (rebuilt - h.values).norm() / h.values.norm();
    Vector rb(length);
    pw = 1.0;
    for (Eigen::Index i = 0; i < length; ++i)
    {
        rb[i] = pw * rebuilt[i] / s;
        pw *= c;
    }
    fit.residual = (rb - hb).norm() / hb.norm();
    fit.rank = static_cast<int>(d) + 1;
    if (fit.residual > 100.0 * tol)
    {
        fit.status = PronyStatus::poor_fit;
    }
    return fit;
}

///
/// Hankel tensor B in S_{qm,p} generated by the same h, valid when
/// n - 1 == (p - 1) q with q >= 2 and p >= 3. B x^{qm} equals A y^m where y
/// holds the coefficients of (sum_i x_i t^{i-1})^q, so B inherits PSD/SOS
/// and B = sum_j alpha_j (1, u_j, ..., u_j^{p-1})^{qm} for A's nodes u_j.
///
inline SymmetricTensor inherit_reshape(const GeneratingVector& h, int q, int p)
{
    if (q < 2 || p < 3)
    {
        throw std::invalid_argument("inherit_reshape needs q >= 2 and p >= 3");
    }
    if (h.dim - 1 != (p - 1) * q)
    {
        throw std::invalid_argument("inherit_reshape: n - 1 = " + std::to_string(h.dim - 1) +
                                    " is not (p - 1) q = " + std::to_string((p - 1) * q));
    }
    return hankel_from_generating(GeneratingVector(q * h.order, p, h.values));
}

/// Decomposition of the Hadamard product: vectors u_i o v_j with weights a_i b_j.
inline DecompositionList schur_decomposed(const DecompositionList& a, const DecompositionList& b)
{
    if (a.dim != b.dim)
    {
        throw shape_error("schur_decomposed: dimension mismatch");
    }
    std::vector<Vector> vs;
    std::vector<double> ws;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        for (std::size_t j = 0; j < b.size(); ++j)
        {
            vs.push_back(a.vectors[i].cwiseProduct(b.vectors[j]));
            ws.push_back(a.weights[i] * b.weights[j]);
        }
    }
    return DecompositionList(a.dim, std::move(vs), std::move(ws));
}

namespace detail
{
inline Matrix stack_columns(const DecompositionList& dec)
{
    Matrix m(dec.dim, static_cast<Eigen::Index>(dec.size()));
    for (std::size_t j = 0; j < dec.size(); ++j)
    {
        m.col(static_cast<Eigen::Index>(j)) = dec.vectors[j];
    }
    return m;
}
} // namespace detail

/// Vectors have numerical rank n: sigma_min > 1e-10 sigma_max.
inline bool spans(const DecompositionList& dec)
{
    if (dec.size() < static_cast<std::size_t>(dec.dim))
    {
        return false;
    }
    const Vector sv = Eigen::JacobiSVD<Matrix>(detail::stack_columns(dec)).singularValues();
    return sv[0] > 0.0 && sv[dec.dim - 1] > 1e-10 * sv[0];
}

/// Unit x orthogonal to every u_j when the vectors do not span; nullopt otherwise.
inline std::optional<Vector> null_direction(const DecompositionList& dec)
{
    if (dec.size() == 0)
    {
        throw std::invalid_argument("null_direction needs a nonempty decomposition");
    }
    if (spans(dec))
    {
        return std::nullopt;
    }
    Eigen::JacobiSVD<Matrix> svd(detail::stack_columns(dec), Eigen::ComputeFullU);
    Vector x = svd.matrixU().col(dec.dim - 1);
    return x / x.norm();
}

} // namespace symtensor

#endif // SYMTENSOR_DECOMPOSITION_HPP
