#ifndef SYMTENSOR_TENSOR_HPP
#define SYMTENSOR_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "symtensor/multi_index.hpp"

namespace symtensor
{

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// x^alpha with exact integer powers; 0^0 == 1.
inline double monomial_value(const MultiIndex& alpha, const Vector& x)
{
    double v = 1.0;
    for (std::size_t i = 0; i < alpha.size(); ++i)
    {
        for (int p = 0; p < alpha[i]; ++p)
        {
            v *= x[static_cast<Eigen::Index>(i)];
        }
    }
    return v;
}

///
/// Order-m, dimension-n real symmetric tensor.
///
/// One value per multi-index (exponent vector), stored densely in graded-lex
/// order. Entry a_alpha is the value shared by every index tuple whose
/// multiset of coordinates is alpha; it is NOT the polynomial coefficient,
/// which carries the extra factor multinomial(alpha).
///
class SymmetricTensor
{
public:
    SymmetricTensor(int order, int dim)
        : indices_(checked_set(order, dim)),
          values_(Vector::Zero(static_cast<Eigen::Index>(indices_->size())))
    {
    }

    SymmetricTensor(int order, int dim, Vector values)
        : indices_(checked_set(order, dim)), values_(std::move(values))
    {
        if (values_.size() != static_cast<Eigen::Index>(indices_->size()))
        {
            throw shape_error("tensor value vector has " +
                              std::to_string(values_.size()) + " entries, expected " +
                              std::to_string(indices_->size()));
        }
    }

    /// Builds from (multi-index, value) pairs; absent keys are zero and
    /// repeated keys are rejected.
    static SymmetricTensor from_entries(int order, int dim,
                                        const std::vector<std::pair<MultiIndex, double>>& entries)
    {
        SymmetricTensor t(order, dim);
        std::vector<bool> seen(t.size(), false);
        for (const auto& [alpha, value] : entries)
        {
            if (static_cast<int>(alpha.size()) != dim || alpha.degree() != order)
            {
                throw shape_error("multi-index " + alpha.to_string() +
                                  " does not match order " + std::to_string(order) +
                                  " and dim " + std::to_string(dim));
            }
            const auto i = t.indices_->index_of(alpha);
            if (seen[i])
            {
                throw shape_error("duplicate multi-index " + alpha.to_string());
            }
            seen[i] = true;
            t.values_[static_cast<Eigen::Index>(i)] = value;
        }
        return t;
    }

    int order() const noexcept { return indices_->degree(); }
    int dim() const noexcept { return indices_->nvars(); }
    std::size_t size() const noexcept { return indices_->size(); }

    const MultiIndexSet& indices() const noexcept { return *indices_; }
    const Vector& values() const noexcept { return values_; }

    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    double at(const MultiIndex& alpha) const
    {
        if (static_cast<int>(alpha.size()) != dim() || alpha.degree() != order())
        {
            return 0.0;
        }
        return values_[static_cast<Eigen::Index>(indices_->index_of(alpha))];
    }

    bool same_shape(const SymmetricTensor& other) const noexcept
    {
        return order() == other.order() && dim() == other.dim();
    }

    double max_abs() const { return size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff(); }

    SymmetricTensor operator+(const SymmetricTensor& b) const
    {
        require_same_shape(*this, b, "addition");
        return SymmetricTensor(indices_, values_ + b.values_);
    }

    SymmetricTensor operator-(const SymmetricTensor& b) const
    {
        require_same_shape(*this, b, "subtraction");
        return SymmetricTensor(indices_, values_ - b.values_);
    }

    SymmetricTensor operator*(double s) const { return SymmetricTensor(indices_, values_ * s); }
    friend SymmetricTensor operator*(double s, const SymmetricTensor& t) { return t * s; }

    friend void require_same_shape(const SymmetricTensor& a, const SymmetricTensor& b,
                                   const char* what)
    {
        if (!a.same_shape(b))
        {
            throw shape_error(std::string(what) + ": shape mismatch (" +
                              std::to_string(a.order()) + "," + std::to_string(a.dim()) +
                              ") vs (" + std::to_string(b.order()) + "," +
                              std::to_string(b.dim()) + ")");
        }
    }

private:
    SymmetricTensor(std::shared_ptr<const MultiIndexSet> indices, Vector values)
        : indices_(std::move(indices)), values_(std::move(values))
    {
    }

    static std::shared_ptr<const MultiIndexSet> checked_set(int order, int dim)
    {
        if (order < 2 || dim < 2)
        {
            throw shape_error("symmetric tensors need order >= 2 and dim >= 2 (got order " +
                              std::to_string(order) + ", dim " + std::to_string(dim) + ")");
        }
        return multi_index_set(order, dim);
    }

    std::shared_ptr<const MultiIndexSet> indices_;
    Vector values_;
};

///
/// Real vectors u_j with weights alpha_j representing sum_j alpha_j u_j^m.
///
struct DecompositionList
{
    int dim = 0;
    std::vector<Vector> vectors;
    std::vector<double> weights;

    DecompositionList() = default;

    DecompositionList(int n, std::vector<Vector> vs, std::vector<double> ws = {})
        : dim(n), vectors(std::move(vs)), weights(std::move(ws))
    {
        if (weights.empty())
        {
            weights.assign(vectors.size(), 1.0);
        }
        validate();
    }

    std::size_t size() const noexcept { return vectors.size(); }

    void validate() const
    {
        if (weights.size() != vectors.size())
        {
            throw shape_error("decomposition has " + std::to_string(vectors.size()) +
                              " vectors but " + std::to_string(weights.size()) + " weights");
        }
        for (const auto& v : vectors)
        {
            if (v.size() != dim)
            {
                throw shape_error("decomposition vector of length " +
                                  std::to_string(v.size()) + " in dimension " +
                                  std::to_string(dim));
            }
        }
    }

    /// True when every vector is entrywise nonnegative (a CP candidate).
    bool nonnegative_vectors() const
    {
        return std::all_of(vectors.begin(), vectors.end(),
                           [](const Vector& v) { return (v.array() >= 0.0).all(); });
    }

    /// Largest |alpha_j| * ||u_j||_inf^m, a natural scale for the tensor.
    double scale(int order) const
    {
        double s = 0.0;
        for (std::size_t j = 0; j < size(); ++j)
        {
            s = std::max(s, std::abs(weights[j]) *
                                std::pow(vectors[j].cwiseAbs().maxCoeff(), order));
        }
        return s;
    }
};

inline void require_dim(const SymmetricTensor& a, const Vector& x, const char* what)
{
    if (x.size() != a.dim())
    {
        throw shape_error(std::string(what) + ": vector length " + std::to_string(x.size()) +
                          " does not match tensor dim " + std::to_string(a.dim()));
    }
}

/// A x^m = sum_alpha multinomial(alpha) a_alpha x^alpha.
inline double eval(const SymmetricTensor& a, const Vector& x)
{
    require_dim(a, x, "eval");
    const auto& set = a.indices();
    double s = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        s += set.weight(i) * a[i] * monomial_value(set[i], x);
    }
    return s;
}

/// A x^{m-1}, the vector with x . grad(A, x) == A x^m.
inline Vector grad(const SymmetricTensor& a, const Vector& x)
{
    require_dim(a, x, "grad");
    const auto& set = a.indices();
    const double m = a.order();
    Vector g = Vector::Zero(a.dim());
    std::vector<int> e;
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        if (a[i] == 0.0)
        {
            continue;
        }
        const double c = set.weight(i) * a[i] / m;
        for (int k = 0; k < a.dim(); ++k)
        {
            const int ak = set[i][static_cast<std::size_t>(k)];
            if (ak == 0)
            {
                continue;
            }
            e = set[i].exponents();
            --e[static_cast<std::size_t>(k)];
            g[k] += c * ak * monomial_value(MultiIndex(e), x);
        }
    }
    return g;
}

/// A x^{m-2}, the symmetric matrix equal to the Hessian of A x^m over m(m-1).
inline Matrix hessian(const SymmetricTensor& a, const Vector& x)
{
    require_dim(a, x, "hessian");
    const auto& set = a.indices();
    const double m = a.order();
    const int n = a.dim();
    Matrix h = Matrix::Zero(n, n);
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        if (a[i] == 0.0)
        {
            continue;
        }
        const double c = set.weight(i) * a[i] / (m * (m - 1.0));
        for (int p = 0; p < n; ++p)
        {
            for (int q = p; q < n; ++q)
            {
                std::vector<int> e = set[i].exponents();
                const auto up = static_cast<std::size_t>(p);
                const auto uq = static_cast<std::size_t>(q);
                double factor = e[up];
                if (factor == 0.0)
                {
                    continue;
                }
                --e[up];
                factor *= e[uq];
                if (factor == 0.0)
                {
                    continue;
                }
                --e[uq];
                const double v = c * factor * monomial_value(MultiIndex(e), x);
                h(p, q) += v;
                if (p != q)
                {
                    h(q, p) += v;
                }
            }
        }
    }
    return h;
}

/// Full-index inner product sum_{i_1..i_m} a b = sum_alpha multinomial(alpha) a_alpha b_alpha.
inline double inner_full(const SymmetricTensor& a, const SymmetricTensor& b)
{
    require_same_shape(a, b, "inner_full");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        s += a.indices().weight(i) * a[i] * b[i];
    }
    return s;
}

/// Coefficient-convention inner product sum_alpha a_alpha b_alpha (no multiplicities).
inline double inner_coeff(const SymmetricTensor& a, const SymmetricTensor& b)
{
    require_same_shape(a, b, "inner_coeff");
    return a.values().dot(b.values());
}

///
/// Polynomial-coefficient form: entry alpha becomes multinomial(alpha) a_alpha,
/// the coefficient of x^alpha in A x^m. Under this map
/// inner_coeff(polynomial_coefficients(A), B) == inner_full(A, B).
///
inline SymmetricTensor polynomial_coefficients(const SymmetricTensor& a)
{
    Vector v = a.values();
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        v[static_cast<Eigen::Index>(i)] *= a.indices().weight(i);
    }
    return SymmetricTensor(a.order(), a.dim(), std::move(v));
}

/// Inverse of polynomial_coefficients.
inline SymmetricTensor from_polynomial_coefficients(const SymmetricTensor& coeffs)
{
    Vector v = coeffs.values();
    for (std::size_t i = 0; i < coeffs.size(); ++i)
    {
        v[static_cast<Eigen::Index>(i)] /= coeffs.indices().weight(i);
    }
    return SymmetricTensor(coeffs.order(), coeffs.dim(), std::move(v));
}

/// Entrywise (Schur) product.
inline SymmetricTensor hadamard(const SymmetricTensor& a, const SymmetricTensor& b)
{
    require_same_shape(a, b, "hadamard");
    return SymmetricTensor(a.order(), a.dim(), a.values().cwiseProduct(b.values()));
}

/// u^m, with entry prod_i u_i^{alpha_i}.
inline SymmetricTensor rank_one_pow(const Vector& u, int order)
{
    const SymmetricTensor zero(order, static_cast<int>(u.size()));
    const auto& set = zero.indices();
    Vector v(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i)
    {
        v[static_cast<Eigen::Index>(i)] = monomial_value(set[i], u);
    }
    return SymmetricTensor(order, static_cast<int>(u.size()), std::move(v));
}

/// sum_j alpha_j u_j^m; an empty list yields the zero tensor.
inline SymmetricTensor from_weighted_powers(const DecompositionList& dec, int order)
{
    dec.validate();
    SymmetricTensor sum(order, dec.dim);
    const auto& set = sum.indices();
    Vector v = Vector::Zero(static_cast<Eigen::Index>(set.size()));
    for (std::size_t j = 0; j < dec.size(); ++j)
    {
        for (std::size_t i = 0; i < set.size(); ++i)
        {
            v[static_cast<Eigen::Index>(i)] += dec.weights[j] * monomial_value(set[i], dec.vectors[j]);
        }
    }
    return SymmetricTensor(order, dec.dim, std::move(v));
}

///
/// Diagonal change of variables: the result B satisfies B x^m == A (d o x)^m,
/// i.e. b_alpha = a_alpha prod_i d_i^{alpha_i}. Requires every d_i > 0.
///
inline SymmetricTensor scale_variables(const SymmetricTensor& a, const Vector& d)
{
    require_dim(a, d, "scale_variables");
    if ((d.array() <= 0.0).any() || !d.allFinite())
    {
        throw std::invalid_argument("scale_variables: scale entries must be positive and finite");
    }
    Vector v = a.values();
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        v[static_cast<Eigen::Index>(i)] *= monomial_value(a.indices()[i], d);
    }
    return SymmetricTensor(a.order(), a.dim(), std::move(v));
}

///
/// Diagonal equilibration scale: d_i = a_{m e_i}^{-1/m} where that diagonal
/// entry is positive, 1 otherwise, so the scaled tensor has unit diagonal.
///
inline Vector equilibration_scale(const SymmetricTensor& a)
{
    const int n = a.dim();
    Vector d = Vector::Ones(n);
    for (int i = 0; i < n; ++i)
    {
        std::vector<int> e(static_cast<std::size_t>(n), 0);
        e[static_cast<std::size_t>(i)] = a.order();
        const double diag = a.at(MultiIndex(e));
        if (diag > 0.0 && std::isfinite(diag))
        {
            d[i] = std::pow(diag, -1.0 / a.order());
        }
    }
    return d;
}

/// Tensor with entry 1 at each m e_i and 0 elsewhere, so that D x^m = sum_i x_i^m.
inline SymmetricTensor diagonal_identity(int order, int dim)
{
    std::vector<std::pair<MultiIndex, double>> entries;
    for (int i = 0; i < dim; ++i)
    {
        std::vector<int> e(static_cast<std::size_t>(dim), 0);
        e[static_cast<std::size_t>(i)] = order;
        entries.emplace_back(MultiIndex(e), 1.0);
    }
    return SymmetricTensor::from_entries(order, dim, entries);
}

} // namespace symtensor

#endif // SYMTENSOR_TENSOR_HPP
