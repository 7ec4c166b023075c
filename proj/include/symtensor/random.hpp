#ifndef SYMTENSOR_RANDOM_HPP
#define SYMTENSOR_RANDOM_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "symtensor/tensor.hpp"

namespace symtensor
{

/// Independent random stream for (seed, index); identical regardless of the
/// order in which streams are created.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t index = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x5eedu};
    return std::mt19937_64(seq);
}

inline Vector random_normal(std::mt19937_64& rng, int n)
{
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector v(n);
    for (int i = 0; i < n; ++i)
    {
        v[i] = normal(rng);
    }
    return v;
}

enum class RandomKind
{
    cd,     ///< sum of m-th powers of Gaussian vectors
    cp,     ///< sum of m-th powers of nonnegative vectors
    sos,    ///< polynomial sum of squares of random degree-m/2 forms
    hankel, ///< Hankel tensor with Gaussian generating vector
    dense   ///< Gaussian entries
};

inline RandomKind parse_random_kind(const std::string& s)
{
    if (s == "cd") return RandomKind::cd;
    if (s == "cp") return RandomKind::cp;
    if (s == "sos") return RandomKind::sos;
    if (s == "hankel") return RandomKind::hankel;
    if (s == "dense") return RandomKind::dense;
    throw std::invalid_argument("unknown random tensor kind '" + s + "'");
}

struct RandomSample
{
    SymmetricTensor tensor;
    std::optional<DecompositionList> decomposition;
};

///
/// Seeded generator for property tests. cd and cp samples carry the
/// generating decomposition (unit weights); count is the number of rank-one
/// terms (cd, cp) or squared forms (sos) and is ignored otherwise.
///
inline RandomSample random_tensor(RandomKind kind, int order, int dim, int count,
                                  std::uint64_t seed)
{
    auto rng = make_stream(seed);
    switch (kind)
    {
    case RandomKind::cd:
    case RandomKind::cp:
    {
        std::vector<Vector> vs;
        for (int j = 0; j < count; ++j)
        {
            Vector v = random_normal(rng, dim);
            if (kind == RandomKind::cp)
            {
                v = v.cwiseAbs();
            }
            vs.push_back(std::move(v));
        }
        DecompositionList dec(dim, std::move(vs));
        return {from_weighted_powers(dec, order), std::move(dec)};
    }
    case RandomKind::sos:
    {
        if (order % 2 != 0)
        {
            throw shape_error("random SOS tensors need even order");
        }
        const auto half = multi_index_set(order / 2, dim);
        SymmetricTensor zero(order, dim);
        const auto& full = zero.indices();
        Vector coeffs = Vector::Zero(static_cast<Eigen::Index>(full.size()));
        for (int j = 0; j < count; ++j)
        {
            const Vector c = random_normal(rng, static_cast<int>(half->size()));
            for (std::size_t b = 0; b < half->size(); ++b)
            {
                for (std::size_t g = 0; g < half->size(); ++g)
                {
                    const auto idx = full.index_of((*half)[b] + (*half)[g]);
                    coeffs[static_cast<Eigen::Index>(idx)] +=
                        c[static_cast<Eigen::Index>(b)] * c[static_cast<Eigen::Index>(g)];
                }
            }
        }
        return {from_polynomial_coefficients(SymmetricTensor(order, dim, coeffs)), std::nullopt};
    }
    case RandomKind::hankel:
    {
        const Vector h = random_normal(rng, (dim - 1) * order + 1);
        SymmetricTensor zero(order, dim);
        Vector v(static_cast<Eigen::Index>(zero.size()));
        for (std::size_t i = 0; i < zero.size(); ++i)
        {
            v[static_cast<Eigen::Index>(i)] = h[zero.indices()[i].position_sum()];
        }
        return {SymmetricTensor(order, dim, std::move(v)), std::nullopt};
    }
    case RandomKind::dense:
    {
        SymmetricTensor zero(order, dim);
        return {SymmetricTensor(order, dim, random_normal(rng, static_cast<int>(zero.size()))),
                std::nullopt};
    }
    }
    throw std::logic_error("unreachable random kind");
}

} // namespace symtensor

#endif // SYMTENSOR_RANDOM_HPP
