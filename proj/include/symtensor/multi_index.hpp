#ifndef SYMTENSOR_MULTI_INDEX_HPP
#define SYMTENSOR_MULTI_INDEX_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symtensor
{

/// Raised when tensor shapes, vector lengths or orders do not agree.
class shape_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

///
/// Exponent-vector key of a symmetric tensor entry.
///
/// The multi-index \f$\alpha = (\alpha_1,\dots,\alpha_n)\f$ counts how many
/// times each coordinate appears among the \f$m\f$ tensor indices, so every
/// permutation of \f$(i_1,\dots,i_m)\f$ maps to the same key.
///
class MultiIndex
{
public:
    MultiIndex() = default;

    explicit MultiIndex(std::vector<int> exponents)
        : exponents_(std::move(exponents))
    {
        for (int e : exponents_)
        {
            if (e < 0)
            {
                throw shape_error("multi-index exponents must be nonnegative");
            }
        }
    }

    const std::vector<int>& exponents() const noexcept { return exponents_; }
    int operator[](std::size_t i) const { return exponents_[i]; }
    std::size_t size() const noexcept { return exponents_.size(); }

    int degree() const noexcept
    {
        return std::accumulate(exponents_.begin(), exponents_.end(), 0);
    }

    MultiIndex operator+(const MultiIndex& other) const
    {
        if (other.size() != size())
        {
            throw shape_error("multi-index length mismatch");
        }
        std::vector<int> sum(exponents_);
        for (std::size_t i = 0; i < sum.size(); ++i)
        {
            sum[i] += other.exponents_[i];
        }
        return MultiIndex(std::move(sum));
    }

    /// Sum of 0-based coordinate positions, i.e. i_1 + ... + i_m - m.
    int position_sum() const noexcept
    {
        int s = 0;
        for (std::size_t i = 0; i < exponents_.size(); ++i)
        {
            s += static_cast<int>(i) * exponents_[i];
        }
        return s;
    }

    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

    /// Graded lexicographic order: higher degree first, then larger leading
    /// exponents first, so (2,0) precedes (1,1) precedes (0,2).
    friend bool graded_lex_before(const MultiIndex& a, const MultiIndex& b)
    {
        const int da = a.degree();
        const int db = b.degree();
        if (da != db)
        {
            return da > db;
        }
        return a.exponents_ > b.exponents_;
    }

    std::string to_string() const
    {
        std::string s = "(";
        for (std::size_t i = 0; i < exponents_.size(); ++i)
        {
            if (i != 0)
            {
                s += ',';
            }
            s += std::to_string(exponents_[i]);
        }
        return s + ")";
    }

private:
    std::vector<int> exponents_;
};

///
/// Number of index tuples sharing the multi-index alpha: m! / prod(alpha_i!).
///
/// Computed as a product of binomial coefficients in 64-bit arithmetic;
/// throws std::overflow_error when the value does not fit.
///
inline std::uint64_t multinomial(const MultiIndex& alpha)
{
    auto checked_mul = [](std::uint64_t a, std::uint64_t b) {
        std::uint64_t r = 0;
        if (__builtin_mul_overflow(a, b, &r))
        {
            throw std::overflow_error("multinomial coefficient overflows 64 bits");
        }
        return r;
    };

    std::uint64_t result = 1;
    std::uint64_t placed = 0;
    for (int e : alpha.exponents())
    {
        // result *= C(placed + e, e), built incrementally so every partial
        // quotient is exact.
        std::uint64_t binom = 1;
        for (int j = 1; j <= e; ++j)
        {
            binom = checked_mul(binom, placed + static_cast<std::uint64_t>(j)) /
                    static_cast<std::uint64_t>(j);
        }
        result = checked_mul(result, binom);
        placed += static_cast<std::uint64_t>(e);
    }
    return result;
}

/// Binomial coefficient C(n, k) for small arguments.
inline std::size_t binomial(std::size_t n, std::size_t k)
{
    if (k > n)
    {
        return 0;
    }
    std::size_t r = 1;
    for (std::size_t j = 1; j <= k; ++j)
    {
        r = r * (n - k + j) / j;
    }
    return r;
}

///
/// All multi-indices of a fixed degree over n variables in graded-lex order,
/// with an index lookup and cached multinomial weights.
///
class MultiIndexSet
{
public:
    MultiIndexSet(int degree, int nvars) : degree_(degree), nvars_(nvars)
    {
        if (degree < 0 || nvars < 1)
        {
            throw shape_error("multi-index set needs degree >= 0 and n >= 1");
        }
        std::vector<int> e(static_cast<std::size_t>(nvars), 0);
        enumerate(e, 0, degree);
        for (std::size_t i = 0; i < items_.size(); ++i)
        {
            lookup_.emplace(items_[i].exponents(), i);
            weights_.push_back(static_cast<double>(multinomial(items_[i])));
        }
    }

    int degree() const noexcept { return degree_; }
    int nvars() const noexcept { return nvars_; }
    std::size_t size() const noexcept { return items_.size(); }
    const MultiIndex& operator[](std::size_t i) const { return items_[i]; }
    const std::vector<MultiIndex>& items() const noexcept { return items_; }

    /// Multinomial weight of the i-th multi-index.
    double weight(std::size_t i) const { return weights_[i]; }

    std::size_t index_of(const MultiIndex& alpha) const
    {
        auto it = lookup_.find(alpha.exponents());
        if (it == lookup_.end())
        {
            throw shape_error("multi-index " + alpha.to_string() +
                              " does not belong to this tensor space");
        }
        return it->second;
    }

    bool contains(const std::vector<int>& exponents) const
    {
        return lookup_.count(exponents) != 0;
    }

    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }

private:
    void enumerate(std::vector<int>& e, std::size_t pos, int remaining)
    {
        if (pos + 1 == e.size())
        {
            e[pos] = remaining;
            items_.emplace_back(e);
            return;
        }
        for (int v = remaining; v >= 0; --v)
        {
            e[pos] = v;
            enumerate(e, pos + 1, remaining - v);
        }
        e[pos] = 0;
    }

    int degree_;
    int nvars_;
    std::vector<MultiIndex> items_;
    std::vector<double> weights_;
    std::map<std::vector<int>, std::size_t> lookup_;
};

/// Shared, immutable multi-index set for (degree, nvars).
inline std::shared_ptr<const MultiIndexSet> multi_index_set(int degree, int nvars)
{
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{degree, nvars}];
    if (!slot)
    {
        slot = std::make_shared<const MultiIndexSet>(degree, nvars);
    }
    return slot;
}

} // namespace symtensor

#endif // SYMTENSOR_MULTI_INDEX_HPP
