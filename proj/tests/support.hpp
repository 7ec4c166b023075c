#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <vector>

#include <Eigen/Eigenvalues>

#include "symtensor/tensor.hpp"

namespace testing_support
{

using symtensor::Matrix;
using symtensor::MultiIndex;
using symtensor::SymmetricTensor;
using symtensor::Vector;

inline Vector vec(std::initializer_list<double> xs)
{
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs)
    {
        v[i++] = x;
    }
    return v;
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

inline double rel_diff(const Vector& a, const Vector& b)
{
    return (a - b).norm() / std::max(1.0, b.norm());
}

/// Calls f on every index tuple (i_1, ..., i_m) in [0, n)^m.
inline void for_each_tuple(int m, int n, const std::function<void(const std::vector<int>&)>& f)
{
    std::vector<int> idx(static_cast<std::size_t>(m), 0);
    while (true)
    {
        f(idx);
        int k = m - 1;
        while (k >= 0 && ++idx[static_cast<std::size_t>(k)] == n)
        {
            idx[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0)
        {
            return;
        }
    }
}

/// Entry a_{i_1...i_m} of the full array.
inline double full_entry(const SymmetricTensor& a, const std::vector<int>& idx)
{
    std::vector<int> e(static_cast<std::size_t>(a.dim()), 0);
    for (int i : idx)
    {
        ++e[static_cast<std::size_t>(i)];
    }
    return a.at(MultiIndex(e));
}

/// A x^m by summing over all n^m index tuples.
inline double brute_eval(const SymmetricTensor& a, const Vector& x)
{
    double s = 0.0;
    for_each_tuple(a.order(), a.dim(), [&](const std::vector<int>& idx) {
        double p = full_entry(a, idx);
        for (int i : idx)
        {
            p *= x[i];
        }
        s += p;
    });
    return s;
}

/// Full-index inner product by summing over all index tuples.
inline double brute_inner(const SymmetricTensor& a, const SymmetricTensor& b)
{
    double s = 0.0;
    for_each_tuple(a.order(), a.dim(), [&](const std::vector<int>& idx) {
        s += full_entry(a, idx) * full_entry(b, idx);
    });
    return s;
}

/// Independent eigenvalues from Eigen's self-adjoint solver.
inline Vector eigen_values(const Matrix& m)
{
    return Eigen::SelfAdjointEigenSolver<Matrix>(m, Eigen::EigenvaluesOnly).eigenvalues();
}

} // namespace testing_support
