#ifndef SYMTENSOR_EXAMPLES_HPP
#define SYMTENSOR_EXAMPLES_HPP

#include "symtensor/decomposition.hpp"

namespace symtensor::examples
{

/// (x1 + x2)^4 + (x1 + 1000 x2)^4 - 1e-4 (x1 + 1e-4 x2)^4: a PD Hankel
/// tensor in S_{4,2} that is SOS but not CD.
inline VandermondeDecomposition hankel_not_cd()
{
    VandermondeDecomposition v;
    v.order = 4;
    v.dim = 2;
    v.nodes = {1.0, 1000.0, 1e-4};
    v.weights = {1.0, 1.0, -1e-4};
    return v;
}

/// Four positive Vandermonde terms at nodes 1, 10, 20, 50 and a small
/// negative one at 1e-4, in S_{4,4}. Published as PSD but not SOS.
inline VandermondeDecomposition hankel_quartic_four()
{
    VandermondeDecomposition v;
    v.order = 4;
    v.dim = 4;
    v.nodes = {1.0, 10.0, 20.0, 50.0, 1e-4};
    v.weights = {1.0, 1.0, 1.0, 1.0, -1e-4};
    return v;
}

} // namespace symtensor::examples

#endif // SYMTENSOR_EXAMPLES_HPP
