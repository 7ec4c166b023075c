#include <gtest/gtest.h>

#include "support.hpp"
#include "symtensor/cones.hpp"
#include "symtensor/examples.hpp"
#include "symtensor/random.hpp"

using namespace symtensor;
using testing_support::eigen_values;
using testing_support::rel_diff;
using testing_support::vec;

namespace
{

SymmetricTensor not_cd_tensor() { return from_weighted_powers(examples::hankel_not_cd().as_list(), 4); }
SymmetricTensor quartic_four_tensor()
{
    return from_weighted_powers(examples::hankel_quartic_four().as_list(), 4);
}

/// x^4 - 3 x^2 y^2 + y^4: indefinite, so certainly not SOS.
SymmetricTensor indefinite_binary()
{
    return from_polynomial_coefficients(SymmetricTensor(4, 2, vec({1, 0, -3, 0, 1})));
}

/// B(p^2) by expanding p^2 monomial by monomial.
double square_expansion(const SymmetricTensor& b, const Vector& c)
{
    const auto basis = monomial_basis(b.dim(), b.order() / 2);
    double s = 0.0;
    for (std::size_t i = 0; i < basis->size(); ++i)
    {
        for (std::size_t j = 0; j < basis->size(); ++j)
        {
            const auto& e1 = (*basis)[i].exponents();
            const auto& e2 = (*basis)[j].exponents();
            std::vector<int> sum(e1.size());
            for (std::size_t k = 0; k < e1.size(); ++k)
            {
                sum[k] = e1[k] + e2[k];
            }
            s += c[static_cast<Eigen::Index>(i)] * c[static_cast<Eigen::Index>(j)] * b.at(MultiIndex(sum));
        }
    }
    return s;
}

/// Re-validates an SOS report against the tensor the certificate refers to.
void expect_certificate_holds(const SymmetricTensor& a, const MembershipReport& r, double tol)
{
    SymmetricTensor ref = a;
    if (r.certificate.scaled)
    {
        ASSERT_TRUE(r.certificate.scaling.has_value());
        ref = scale_variables(a, *r.certificate.scaling) * (1.0 / r.certificate.factor);
    }
    if (r.status == Membership::in)
    {
        ASSERT_TRUE(r.certificate.gram.has_value());
        EXPECT_TRUE(gram_certificate_valid(ref, *r.certificate.gram, tol));
    }
    if (r.status == Membership::out)
    {
        ASSERT_TRUE(r.certificate.separator.has_value());
        const auto& b = *r.certificate.separator;
        const SymMatrix m = moment_matrix(b);
        EXPECT_GE(eigen_values(m.to_dense())[0], -tol * m.frobenius_norm());
        EXPECT_LE(sos_pairing(ref, b), -tol * ref.values().norm() * b.values().norm());
    }
}

} // namespace

TEST(MonomialBasis, Examples)
{
    const auto b = monomial_basis(2, 2);
    ASSERT_EQ(b->size(), 3u);
    EXPECT_EQ((*b)[0], MultiIndex({2, 0}));
    EXPECT_EQ((*b)[1], MultiIndex({1, 1}));
    EXPECT_EQ((*b)[2], MultiIndex({0, 2}));
    const auto linear = monomial_basis(3, 1);
    ASSERT_EQ(linear->size(), 3u);
    EXPECT_EQ((*linear)[0], MultiIndex({1, 0, 0}));
    EXPECT_EQ((*linear)[2], MultiIndex({0, 0, 1}));
    EXPECT_EQ(monomial_basis(4, 2)->size(), 10u);
}

TEST(GramSystem, RankOneCoordinatePower)
{
    const auto sys = gram_system(rank_one_pow(vec({1, 0}), 4));
    EXPECT_EQ(sys.size(), 3u);
    EXPECT_EQ(sys.rows(), 5u);
    EXPECT_EQ(sys.target(), vec({1, 0, 0, 0, 0}));
    SymMatrix g(3);
    g(0, 0) = 1.0;
    EXPECT_EQ(sys.apply(g), sys.target());
}

TEST(GramSystem, NotCdExampleTargetIsExpandedPolynomial)
{
    // coefficient of x^{4-j} y^j in sum_i alpha_i (x + u_i y)^4
    const auto v = examples::hankel_not_cd();
    Vector expected = Vector::Zero(5);
    const double binom[] = {1, 4, 6, 4, 1};
    for (int j = 0; j < 5; ++j)
    {
        for (std::size_t i = 0; i < v.nodes.size(); ++i)
        {
            expected[j] += v.weights[i] * binom[j] * std::pow(v.nodes[i], j);
        }
    }
    const auto target = gram_system(not_cd_tensor()).target();
    EXPECT_LE(rel_diff(target, expected), 1e-15 * expected.norm());
    const Vector h = v.generating().values;
    EXPECT_LE(rel_diff(target, vec({h[0], 4 * h[1], 6 * h[2], 4 * h[3], h[4]})), 1e-15 * h.norm());
}

TEST(GramSystem, OddOrderRejected)
{
    EXPECT_THROW(gram_system(rank_one_pow(vec({1, 1}), 3)), unsupported_order);
    EXPECT_THROW(check_sos(rank_one_pow(vec({1, 1}), 3)), unsupported_order);
    EXPECT_THROW(moment_matrix(rank_one_pow(vec({1, 1}), 3)), unsupported_order);
}

TEST(MomentMatrix, Examples)
{
    const auto m = moment_matrix(rank_one_pow(vec({1, 0}), 4));
    EXPECT_EQ(m(0, 0), 1.0);
    EXPECT_EQ(m.frobenius_norm(), 1.0);
    EXPECT_EQ(moment_matrix(SymmetricTensor(4, 3)).frobenius_norm(), 0.0);

    const auto b = random_tensor(RandomKind::dense, 4, 3, 0, 1).tensor;
    const auto mm = moment_matrix(b);
    const auto basis = monomial_basis(3, 2);
    for (std::size_t i = 0; i < basis->size(); ++i)
    {
        for (std::size_t j = 0; j < basis->size(); ++j)
        {
            std::vector<int> e(3);
            for (int k = 0; k < 3; ++k)
            {
                e[static_cast<std::size_t>(k)] = (*basis)[i].exponents()[static_cast<std::size_t>(k)] +
                                                 (*basis)[j].exponents()[static_cast<std::size_t>(k)];
            }
            EXPECT_EQ(mm(i, j), b.at(MultiIndex(e)));
        }
    }
}

TEST(MomentMatrix, SquareIdentity)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const int n = 2 + static_cast<int>(seed % 3);
        const auto b = random_tensor(RandomKind::dense, 4, n, 0, seed).tensor;
        auto rng = make_stream(seed, 5);
        const Vector c = random_normal(rng, static_cast<int>(monomial_basis(n, 2)->size()));
        const double quad = c.dot(moment_matrix(b).to_dense() * c);
        EXPECT_LE(std::abs(square_expansion(b, c) - quad), 1e-10 * (1 + std::abs(quad)));
        EXPECT_LE(std::abs(sos_pairing(square_of_form(c, 4, n), b) - quad), 1e-10 * (1 + std::abs(quad)));

        // same identity with B the coefficient tensor of another square
        const auto p2 = polynomial_coefficients(square_of_form(c, 4, n));
        const Vector d = random_normal(rng, static_cast<int>(c.size()));
        const double dq = d.dot(moment_matrix(p2).to_dense() * d);
        EXPECT_LE(std::abs(square_expansion(p2, d) - dq), 1e-10 * (1 + std::abs(dq)));
    }
}

TEST(CheckSos, RandomSosTensorsAreIn)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const auto a = random_tensor(RandomKind::sos, 4, 3, 2, seed).tensor;
        const auto r = check_sos(a);
        EXPECT_EQ(r.status, Membership::in) << "seed " << seed;
        expect_certificate_holds(a, r, 1e-8);
    }
}

TEST(CheckSos, NotCdExampleIsIn)
{
    const auto a = not_cd_tensor();
    const auto r = check_sos(a);
    ASSERT_EQ(r.status, Membership::in);
    expect_certificate_holds(a, r, 1e-8);
}

TEST(CheckSos, IndefiniteBinaryQuarticIsOut)
{
    const auto a = indefinite_binary();
    const auto r = check_sos(a);
    ASSERT_EQ(r.status, Membership::out);
    expect_certificate_holds(a, r, 1e-8);
}

TEST(CheckSos, QuarticFourExampleHasGramCertificate)
{
    // a Gram matrix with positive lambda_min exists after preconditioning
    const auto a = quartic_four_tensor();
    const auto r = check_sos(a);
    ASSERT_EQ(r.status, Membership::in);
    expect_certificate_holds(a, r, 1e-8);
    EXPECT_GT(*r.residual("t_star"), 0.0);
}

TEST(CheckSos, ZeroTensorIsIn)
{
    const auto r = check_sos(SymmetricTensor(4, 3));
    EXPECT_EQ(r.status, Membership::in);
}

TEST(CheckSos, TraceIdentityOnCertifiedTensors)
{
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const auto a = random_tensor(RandomKind::sos, 4, 3, 3, seed).tensor;
        const auto r = check_sos(a);
        ASSERT_EQ(r.status, Membership::in);
        const auto ref = scale_variables(a, *r.certificate.scaling) * (1.0 / r.certificate.factor);
        const auto b = random_tensor(RandomKind::dense, 4, 3, 0, seed + 40).tensor;
        const double lhs = sos_pairing(ref, b);
        const double rhs = trace_product(*r.certificate.gram, moment_matrix(b));
        EXPECT_LE(std::abs(lhs - rhs), 1e-9 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(CheckSsos, Examples)
{
    const auto d = check_ssos(diagonal_identity(4, 2));
    ASSERT_EQ(d.status, Membership::in);
    EXPECT_NEAR(*d.residual("t_star"), 2.0 / 3.0, 1e-8);
    EXPECT_EQ(*d.residual("perturbation_failures"), 0.0);

    EXPECT_EQ(check_ssos(rank_one_pow(vec({1, 0}), 4)).status, Membership::out);
    EXPECT_EQ(check_ssos(SymmetricTensor(4, 2)).status, Membership::out);
}

TEST(CheckSsos, PerturbationStability)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed)
    {
        const auto a = random_tensor(RandomKind::sos, 4, 3, 8, seed).tensor;
        ConeOptions opt;
        opt.seed = seed;
        const auto r = check_ssos(a, opt);
        if (r.status == Membership::in)
        {
            EXPECT_EQ(*r.residual("perturbation_failures"), 0.0) << "seed " << seed;
        }
    }
}

TEST(CheckSosStar, Examples)
{
    // entries u^alpha of a rank-one tensor give M = v v^T with v the monomials of u
    const auto cd = random_tensor(RandomKind::cd, 4, 3, 4, 2).tensor;
    EXPECT_EQ(check_sos_star(cd).status, Membership::in);

    const auto b = SymmetricTensor::from_entries(4, 2, {{MultiIndex({2, 2}), -1.0}});
    const auto r = check_sos_star(b);
    ASSERT_EQ(r.status, Membership::out);
    ASSERT_TRUE(r.certificate.vector.has_value());
    EXPECT_LT(*r.residual("square_pairing"), 0.0);
    EXPECT_LT(square_expansion(b, *r.certificate.vector), 0.0);

    EXPECT_EQ(check_sos_star(SymmetricTensor(4, 2)).status, Membership::in);
}

TEST(CheckSosStar, PairsNonnegativelyWithSos)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
        const auto b = random_tensor(RandomKind::dense, 4, 2, 0, seed).tensor + rank_one_pow(vec({1, 0.5}), 4) * 3.0;
        const auto r = check_sos_star(b);
        if (r.status != Membership::in)
        {
            continue;
        }
        const auto a = random_tensor(RandomKind::sos, 4, 2, 2, seed + 7).tensor;
        EXPECT_GE(sos_pairing(a, b), -1e-10);
    }
}

TEST(CheckCdHankel, CompleteHankelIsIn)
{
    const VandermondeDecomposition v{4, 3, {1.0, 3.0}, {2.0, 5.0}, {}};
    const auto r = check_cd_hankel(v.generating());
    ASSERT_EQ(r.status, Membership::in);
    ASSERT_TRUE(r.certificate.vandermonde.has_value());
    EXPECT_TRUE(is_complete_hankel(*r.certificate.vandermonde));
    const auto rebuilt = build_from_vandermonde(*r.certificate.vandermonde);
    const auto original = build_from_vandermonde(v);
    EXPECT_LE((rebuilt.values() - original.values()).norm(), 1e-8 * original.values().norm());
}

TEST(CheckCdHankel, PublishedExamplesAreOut)
{
    for (const auto& v : {examples::hankel_not_cd(), examples::hankel_quartic_four()})
    {
        const auto r = check_cd_hankel(v.generating());
        ASSERT_EQ(r.status, Membership::out);
        ASSERT_EQ(r.certificate.kind, "separator");
        // re-check: the separator is the square of a form and pairs
        // negatively with the balanced tensor
        const auto& sep = *r.certificate.separator;
        const Vector& q = *r.certificate.vector;
        EXPECT_LE((sep.values() - square_of_form(q, 4, v.dim).values()).norm(), 1e-15 * sep.values().norm());
        const auto scaled =
            scale_variables(build_from_vandermonde(v), *r.certificate.scaling) * (1.0 / r.certificate.factor);
        EXPECT_LT(inner_full(scaled, sep), 0.0);
    }
}

TEST(CheckCdHankel, OddOrderAndZero)
{
    auto rng = make_stream(1);
    EXPECT_EQ(check_cd_hankel(GeneratingVector(3, 3, random_normal(rng, 7))).status, Membership::in);
    EXPECT_EQ(check_cd_hankel(GeneratingVector(4, 3, Vector::Zero(9))).status, Membership::in);
}

TEST(CheckCpWitness, Examples)
{
    const DecompositionList good(3, {vec({0.3, 0.5, 0.9}), vec({1.0, 0.3, 0.4}), vec({0.6, 0.8, 0.3})});
    const auto r = check_cp_witness(good);
    EXPECT_EQ(r.status, Membership::in);
    EXPECT_EQ(*r.residual("interior"), 1.0);
    EXPECT_DOUBLE_EQ(*r.residual("epsilon"), 0.3);

    const DecompositionList bad(3, {vec({0.3, -0.5, 0.9})});
    EXPECT_NE(check_cp_witness(bad).status, Membership::in);

    const DecompositionList thin(3, {vec({1, 0, 0}), vec({2, 0, 0}), vec({0, 1, 0})});
    const auto t = check_cp_witness(thin);
    EXPECT_EQ(t.status, Membership::in);
    EXPECT_EQ(*t.residual("interior"), 0.0);
}

TEST(ConeChainHarness, NoViolations)
{
    const auto rep = cone_chain_harness(4, 3, 6, 11);
    EXPECT_TRUE(rep.violations.empty());
    for (const auto& [name, count] : rep.checks_run)
    {
        EXPECT_GT(count, 0) << name;
    }
}

TEST(ConeChainHarness, ZeroTensorPairings)
{
    for (int n : {2, 3})
    {
        const SymmetricTensor zero(4, n);
        const auto cd = random_tensor(RandomKind::cd, 4, n, 3, 1).tensor;
        EXPECT_EQ(inner_full(zero, cd), 0.0);
        EXPECT_EQ(inner_coeff(zero, cd), 0.0);
    }
    EXPECT_THROW(cone_chain_harness(3, 2, 1, 0), unsupported_order);
}

TEST(ConeChainHarness, NotCdExamplePairsNonnegativelyWithCd)
{
    const auto a = not_cd_tensor();
    for (std::uint64_t seed = 0; seed < 10; ++seed)
    {
        const auto b = random_tensor(RandomKind::cd, 4, 2, 3, seed).tensor;
        EXPECT_GE(inner_full(a, b), -1e-8 * a.values().norm() * b.values().norm());
    }
}

TEST(HilbertRegime, PdBinaryAndTernaryQuarticsAreSos)
{
    for (int n : {2, 3})
    {
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            const auto a = random_tensor(RandomKind::dense, 4, n, 0, seed).tensor * 0.3 + diagonal_identity(4, n);
            const auto probe = numeric_pd_check(a, {0, seed});
            if (probe.status != ProbeStatus::positive)
            {
                continue;
            }
            EXPECT_EQ(check_sos(a).status, Membership::in) << "n " << n << " seed " << seed;
        }
    }
}
