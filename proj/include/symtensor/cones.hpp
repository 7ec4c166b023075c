#ifndef SYMTENSOR_CONES_HPP
#define SYMTENSOR_CONES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "symtensor/decomposition.hpp"
#include "symtensor/random.hpp"
#include "symtensor/sdp.hpp"
#include "symtensor/spectral.hpp"
#include "symtensor/tensor.hpp"

namespace symtensor
{

using MonomialBasis = MultiIndexSet;

/// Degree-k monomials over n variables, graded-lex sorted; size C(n+k-1, k).
inline std::shared_ptr<const MonomialBasis> monomial_basis(int n, int k)
{
    if (n < 2 || k < 1)
    {
        throw shape_error("monomial_basis needs n >= 2 and k >= 1");
    }
    return multi_index_set(k, n);
}

namespace detail
{
inline int half_order(const SymmetricTensor& a, const char* what)
{
    if (a.order() % 2 != 0)
    {
        throw unsupported_order(std::string(what) + " needs even order, got " +
                                std::to_string(a.order()));
    }
    return a.order() / 2;
}

/// Cell (beta, gamma) of the monomial basis feeds the row of beta + gamma.
inline AffineSystem monomial_system(int order, int dim, Vector target)
{
    const auto basis = monomial_basis(dim, order / 2);
    const auto full = multi_index_set(order, dim);
    AffineSystem sys(basis->size(), full->size(), std::move(target));
    for (std::size_t i = 0; i < basis->size(); ++i)
    {
        for (std::size_t j = i; j < basis->size(); ++j)
        {
            sys.assign(i, j, full->index_of((*basis)[i] + (*basis)[j]));
        }
    }
    return sys;
}
} // namespace detail

///
/// Gram system of A (m = 2k): one row per degree-m multi-index alpha,
/// sum_{beta+gamma=alpha} G_{beta,gamma} = multinomial(alpha) a_alpha.
///
inline AffineSystem gram_system(const SymmetricTensor& a)
{
    detail::half_order(a, "gram_system");
    return detail::monomial_system(a.order(), a.dim(), polynomial_coefficients(a).values());
}

/// M(B) with cell (beta, gamma) equal to the raw entry b_{beta+gamma}.
inline SymMatrix moment_matrix(const SymmetricTensor& b)
{
    detail::half_order(b, "moment_matrix");
    const auto sys = detail::monomial_system(b.order(), b.dim(),
                                             Vector::Zero(static_cast<Eigen::Index>(b.size())));
    return sys.adjoint(b.values());
}

/// Tensor whose form is p(x)^2, p given by coefficients over monomial_basis(n, m/2).
inline SymmetricTensor square_of_form(const Vector& coeffs, int order, int dim)
{
    const auto basis = monomial_basis(dim, order / 2);
    if (coeffs.size() != static_cast<Eigen::Index>(basis->size()))
    {
        throw shape_error("square_of_form: coefficient count does not match the monomial basis");
    }
    SymmetricTensor zero(order, dim);
    Vector poly = Vector::Zero(static_cast<Eigen::Index>(zero.size()));
    for (std::size_t i = 0; i < basis->size(); ++i)
    {
        for (std::size_t j = 0; j < basis->size(); ++j)
        {
            poly[static_cast<Eigen::Index>(zero.indices().index_of((*basis)[i] + (*basis)[j]))] +=
                coeffs[static_cast<Eigen::Index>(i)] * coeffs[static_cast<Eigen::Index>(j)];
        }
    }
    return from_polynomial_coefficients(SymmetricTensor(order, dim, std::move(poly)));
}

enum class Membership
{
    in,
    out,
    inconclusive
};

inline const char* to_string(Membership s)
{
    switch (s)
    {
    case Membership::in: return "In";
    case Membership::out: return "Out";
    case Membership::inconclusive: return "Inconclusive";
    }
    return "?";
}

/// Certificate payloads; which fields are set depends on the emitting check.
struct Certificate
{
    std::string kind; ///< gram | moment | separator | decomposition | vandermonde | witness | none
    std::optional<SymMatrix> gram;
    std::optional<SymMatrix> moment;
    std::optional<SymmetricTensor> separator;
    std::optional<Vector> vector; ///< eigenvector, witness point or null direction
    std::optional<DecompositionList> decomposition;
    std::optional<VandermondeDecomposition> vandermonde;
    /// Diagonal scaling d applied before solving and the data multiplier;
    /// certificates marked scaled refer to scale_variables(A, d) / factor.
    std::optional<Vector> scaling;
    double factor = 1.0;
    bool scaled = false;
};

struct MembershipReport
{
    std::string cone;
    Membership status = Membership::inconclusive;
    std::string convention;
    Certificate certificate;
    std::vector<std::pair<std::string, double>> residuals;
    std::vector<std::string> assumptions;
    std::vector<std::string> notes;

    void add_residual(std::string name, double v) { residuals.emplace_back(std::move(name), v); }

    std::optional<double> residual(const std::string& name) const
    {
        for (const auto& [k, v] : residuals)
        {
            if (k == name)
            {
                return v;
            }
        }
        return std::nullopt;
    }
};

struct ConeOptions
{
    double tol = 1e-8;
    std::uint64_t seed = 0;
    int max_iter = 50000;
    /// Relative threshold for Hankel-moment separators; their pairings
    /// are computed to near machine precision after balancing.
    double separator_tol = 1e-12;
    int perturbation_probes = 5;
};

inline constexpr const char* coefficient_convention =
    "coefficient: <A,B> = sum_alpha c_alpha(A) b_alpha with c_alpha(A) = multinomial(alpha) a_alpha";
inline constexpr const char* full_index_convention =
    "full-index: <A,B> = sum over all index tuples a_{i1..im} b_{i1..im}";

/// Scaled copy of a tensor used by the SOS checks: unit diagonal, unit max entry.
struct Preconditioned
{
    SymmetricTensor tensor;
    Vector d;
    double factor = 1.0;
};

inline Preconditioned precondition(const SymmetricTensor& a)
{
    Preconditioned p{a, equilibration_scale(a), 1.0};
    p.tensor = scale_variables(a, p.d);
    p.factor = p.tensor.max_abs();
    if (p.factor > 0.0)
    {
        p.tensor = p.tensor * (1.0 / p.factor);
    }
    else
    {
        p.factor = 1.0;
    }
    return p;
}

/// True when G is PSD to tol (relative to max(1, ||G||_F)) and L(G) = c to tol relative.
inline bool gram_certificate_valid(const SymmetricTensor& a, const SymMatrix& g, double tol)
{
    const auto sys = gram_system(a);
    const double affine = (sys.apply(g) - sys.target()).norm() / std::max(1.0, sys.target().norm());
    return min_eigenvalue(g) >= -tol * std::max(1.0, g.frobenius_norm()) && affine <= tol;
}

/// pairing <A, B> = inner_coeff(polynomial_coefficients(A), B) of an SOS separator.
inline double sos_pairing(const SymmetricTensor& a, const SymmetricTensor& b)
{
    return inner_coeff(polynomial_coefficients(a), b);
}

///
/// SOS membership. In carries a Gram matrix; Out carries a separator B with
/// M(B) PSD and <A, B> < 0 (coefficient convention); solver stagnation
/// gives Inconclusive. Work happens on the equilibrated, unit-scaled tensor
/// and certificates refer to it (certificate.scaled).
///
inline MembershipReport check_sos(const SymmetricTensor& a, ConeOptions opt = {})
{
    detail::half_order(a, "check_sos");
    MembershipReport r;
    r.cone = "sos";
    r.convention = coefficient_convention;
    const Preconditioned p = precondition(a);
    r.certificate.scaling = p.d;
    r.certificate.factor = p.factor;
    r.certificate.scaled = true;
    const AffineSystem sys = gram_system(p.tensor);
    const double cnorm = std::max(1.0, sys.target().norm());

    auto accept_gram = [&](const SymMatrix& g, const char* how) {
        const double lmin = min_eigenvalue(g);
        const double affine = (sys.apply(g) - sys.target()).norm() / cnorm;
        if (lmin >= -opt.tol * std::max(1.0, g.frobenius_norm()) && affine <= opt.tol)
        {
            r.status = Membership::in;
            r.certificate.kind = "gram";
            r.certificate.gram = g;
            r.add_residual("gram_min_eigenvalue", lmin);
            r.add_residual("affine", affine);
            r.notes.emplace_back(how);
            return true;
        }
        return false;
    };

    if (p.tensor.max_abs() == 0.0)
    {
        accept_gram(SymMatrix(sys.size()), "zero tensor");
        return r;
    }

    const MaxMinEig best = max_min_eig_unchecked(sys);
    r.add_residual("t_star", best.t);
    if (accept_gram(best.gram, "barrier: max lambda_min over the Gram affine space"))
    {
        return r;
    }
    FeasibilityOptions fo;
    fo.tol = opt.tol;
    fo.max_iter = std::min(opt.max_iter, 20000);
    const SdpOutcome feas = solve_feasibility(sys, fo);
    if (feas.status == SdpStatus::feasible && feas.primal &&
        accept_gram(*feas.primal, "alternating projections"))
    {
        return r;
    }

    SpectrahedronOptions so;
    so.tol = opt.tol;
    const SdpOutcome sep = minimize_linear_over_spectrahedron(sys.target(), sys, so);
    if (sep.dual)
    {
        const SymmetricTensor b(a.order(), a.dim(), *sep.dual);
        const SymMatrix m = moment_matrix(b);
        const double lmin = min_eigenvalue(m);
        const double pairing = sos_pairing(p.tensor, b);
        const double bound = -opt.tol * p.tensor.values().norm() * b.values().norm();
        r.add_residual("separator_pairing", pairing);
        r.add_residual("separator_moment_min_eigenvalue", lmin);
        if (lmin >= -opt.tol * m.frobenius_norm() && pairing <= bound)
        {
            r.status = Membership::out;
            r.certificate.kind = "separator";
            r.certificate.separator = b;
            r.certificate.moment = m;
            return r;
        }
    }
    r.status = Membership::inconclusive;
    r.certificate.kind = "none";
    r.notes.emplace_back("no Gram matrix within tolerance and no separator with a negative pairing");
    return r;
}

///
/// SSOS (interior of SOS): In iff t* = max lambda_min(G) over the Gram
/// affine space exceeds tol * max|c|. The report also runs perturbation
/// probes A +- (t*/4) E for seeded directions E of unit
/// polynomial-coefficient norm; each must stay SOS.
///
inline MembershipReport check_ssos(const SymmetricTensor& a, ConeOptions opt = {})
{
    detail::half_order(a, "check_ssos");
    MembershipReport r;
    r.cone = "ssos";
    r.convention = coefficient_convention;
    const AffineSystem sys = gram_system(a);
    const double cscale = sys.target().cwiseAbs().maxCoeff();
    if (cscale == 0.0)
    {
        r.status = Membership::out;
        r.certificate.kind = "gram";
        r.certificate.gram = SymMatrix(sys.size());
        r.add_residual("t_star", 0.0);
        r.notes.emplace_back("zero tensor lies on the SOS boundary");
        return r;
    }
    const MaxMinEig best = max_min_eig_unchecked(sys);
    r.certificate.kind = "gram";
    r.certificate.gram = best.gram;
    r.add_residual("t_star", best.t);
    r.add_residual("duality_gap", best.gap);
    r.add_residual("affine", best.affine_residual);
    if (!(best.t > opt.tol * cscale))
    {
        r.status = best.converged ? Membership::out : Membership::inconclusive;
        r.notes.emplace_back("largest attainable Gram lambda_min is not positive");
        return r;
    }
    r.status = Membership::in;

    const double eps = best.t / 4.0;
    int failures = 0;
    for (int k = 0; k < opt.perturbation_probes; ++k)
    {
        auto rng = make_stream(opt.seed, static_cast<std::uint64_t>(k));
        SymmetricTensor coeffs(a.order(), a.dim(),
                               random_normal(rng, static_cast<int>(a.size())));
        coeffs = coeffs * (1.0 / coeffs.values().norm());
        const SymmetricTensor e = from_polynomial_coefficients(coeffs);
        for (double sign : {1.0, -1.0})
        {
            if (check_sos(a + e * (sign * eps), opt).status != Membership::in)
            {
                ++failures;
                r.notes.push_back("perturbation probe " + std::to_string(k) +
                                  (sign > 0 ? " (+)" : " (-)") + " left the SOS cone");
            }
        }
    }
    r.add_residual("perturbation_epsilon", eps);
    r.add_residual("perturbation_failures", failures);
    return r;
}

/// SOS* membership through M(B) PSD; Out carries the violating eigenvector c,
/// whose square p^2 pairs negatively with B.
inline MembershipReport check_sos_star(const SymmetricTensor& b, ConeOptions opt = {})
{
    detail::half_order(b, "check_sos_star");
    MembershipReport r;
    r.cone = "sos-star";
    r.convention = coefficient_convention;
    const SymMatrix m = moment_matrix(b);
    const SymEigen e = eig_sym(m);
    const double lmin = e.values[0];
    r.add_residual("moment_min_eigenvalue", lmin);
    r.certificate.moment = m;
    if (lmin >= -opt.tol * m.frobenius_norm())
    {
        r.status = Membership::in;
        r.certificate.kind = "moment";
        return r;
    }
    const Vector c = e.vectors.col(0);
    const SymmetricTensor p2 = square_of_form(c, b.order(), b.dim());
    r.status = Membership::out;
    r.certificate.kind = "moment";
    r.certificate.vector = c;
    r.certificate.separator = p2;
    r.add_residual("square_pairing", sos_pairing(p2, b));
    return r;
}

namespace detail
{
/// A degree-k monomial over n variables with position sum s.
inline MultiIndex monomial_with_position_sum(int n, int k, int s)
{
    std::vector<int> e(static_cast<std::size_t>(n), 0);
    int remaining = k;
    for (int i = n - 1; i >= 1 && remaining > 0; --i)
    {
        const int take = std::min(remaining, s / i);
        e[static_cast<std::size_t>(i)] += take;
        remaining -= take;
        s -= take * i;
    }
    e[0] += remaining;
    return MultiIndex(std::move(e));
}
} // namespace detail

///
/// CD membership for Hankel tensors. Odd order is In (CD = S there).
///
/// Out is reported in two ways. If the Hankel moment matrix H_{st} = h_{s+t}
/// of the balanced generating vector has a negative eigenvector c, the
/// square of q(x) = sum_s c_s x^{beta(s)} pairs negatively with the
/// tensor, which no sum of m-th powers can do. Otherwise a Prony
/// decomposition with a negative weight is reported as Out under the
/// assertion that a CD Hankel tensor is complete Hankel. In carries a
/// nonnegative Vandermonde decomposition.
///
inline MembershipReport check_cd_hankel(const GeneratingVector& h, ConeOptions opt = {})
{
    MembershipReport r;
    r.cone = "cd-hankel";
    r.convention = full_index_convention;
    if (h.order % 2 != 0)
    {
        r.status = Membership::in;
        r.certificate.kind = "none";
        r.notes.emplace_back("odd order: every symmetric tensor is CD");
        return r;
    }
    const Eigen::Index length = h.size();
    const double hmax = h.values.cwiseAbs().maxCoeff();
    if (hmax == 0.0)
    {
        r.status = Membership::in;
        r.certificate.kind = "vandermonde";
        r.certificate.vandermonde = VandermondeDecomposition{h.order, h.dim, {}, {}, {}};
        return r;
    }

    // balanced, unit-scaled copy; d_i = c^i maps Hankel to Hankel
    const double c = detail::balance_factor(h.values);
    Vector hb(length);
    for (Eigen::Index i = 0; i < length; ++i)
    {
        hb[i] = std::pow(c, static_cast<double>(i)) * h.values[i];
    }
    const double factor = hb.cwiseAbs().maxCoeff();
    hb /= factor;
    Vector d(h.dim);
    for (int i = 0; i < h.dim; ++i)
    {
        d[i] = std::pow(c, i);
    }
    r.certificate.scaling = d;
    r.certificate.factor = factor;
    r.add_residual("balance", c);

    const int k = h.order / 2;
    const Eigen::Index deg = length / 2;
    const SymMatrix hm = SymMatrix::from_dense(detail::hankel_matrix(hb, deg + 1, deg + 1));
    const SymEigen e = eig_sym(hm);
    r.add_residual("hankel_moment_min_eigenvalue", e.values[0]);
    if (e.values[0] < -opt.separator_tol * hm.frobenius_norm())
    {
        const Vector cvec = e.vectors.col(0);
        const auto basis = monomial_basis(h.dim, k);
        Vector q = Vector::Zero(static_cast<Eigen::Index>(basis->size()));
        for (Eigen::Index s = 0; s <= deg; ++s)
        {
            const auto beta = detail::monomial_with_position_sum(h.dim, k, static_cast<int>(s));
            q[static_cast<Eigen::Index>(basis->index_of(beta))] += cvec[s];
        }
        const SymmetricTensor sep = square_of_form(q, h.order, h.dim);
        const SymmetricTensor scaled = hankel_from_generating(GeneratingVector(h.order, h.dim, hb));
        const double pairing = inner_full(scaled, sep);
        r.add_residual("separator_pairing", pairing);
        if (pairing < -opt.separator_tol * scaled.values().norm() * sep.values().norm())
        {
            r.status = Membership::out;
            r.certificate.kind = "separator";
            r.certificate.separator = sep;
            r.certificate.vector = q;
            r.certificate.scaled = true;
            r.notes.emplace_back("separator is the square of a form; it pairs nonnegatively "
                                 "with every sum of m-th powers");
            return r;
        }
    }

    PronyResult pr = prony_decompose(h, 1e-13);
    if (pr.status == PronyStatus::rank_overflow && length % 2 == 1)
    {
        pr = anchored_vandermonde(h, 1e-12);
    }
    r.add_residual("prony_rank", pr.rank);
    r.add_residual("prony_residual", pr.residual);
    if (!pr.ok())
    {
        r.status = Membership::inconclusive;
        r.certificate.kind = "none";
        r.notes.push_back(std::string("Vandermonde decomposition unavailable: ") +
                          to_string(pr.status) + (pr.message.empty() ? "" : " (" + pr.message + ")"));
        return r;
    }
    double wmax = pr.decomposition.infinity_weight ? std::abs(*pr.decomposition.infinity_weight) : 0.0;
    double wmin = pr.decomposition.infinity_weight ? *pr.decomposition.infinity_weight : 0.0;
    for (double w : pr.decomposition.weights)
    {
        wmax = std::max(wmax, std::abs(w));
        wmin = std::min(wmin, w);
    }
    r.certificate.kind = "vandermonde";
    r.certificate.vandermonde = pr.decomposition;
    r.certificate.scaled = false;
    if (wmin >= -opt.tol * wmax)
    {
        r.status = Membership::in;
        return r;
    }
    r.status = Membership::out;
    r.assumptions.emplace_back("a CD Hankel tensor is a complete Hankel tensor");
    return r;
}

/// CP witness check. In when every vector and weight is nonnegative; the
/// interior flag needs a spanning set, reported with eps = min coordinate.
/// A failed witness proves nothing, so it reports Inconclusive.
inline MembershipReport check_cp_witness(const DecompositionList& dec)
{
    dec.validate();
    MembershipReport r;
    r.cone = "cp-witness";
    r.convention = full_index_convention;
    r.certificate.kind = "decomposition";
    r.certificate.decomposition = dec;
    const bool weights_ok =
        std::all_of(dec.weights.begin(), dec.weights.end(), [](double w) { return w >= 0.0; });
    double eps = std::numeric_limits<double>::infinity();
    for (const auto& v : dec.vectors)
    {
        eps = std::min(eps, v.minCoeff());
    }
    if (dec.size() == 0)
    {
        eps = 0.0;
    }
    r.add_residual("min_coordinate", eps);
    if (!(weights_ok && dec.nonnegative_vectors()))
    {
        r.status = Membership::inconclusive;
        r.notes.emplace_back("not a CP witness: a vector or weight is negative");
        return r;
    }
    r.status = Membership::in;
    const bool interior = dec.size() > 0 && spans(dec) && eps > 0.0;
    r.add_residual("interior", interior ? 1.0 : 0.0);
    r.add_residual("epsilon", interior ? eps : 0.0);
    return r;
}

///
/// Seeded sampling of the cone chain CP < CD < SOS < PSD < COP and the
/// dual pairings. Each violation records the sample index; sample i uses
/// the random stream (seed, i).
///
struct HarnessViolation
{
    std::string check;
    int sample = 0;
    double value = 0.0;
};

struct HarnessReport
{
    int order = 0;
    int dim = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, int>> checks_run;
    std::vector<HarnessViolation> violations;
};

inline HarnessReport cone_chain_harness(int m, int n, int samples, std::uint64_t seed,
                                        double tol = 1e-8)
{
    if (m % 2 != 0)
    {
        throw unsupported_order("cone_chain_harness needs even order");
    }
    HarnessReport rep{m, n, samples, seed, {}, {}};
    std::vector<int> counts(7, 0);
    const char* names[] = {"cp_in_sos",        "cp_copositive",    "cd_in_sos",
                           "cp_vs_cop_probe",  "cd_vs_pd_probe",   "sos_vs_sos_star",
                           "zero_pairings"};
    auto violate = [&](int which, int i, double v) {
        rep.violations.push_back({names[which], i, v});
    };
    ConeOptions copt;
    copt.tol = tol;
    for (int i = 0; i < samples; ++i)
    {
        auto rng = make_stream(seed, static_cast<std::uint64_t>(i));
        const std::uint64_t sub = rng();
        const auto cp = random_tensor(RandomKind::cp, m, n, n + 1, sub);
        const auto cd = random_tensor(RandomKind::cd, m, n, n + 1, sub + 1);
        const auto sos = random_tensor(RandomKind::sos, m, n, 2, sub + 2);
        const double tiny = 1e-10;

        ++counts[0];
        if (check_sos(cp.tensor, copt).status != Membership::in)
        {
            violate(0, i, 0.0);
        }
        ++counts[1];
        const auto cm = copositive_min(cp.tensor, {0, sub});
        if (cm.status == ProbeStatus::negative_witness)
        {
            violate(1, i, cm.min_value);
        }
        ++counts[2];
        if (check_sos(cd.tensor, copt).status != Membership::in)
        {
            violate(2, i, 0.0);
        }

        // dual samples: a small Gaussian tensor on top of the diagonal one,
        // kept only when the probe passes
        const SymmetricTensor probe =
            random_tensor(RandomKind::dense, m, n, 0, sub + 3).tensor * 0.05 + diagonal_identity(m, n);
        if (copositive_min(probe, {0, sub}).status == ProbeStatus::positive)
        {
            ++counts[3];
            const double v = inner_full(cp.tensor, probe);
            if (v < -tiny)
            {
                violate(3, i, v);
            }
        }
        if (numeric_pd_check(probe, {0, sub}).status == ProbeStatus::positive)
        {
            ++counts[4];
            const double v = inner_full(cd.tensor, probe);
            if (v < -tiny)
            {
                violate(4, i, v);
            }
        }
        // SOS* sample: moments of enough points for a full-rank M(B), plus noise
        const auto nbasis = static_cast<int>(monomial_basis(n, m / 2)->size());
        SymmetricTensor star = SymmetricTensor(m, n);
        for (int j = 0; j < nbasis + 2; ++j)
        {
            star = star + rank_one_pow(random_normal(rng, n), m);
        }
        star = star + random_tensor(RandomKind::dense, m, n, 0, sub + 4).tensor * 0.01;
        if (check_sos_star(star, copt).status == Membership::in)
        {
            ++counts[5];
            const double v = sos_pairing(sos.tensor, star);
            if (v < -tiny)
            {
                violate(5, i, v);
            }
        }
    }
    const SymmetricTensor zero(m, n);
    ++counts[6];
    const double zsum = std::abs(inner_full(zero, diagonal_identity(m, n))) +
                        std::abs(inner_coeff(zero, diagonal_identity(m, n)));
    if (zsum != 0.0)
    {
        violate(6, -1, zsum);
    }
    for (int k = 0; k < 7; ++k)
    {
        rep.checks_run.emplace_back(names[k], counts[static_cast<std::size_t>(k)]);
    }
    return rep;
}

} // namespace symtensor

#endif // SYMTENSOR_CONES_HPP
