#include "primefock/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace primefock {

namespace {

const Complex kCatPlus{0.5, 0.5};   // e^{+i pi/4} / sqrt(2)
const Complex kCatMinus{0.5, -0.5}; // e^{-i pi/4} / sqrt(2)

// Coefficients e^{-|alpha|^2/2} alpha^k / sqrt(k!) for k = 0..cap, via the
// same log-space route as the state builders.
std::vector<Complex> cs_coefficients(Complex alpha, std::uint32_t cap) {
    std::vector<Complex> c(cap + 1, Complex{0.0, 0.0});
    if (alpha == Complex{0.0, 0.0}) {
        c[0] = {1.0, 0.0};
        return c;
    }
    Complex log_alpha = std::log(alpha);
    double half = 0.5 * std::norm(alpha);
    for (std::uint32_t k = 0; k <= cap; ++k)
        c[k] = std::exp(double(k) * log_alpha - 0.5 * std::lgamma(double(k) + 1.0) -
                        Complex{half, 0.0});
    return c;
}

} // namespace

HamiltonianKind HamiltonianKind::single_site_gen_quadratic(Prime p) {
    if (!is_prime(p))
        throw std::invalid_argument("HamiltonianKind: projector site " + std::to_string(p) +
                                    " is not prime");
    return {Tag::SingleSiteGenQuadratic, 0, p};
}

std::int64_t energy(const HamiltonianKind& kind, const Occupation& occ) {
    switch (kind.tag) {
        case HamiltonianKind::Tag::Harmonic:
            return std::int64_t(profile(occ).big_omega);
        case HamiltonianKind::Tag::LocalQuadratic:
            return std::int64_t(profile(occ).q_energy);
        case HamiltonianKind::Tag::GlobalQuadratic: {
            std::int64_t o = std::int64_t(profile(occ).big_omega);
            return o * o;
        }
        case HamiltonianKind::Tag::GenGlobalQuadratic: {
            std::int64_t w = std::int64_t(profile(occ).little_omega);
            return w * w;
        }
        case HamiltonianKind::Tag::FiniteLocalQuadratic: {
            std::int64_t acc = 0;
            for (const auto& e : occ.entries())
                if (e.prime < kind.cutoff) acc += std::int64_t(e.exponent) * e.exponent;
            return acc;
        }
        case HamiltonianKind::Tag::MixedBelowX: {
            std::int64_t acc = 0;
            for (const auto& e : occ.entries()) {
                if (e.prime < kind.cutoff)
                    acc += std::int64_t(e.exponent) * e.exponent;
                else
                    acc += std::int64_t(e.exponent);
            }
            return acc;
        }
        case HamiltonianKind::Tag::SingleSiteGenQuadratic:
            return occ.exponent_of(kind.site) > 0 ? 1 : 0;
    }
    throw std::logic_error("energy: unknown Hamiltonian tag");
}

FockVector evolve(const HamiltonianKind& kind, double t, const FockVector& v) {
    return apply_diagonal_phase([&kind](const Occupation& o) { return energy(kind, o); }, t, v);
}

FockVector evolve_quarter(const HamiltonianKind& kind, double t, int quarter_turns,
                          const FockVector& v) {
    return apply_diagonal_phase_quarter(
        [&kind](const Occupation& o) { return energy(kind, o); }, t, quarter_turns, v);
}

FockVector cat_superposition(const FockVector& plus_branch, const FockVector& minus_branch) {
    return sum(scaled(kCatPlus, plus_branch), scaled(kCatMinus, minus_branch));
}

CatCheck cat_residual(const HamiltonianKind& kind, StateFamily family,
                      const SiteParams& params, double t, const TruncationSpec& trunc) {
    auto psi_plus = build_state(family, params, trunc);
    auto psi_minus = build_state(family, params.negated(), trunc);
    auto lhs = evolve_quarter(kind, t, 1, psi_plus);
    auto rhs = cat_superposition(evolve(kind, t, psi_plus), evolve(kind, t, psi_minus));
    auto diff = difference(lhs, rhs);
    return {inf_norm_difference(lhs, rhs), norm(diff), truncation_defect(psi_plus)};
}

CatCheck factorized_cat_check(const HamiltonianKind& kind, const SiteParams& params,
                              double t, const TruncationSpec& trunc) {
    if (kind.tag != HamiltonianKind::Tag::FiniteLocalQuadratic &&
        kind.tag != HamiltonianKind::Tag::MixedBelowX)
        throw std::invalid_argument("factorized_cat_check: needs a cutoff Hamiltonian");

    auto psi = ncs(params, trunc);
    auto lhs = evolve_quarter(kind, t, 1, psi);

    // Build the claimed right-hand side as an explicit tensor product of
    // per-site factors, never reusing the left-hand side's phase shortcut.
    std::size_t sites = trunc.n_sites();
    std::vector<std::vector<Complex>> factor(sites);
    Complex rot = unit_phase(1, t) * Complex{0.0, 1.0}; // e^{i(t + pi/2)}
    for (std::size_t i = 0; i < sites; ++i) {
        Prime p = trunc.active_primes[i];
        std::uint32_t cap = trunc.caps[i];
        Complex alpha = std::pow(Complex(double(p), 0.0), -params.s) * params.z_of(p);
        if (p < kind.cutoff) {
            // Two-branch factor: both branches evolved under N_p^2 for time t.
            auto plus = cs_coefficients(alpha, cap);
            auto minus = cs_coefficients(-alpha, cap);
            std::vector<Complex> f(cap + 1);
            for (std::uint32_t k = 0; k <= cap; ++k) {
                Complex ph = unit_phase(std::int64_t(k) * k, t);
                f[k] = kCatPlus * plus[k] * ph + kCatMinus * minus[k] * ph;
            }
            factor[i] = std::move(f);
        } else if (kind.tag == HamiltonianKind::Tag::FiniteLocalQuadratic) {
            factor[i] = cs_coefficients(alpha, cap); // untouched spectator
        } else {
            factor[i] = cs_coefficients(rot * alpha, cap); // harmonically rotated
        }
    }

    FockVector rhs(trunc);
    trunc.for_each_basis([&](const Occupation& occ) {
        Complex amp{1.0, 0.0};
        for (std::size_t i = 0; i < sites; ++i)
            amp *= factor[i][occ.exponent_of(trunc.active_primes[i])];
        rhs.set_amplitude(occ, amp);
    });

    auto diff = difference(lhs, rhs);
    return {inf_norm_difference(lhs, rhs), norm(diff), truncation_defect(psi)};
}

} // namespace primefock
