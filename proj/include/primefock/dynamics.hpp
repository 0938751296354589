#pragma once

#include "primefock/states.hpp"

namespace primefock {

/// Diagonal Hamiltonians with integer spectra.  Every flow here is a pure
/// phase per basis state and hence 2pi-periodic in t.
struct HamiltonianKind {
    enum class Tag {
        Harmonic,               // sum_p N_p           -> Omega(n)
        LocalQuadratic,         // sum_p N_p^2         -> sum a_p^2
        GlobalQuadratic,        // (sum_p N_p)^2       -> Omega(n)^2
        GenGlobalQuadratic,     // M^2                 -> omega(n)^2
        FiniteLocalQuadratic,   // sum_{p<x} N_p^2
        MixedBelowX,            // sum_{p<x} N_p^2 + sum_{p>=x} N_p
        SingleSiteGenQuadratic, // M_p (a 0/1 projector)
    };

    Tag tag = Tag::Harmonic;
    std::uint64_t cutoff = 0; // x for the two cutoff kinds
    Prime site = 0;           // p for SingleSiteGenQuadratic

    static HamiltonianKind harmonic() { return {Tag::Harmonic, 0, 0}; }
    static HamiltonianKind local_quadratic() { return {Tag::LocalQuadratic, 0, 0}; }
    static HamiltonianKind global_quadratic() { return {Tag::GlobalQuadratic, 0, 0}; }
    static HamiltonianKind gen_global_quadratic() { return {Tag::GenGlobalQuadratic, 0, 0}; }
    static HamiltonianKind finite_local_quadratic(std::uint64_t x) {
        return {Tag::FiniteLocalQuadratic, x, 0};
    }
    static HamiltonianKind mixed_below(std::uint64_t x) { return {Tag::MixedBelowX, x, 0}; }
    static HamiltonianKind single_site_gen_quadratic(Prime p); // validates p

    bool operator==(const HamiltonianKind&) const = default;
};

// The (nonnegative integer) eigenvalue of the Hamiltonian on |occ>.
std::int64_t energy(const HamiltonianKind& kind, const Occupation& occ);

// exp(+i H t) applied to v.
FockVector evolve(const HamiltonianKind& kind, double t, const FockVector& v);

// exp(+i H (t + quarter_turns * pi/2)) with the quarter turns applied as
// exact powers of i, so the doubling point never suffers from a rounded
// t + pi/2.
FockVector evolve_quarter(const HamiltonianKind& kind, double t, int quarter_turns,
                          const FockVector& v);

// (e^{i pi/4} a + e^{-i pi/4} b) / sqrt(2), the two-branch cat combination.
// The weights are the exact (1 +- i)/2.  Mismatched bases are rejected.
FockVector cat_superposition(const FockVector& plus_branch, const FockVector& minus_branch);

struct CatCheck {
    double inf_norm; // max amplitude deviation between the two sides
    double two_norm; // l2 deviation
    double defect;   // truncation defect of the +w state, for scaled tolerances
};

// Compare exp(iH(t + pi/2)) psi(w) against the two-branch superposition of
// the t-evolved psi(+w) and psi(-w).  Small for the doubling pairs
// (LocalCs with a quadratic site term, Ncs with GlobalQuadratic, Moebius
// with GenGlobalQuadratic or its single-site projector); order-one for the
// non-doubling pairs (GenCs with GenGlobalQuadratic, Ncs with
// LocalQuadratic).
CatCheck cat_residual(const HamiltonianKind& kind, StateFamily family,
                      const SiteParams& params, double t, const TruncationSpec& trunc);

// For the cutoff Hamiltonians, compare exp(iH(t + pi/2)) ncs against the
// explicit per-site product: two-branch factors below the cutoff, spectator
// factors above it (unchanged for FiniteLocalQuadratic, harmonically rotated
// by t + pi/2 for MixedBelowX).
CatCheck factorized_cat_check(const HamiltonianKind& kind, const SiteParams& params,
                              double t, const TruncationSpec& trunc);

} // namespace primefock
