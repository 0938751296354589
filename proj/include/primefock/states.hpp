#pragma once

#include "primefock/fock.hpp"

#include <map>

namespace primefock {

/// Parameters shared by the coherent-state families: the Dirichlet exponent s
/// (Re s > 1/2) and a finitely supported site amplitude list.  The same
/// container carries z for the bosonic families and zeta for the generalized
/// ones; optional per-site homodyne angles ride along for the detector code.
struct SiteParams {
    Complex s{1.0, 0.0};
    std::map<Prime, Complex> z;
    std::map<Prime, double> phases;

    double sigma() const { return s.real(); }
    Complex z_of(Prime p) const {
        auto it = z.find(p);
        return it == z.end() ? Complex{0.0, 0.0} : it->second;
    }
    double phase_of(Prime p) const {
        auto it = phases.find(p);
        return it == phases.end() ? 0.0 : it->second;
    }

    // Flip the sign of every site amplitude (the cat partner parameters).
    SiteParams negated() const;

    // P(2 sigma, |z|^2) = sum_p p^{-2 sigma} |z_p|^2
    double p_sum() const;

    void validate() const;     // sigma > 1/2, prime keys, angles in [0, 2pi)
    void validate_gen() const; // additionally |zeta_p| < p^sigma, strict
};

enum class StateFamily { LocalCs, Ncs, GenCs, Moebius };

// Single-site coherent state |alpha> at site p, every other site in vacuum.
// The cap at p must satisfy kmax >= |alpha|^2 + 20 sqrt(|alpha|^2 + 1) + 30
// (Poisson tail below 1e-14); too-small caps are rejected with the required
// value in the message.
FockVector local_cs(Complex alpha, Prime p, const TruncationSpec& trunc);

// Smallest cap accepted by local_cs for this amplitude.
std::uint32_t local_cs_required_cap(Complex alpha);

// Nonlocal coherent state: amplitude e^{-P/2} n^{-s} prod z_p^{a_p} / c_n.
// The analytic normalization is kept, so 1 - |v|^2 measures the tail.
FockVector ncs(const SiteParams& params, const TruncationSpec& trunc);

// Generalized coherent state: sqrt(S) n^{-s} prod zeta_p^{a_p} with
// S = prod (1 - p^{-2 sigma} |zeta_p|^2); requires |zeta_p| < p^sigma.
FockVector gen_cs(const SiteParams& params, const TruncationSpec& trunc);

// Moebius state: sqrt(S_mu) mu(n) n^{-s} prod zeta_p^{a_p} with
// S_mu = prod (1 + p^{-2 sigma} |zeta_p|^2)^{-1}; squarefree support only.
FockVector moebius_state(const SiteParams& params, const TruncationSpec& trunc);

// Family dispatcher (LocalCs requires exactly one site entry).
FockVector build_state(StateFamily family, const SiteParams& params,
                       const TruncationSpec& trunc);

// 1 - |v|^2 clamped to [0, 1]; meaningful for vectors carrying the analytic
// normalization of the builders above.
double truncation_defect(const FockVector& v);

// Defect the builder would report on this truncation, from the per-site tail
// series (no state is materialized).
double predicted_defect(StateFamily family, const SiteParams& params,
                        const TruncationSpec& trunc);

// Uniform-cap truncation over the parameter support whose predicted defect is
// below `defect_target`; caps double from a small start.  Throws if the basis
// would exceed `max_basis` states before reaching the target.
TruncationSpec auto_truncation(StateFamily family, const SiteParams& params,
                               double defect_target = 1e-10,
                               double max_basis = 2e7);

} // namespace primefock
