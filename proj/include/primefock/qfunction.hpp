#pragma once

#include "primefock/dynamics.hpp"

#include <utility>
#include <vector>

namespace primefock {

/// Evaluation lattice for Q-function sweeps: probe points (single-site
/// amplitudes or full per-site assignments) crossed with times.
struct QGrid {
    std::vector<Complex> points;                     // single-site probes
    std::vector<std::map<Prime, Complex>> vec_points; // full z assignments
    std::vector<double> times;

    void validate() const; // nonempty times, at least one point list, finite
};

enum class SingleKind { Harmonic, Quadratic };
enum class QKind { Harmonic, LocalQuadratic, GlobalQuadratic };

// Single-mode Husimi value |<alpha0| e^{iHt} |alpha>|^2.  Harmonic: the
// Gaussian's center circles clockwise, exp(-|alpha - e^{-it} alpha0|^2).
// Quadratic (H = N^2): exp(-|alpha|^2 - |alpha0|^2) |S(t)|^2 with
// S(t) = sum_k (conj(alpha0) alpha)^k e^{ik^2 t} / k!.
double q_single(Complex alpha0, Complex alpha, double t, SingleKind kind);

// S(t) = sum_{k<=kcap} a^k/k! e^{ik^2 t} in ascending k.  The cap must
// already be past the point where |a|^k/k! < 1e-18; smaller caps are
// rejected with the needed value in the message.
Complex s_closed(Complex a, double t, int kcap);

// Smallest cap s_closed accepts for this argument (at most 400).
int s_required_cap(Complex a);

// Adaptive version used internally: ascending k until the term magnitude
// falls below 1e-18 of the absolute series scale e^{|a|}; more than 400
// terms is an error.
Complex s_series(Complex a, double t);

// Husimi value of the evolved nonlocal state: |<ncs(params0)| e^{iHt}
// |ncs(params)>|^2 on the truncated basis.  Both parameter sets must share s.
double q_ncs(const SiteParams& params0, const SiteParams& params, double t, QKind kind,
             const TruncationSpec& trunc);

// The globally quadratic S(t) both ways: first the standalone Dirichlet sum
// over the truncated basis (term per occupation, e^{i Omega^2 t} phases),
// second the closed form s_series(a, t) with a = sum_p p^{-2 sigma}
// conj(z_{p,0}) z_p.  Returned untouched so callers can compare.
std::pair<Complex, Complex> equivalence_global(const SiteParams& params0,
                                               const SiteParams& params, double t,
                                               const TruncationSpec& trunc);

// Relative deviation between the joint Q and the product of per-site
// single-mode Qs (always built with the quadratic single-site flow).  Small
// for LocalQuadratic, order-one for GlobalQuadratic.
double separability_check(const SiteParams& params0, const SiteParams& params, double t,
                          QKind kind, const TruncationSpec& trunc);

// Quadrature check of the single-site resolution of identity: integrates the
// coherent projector against its radial measure (Gauss-Legendre after the
// u = p^{-2 sigma} r^2 substitution) and the uniform angle (periodic
// trapezoid), then returns max |M[j][k] - delta_jk| over j,k <= kmax.
// r_max must reach far enough past the k <= kmax Poisson mass.
double resolution_check_single_site(Prime p, Complex s, double r_max, int n_r, int n_mu,
                                    int kmax);

// Nodes and weights of the n-point Gauss-Legendre rule on [a, b].
void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights);

} // namespace primefock
