#pragma once

#include "primefock/arithmetic.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>

namespace primefock {

using Complex = std::complex<double>;

/// Finite truncation of the Fock space: active sites, a per-site occupation
/// cap and an optional amplitude floor.  The induced basis is the full grid
/// of exponent vectors 0 <= a_p <= kmax_p over the active primes, ordered
/// lexicographically (ascending prime axis).
struct TruncationSpec {
    std::vector<Prime> active_primes; // ascending, distinct, nonempty
    std::vector<std::uint32_t> caps;  // per-site kmax, same length as active_primes
    double amplitude_floor = 0.0;     // drop |amp| < floor; 0 disables

    static TruncationSpec uniform(std::vector<Prime> primes, std::uint32_t kmax,
                                  double floor = 0.0);

    void validate() const; // throws std::invalid_argument on malformed specs

    std::size_t n_sites() const { return active_primes.size(); }
    // Index of p among the active primes; throws if p is inactive.
    std::size_t site_index(Prime p) const;
    bool is_active(Prime p) const;
    std::uint32_t cap_of(Prime p) const { return caps[site_index(p)]; }

    bool contains(const Occupation& occ) const;
    double basis_size() const; // prod (kmax_p + 1), as a double (may be large)

    // Visit every basis occupation in canonical order.
    void for_each_basis(const std::function<void(const Occupation&)>& fn) const;

    bool operator==(const TruncationSpec& other) const;
};

/// Sparse state vector over the truncated basis.  Amplitudes are stored in
/// canonical basis order so every reduction over entries is reproducible.
/// Vectors are value types and treated as immutable once an operation has
/// returned them; `leakage` accumulates the squared modulus of amplitudes a
/// raising operator pushed past the cap.
class FockVector {
  public:
    using Amplitudes = std::map<Occupation, Complex>;

    explicit FockVector(TruncationSpec trunc) : trunc_(std::move(trunc)) {
        trunc_.validate();
    }

    const TruncationSpec& trunc() const { return trunc_; }
    const Amplitudes& amplitudes() const { return amps_; }
    double leakage() const { return leakage_; }

    Complex amplitude(const Occupation& occ) const {
        auto it = amps_.find(occ);
        return it == amps_.end() ? Complex{0.0, 0.0} : it->second;
    }

    // Mutators used while assembling a vector; out-of-basis targets throw.
    void set_amplitude(const Occupation& occ, Complex amp);
    void add_leakage(double squared_modulus) { leakage_ += squared_modulus; }

  private:
    TruncationSpec trunc_;
    Amplitudes amps_;
    double leakage_ = 0.0;
};

// Unit basis vector |occ>.
FockVector basis_state(const TruncationSpec& trunc, const Occupation& occ);

// Bosonic ladder operators a_p, a_p^dagger.
FockVector annihilate(Prime p, const FockVector& v);
FockVector create(Prime p, const FockVector& v);

// Generalized (root-free) shifts b_m, b_m^dagger for any m > 0 whose prime
// factors are active; m = 1 is the identity.
FockVector gen_shift_down(std::uint64_t m, const FockVector& v);
FockVector gen_shift_up(std::uint64_t m, const FockVector& v);

// <u|v>, conjugate-linear in u.  Truncations must match.
Complex inner(const FockVector& u, const FockVector& v);

double norm2(const FockVector& v); // squared l2 norm
double norm(const FockVector& v);

// (<N>, <M>) = (sum Omega(n)|x_n|^2, sum omega(n)|x_n|^2); requires v
// normalized to 1e-10 in squared norm.
std::pair<double, double> number_expectations(const FockVector& v);

// Multiply every amplitude by exp(i * energy(occ) * t).  The angle is formed
// in extended precision and reduced mod 2pi before sin/cos so that large
// integer spectra do not erode the phase.
FockVector apply_diagonal_phase(const std::function<std::int64_t(const Occupation&)>& energy,
                                double t, const FockVector& v);

// As above but with an extra exact quarter turn per energy quantum:
// amplitude *= exp(i E t) * i^(E * quarter_turns mod 4).  This evaluates
// exp(i E (t + quarter_turns * pi/2)) without ever rounding t + pi/2.
FockVector apply_diagonal_phase_quarter(const std::function<std::int64_t(const Occupation&)>& energy,
                                        double t, int quarter_turns, const FockVector& v);

// exp(i * energy * t) with the extended-precision angle reduction.
Complex unit_phase(std::int64_t energy, double t);

// i^(k mod 4)
Complex quarter_power(std::int64_t k);

// Linear combinations (matching truncations required; leakage adds).
FockVector scaled(Complex c, const FockVector& v);
FockVector sum(const FockVector& a, const FockVector& b);
FockVector difference(const FockVector& a, const FockVector& b);

// max |a_n - b_n| over the union of supports.
double inf_norm_difference(const FockVector& a, const FockVector& b);

} // namespace primefock
