#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

namespace primefock {

using Prime = std::uint64_t;

/// Prime-exponent label of a Fock basis state.  The empty occupation is the
/// vacuum (integer label 1).  Entries are kept with strictly ascending primes
/// and exponents >= 1; exponent-0 entries are never stored.
class Occupation {
  public:
    struct Entry {
        Prime prime;
        std::uint32_t exponent;
        bool operator==(const Entry&) const = default;
    };

    Occupation() = default; // vacuum, n = 1

    // Validates and normalizes nothing: entries must already satisfy the
    // invariants (ascending primes, primality, exponents >= 1).  Throws
    // std::invalid_argument otherwise.
    static Occupation from_entries(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    bool is_vacuum() const { return entries_.empty(); }

    std::uint32_t exponent_of(Prime p) const;

    // Multiply / divide the label by one factor of p.  with_lowered returns
    // nullopt when p does not divide the label.
    Occupation with_raised(Prime p) const;
    std::optional<Occupation> with_lowered(Prime p) const;

    // log n = sum a_p log p; always finite even when n overflows 64 bits.
    double log_value() const;
    // The integer n itself, when it fits into 64 bits.
    std::optional<std::uint64_t> value() const;

    // Canonical basis order: lexicographic over exponent vectors aligned to
    // the ascending prime axis (absent prime = exponent 0).  The vacuum is
    // the minimum.  This order fixes all floating-point summation orders.
    std::strong_ordering operator<=>(const Occupation& other) const;
    bool operator==(const Occupation& other) const { return entries_ == other.entries_; }

  private:
    std::vector<Entry> entries_;
};

/// The arithmetic invariants of one basis label, all pure functions of the
/// exponent vector.
struct ArithmeticProfile {
    std::uint64_t big_omega;    // Omega(n), prime divisors with multiplicity
    std::uint64_t little_omega; // omega(n), distinct prime divisors
    std::uint64_t q_energy;     // sum of squared exponents
    std::uint64_t omega2;       // count of odd exponents
    int moebius;                // mu(n) in {-1, 0, +1}
    double c_norm;              // sqrt(prod a_p!)
};

bool is_prime(std::uint64_t n);

// All primes <= limit, ascending (sieve of Eratosthenes, cached).
std::vector<Prime> primes_up_to(std::uint64_t limit);

// Prime decomposition by trial division.  Throws std::invalid_argument on n = 0.
Occupation factorize(std::uint64_t n);

ArithmeticProfile profile(const Occupation& occ);

} // namespace primefock
