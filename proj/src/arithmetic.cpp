#include "primefock/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <string>

namespace primefock {

namespace {

// Shared prime table, grown on demand and immutable between growths.
std::mutex table_mutex;
std::vector<Prime> prime_table;
std::uint64_t table_limit = 0;

std::vector<Prime> sieve(std::uint64_t limit) {
    std::vector<Prime> out;
    if (limit < 2) return out;
    std::vector<bool> composite(limit + 1, false);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
    }
    return out;
}

// Snapshot of the cached table covering at least [2, limit].
std::vector<Prime> primes_covering(std::uint64_t limit) {
    std::lock_guard<std::mutex> lock(table_mutex);
    if (limit > table_limit) {
        std::uint64_t grow = std::max<std::uint64_t>(limit, std::max<std::uint64_t>(2 * table_limit, 1024));
        prime_table = sieve(grow);
        table_limit = grow;
    }
    return prime_table;
}

} // namespace

Occupation Occupation::from_entries(std::vector<Entry> entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].exponent == 0)
            throw std::invalid_argument("Occupation: exponent-0 entries are not stored");
        if (!is_prime(entries[i].prime))
            throw std::invalid_argument("Occupation: " + std::to_string(entries[i].prime) + " is not prime");
        if (i > 0 && entries[i - 1].prime >= entries[i].prime)
            throw std::invalid_argument("Occupation: primes must be strictly ascending");
    }
    Occupation occ;
    occ.entries_ = std::move(entries);
    return occ;
}

std::uint32_t Occupation::exponent_of(Prime p) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), p,
                               [](const Entry& e, Prime q) { return e.prime < q; });
    return (it != entries_.end() && it->prime == p) ? it->exponent : 0;
}

Occupation Occupation::with_raised(Prime p) const {
    Occupation out(*this);
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), p,
                               [](const Entry& e, Prime q) { return e.prime < q; });
    if (it != out.entries_.end() && it->prime == p)
        ++it->exponent;
    else
        out.entries_.insert(it, Entry{p, 1});
    return out;
}

std::optional<Occupation> Occupation::with_lowered(Prime p) const {
    Occupation out(*this);
    auto it = std::lower_bound(out.entries_.begin(), out.entries_.end(), p,
                               [](const Entry& e, Prime q) { return e.prime < q; });
    if (it == out.entries_.end() || it->prime != p) return std::nullopt;
    if (it->exponent == 1)
        out.entries_.erase(it);
    else
        --it->exponent;
    return out;
}

double Occupation::log_value() const {
    double acc = 0.0;
    for (const Entry& e : entries_) acc += double(e.exponent) * std::log(double(e.prime));
    return acc;
}

std::optional<std::uint64_t> Occupation::value() const {
    std::uint64_t n = 1;
    for (const Entry& e : entries_) {
        for (std::uint32_t k = 0; k < e.exponent; ++k) {
            if (n > UINT64_MAX / e.prime) return std::nullopt;
            n *= e.prime;
        }
    }
    return n;
}

std::strong_ordering Occupation::operator<=>(const Occupation& other) const {
    // Merge-walk both entry lists in ascending prime order; an absent prime
    // compares as exponent 0.
    std::size_t i = 0, j = 0;
    while (i < entries_.size() || j < other.entries_.size()) {
        Prime pa = i < entries_.size() ? entries_[i].prime : UINT64_MAX;
        Prime pb = j < other.entries_.size() ? other.entries_[j].prime : UINT64_MAX;
        if (pa < pb) return std::strong_ordering::greater; // we have a_p > 0, other has 0
        if (pb < pa) return std::strong_ordering::less;
        if (auto c = entries_[i].exponent <=> other.entries_[j].exponent; c != 0) return c;
        ++i, ++j;
    }
    return std::strong_ordering::equal;
}

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    if (n < 4) return true;
    if (n % 2 == 0) return false;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

std::vector<Prime> primes_up_to(std::uint64_t limit) {
    std::vector<Prime> all = primes_covering(limit);
    auto it = std::upper_bound(all.begin(), all.end(), limit);
    all.erase(it, all.end());
    return all;
}

Occupation factorize(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("factorize: 0 has no prime decomposition");
    std::vector<Occupation::Entry> entries;
    std::uint64_t rest = n;
    // Trial division against the cached table; desk-scale inputs only.
    std::uint64_t root = std::uint64_t(std::sqrt(double(n))) + 2;
    for (Prime p : primes_covering(root)) {
        if (p * p > rest) break;
        if (rest % p != 0) continue;
        std::uint32_t a = 0;
        while (rest % p == 0) rest /= p, ++a;
        entries.push_back({p, a});
    }
    if (rest > 1) entries.push_back({rest, 1});
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.prime < b.prime; });
    return Occupation::from_entries(std::move(entries));
}

ArithmeticProfile profile(const Occupation& occ) {
    ArithmeticProfile out{0, 0, 0, 0, 1, 1.0};
    double log_c2 = 0.0;
    bool squarefree = true;
    for (const auto& e : occ.entries()) {
        out.big_omega += e.exponent;
        out.little_omega += 1;
        out.q_energy += std::uint64_t(e.exponent) * e.exponent;
        if (e.exponent % 2 == 1) out.omega2 += 1;
        if (e.exponent >= 2) squarefree = false;
        log_c2 += std::lgamma(double(e.exponent) + 1.0);
    }
    out.moebius = squarefree ? (out.little_omega % 2 == 0 ? 1 : -1) : 0;
    out.c_norm = std::exp(0.5 * log_c2);
    return out;
}

} // namespace primefock
