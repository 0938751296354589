#include "primefock/fock.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace primefock {

namespace {

constexpr long double kTwoPi = 6.283185307179586476925286766559005768L;

void require_same_trunc(const FockVector& a, const FockVector& b, const char* what) {
    if (!(a.trunc() == b.trunc()))
        throw std::invalid_argument(std::string(what) + ": truncation specs differ");
}

} // namespace

TruncationSpec TruncationSpec::uniform(std::vector<Prime> primes, std::uint32_t kmax,
                                       double floor) {
    TruncationSpec spec;
    spec.active_primes = std::move(primes);
    spec.caps.assign(spec.active_primes.size(), kmax);
    spec.amplitude_floor = floor;
    spec.validate();
    return spec;
}

void TruncationSpec::validate() const {
    if (active_primes.empty())
        throw std::invalid_argument("TruncationSpec: active prime set must be nonempty");
    if (caps.size() != active_primes.size())
        throw std::invalid_argument("TruncationSpec: one cap per active prime required");
    for (std::size_t i = 0; i < active_primes.size(); ++i) {
        if (!is_prime(active_primes[i]))
            throw std::invalid_argument("TruncationSpec: " + std::to_string(active_primes[i]) +
                                        " is not prime");
        if (i > 0 && active_primes[i - 1] >= active_primes[i])
            throw std::invalid_argument("TruncationSpec: active primes must be strictly ascending");
    }
    if (amplitude_floor < 0.0)
        throw std::invalid_argument("TruncationSpec: amplitude floor must be >= 0");
}

std::size_t TruncationSpec::site_index(Prime p) const {
    auto it = std::lower_bound(active_primes.begin(), active_primes.end(), p);
    if (it == active_primes.end() || *it != p)
        throw std::invalid_argument("prime " + std::to_string(p) + " is not in the active set");
    return std::size_t(it - active_primes.begin());
}

bool TruncationSpec::is_active(Prime p) const {
    return std::binary_search(active_primes.begin(), active_primes.end(), p);
}

bool TruncationSpec::contains(const Occupation& occ) const {
    for (const auto& e : occ.entries()) {
        if (!is_active(e.prime)) return false;
        if (e.exponent > caps[site_index(e.prime)]) return false;
    }
    return true;
}

double TruncationSpec::basis_size() const {
    double size = 1.0;
    for (auto c : caps) size *= double(c) + 1.0;
    return size;
}

void TruncationSpec::for_each_basis(const std::function<void(const Occupation&)>& fn) const {
    // Odometer over exponent vectors, last site fastest: that is exactly the
    // lexicographic order with the smallest prime most significant.
    std::vector<std::uint32_t> expo(n_sites(), 0);
    for (;;) {
        std::vector<Occupation::Entry> entries;
        for (std::size_t i = 0; i < expo.size(); ++i)
            if (expo[i] > 0) entries.push_back({active_primes[i], expo[i]});
        fn(Occupation::from_entries(std::move(entries)));

        std::size_t i = expo.size();
        while (i > 0) {
            --i;
            if (expo[i] < caps[i]) {
                ++expo[i];
                std::fill(expo.begin() + i + 1, expo.end(), 0);
                break;
            }
            if (i == 0) return;
        }
    }
}

bool TruncationSpec::operator==(const TruncationSpec& other) const {
    return active_primes == other.active_primes && caps == other.caps &&
           amplitude_floor == other.amplitude_floor;
}

void FockVector::set_amplitude(const Occupation& occ, Complex amp) {
    if (!trunc_.contains(occ))
        throw std::invalid_argument("FockVector: occupation outside the truncated basis");
    double mod = std::abs(amp);
    if (mod == 0.0 || (trunc_.amplitude_floor > 0.0 && mod < trunc_.amplitude_floor)) {
        amps_.erase(occ);
        return;
    }
    amps_[occ] = amp;
}

FockVector basis_state(const TruncationSpec& trunc, const Occupation& occ) {
    FockVector v(trunc);
    v.set_amplitude(occ, Complex{1.0, 0.0});
    return v;
}

FockVector annihilate(Prime p, const FockVector& v) {
    v.trunc().site_index(p); // configuration check
    FockVector out(v.trunc());
    out.add_leakage(v.leakage());
    for (const auto& [occ, amp] : v.amplitudes()) {
        std::uint32_t a = occ.exponent_of(p);
        if (a == 0) continue;
        out.set_amplitude(*occ.with_lowered(p), amp * std::sqrt(double(a)));
    }
    return out;
}

FockVector create(Prime p, const FockVector& v) {
    std::size_t site = v.trunc().site_index(p);
    std::uint32_t cap = v.trunc().caps[site];
    FockVector out(v.trunc());
    out.add_leakage(v.leakage());
    for (const auto& [occ, amp] : v.amplitudes()) {
        std::uint32_t a = occ.exponent_of(p);
        if (a + 1 > cap) {
            out.add_leakage(std::norm(amp));
            continue;
        }
        out.set_amplitude(occ.with_raised(p), amp * std::sqrt(double(a) + 1.0));
    }
    return out;
}

FockVector gen_shift_down(std::uint64_t m, const FockVector& v) {
    Occupation shift = factorize(m);
    for (const auto& e : shift.entries()) v.trunc().site_index(e.prime);
    FockVector out(v.trunc());
    out.add_leakage(v.leakage());
    for (const auto& [occ, amp] : v.amplitudes()) {
        Occupation target = occ;
        bool divides = true;
        for (const auto& e : shift.entries()) {
            for (std::uint32_t k = 0; k < e.exponent && divides; ++k) {
                auto lowered = target.with_lowered(e.prime);
                if (!lowered) divides = false;
                else target = *lowered;
            }
            if (!divides) break;
        }
        if (divides) out.set_amplitude(target, amp);
    }
    return out;
}

FockVector gen_shift_up(std::uint64_t m, const FockVector& v) {
    Occupation shift = factorize(m);
    for (const auto& e : shift.entries()) v.trunc().site_index(e.prime);
    FockVector out(v.trunc());
    out.add_leakage(v.leakage());
    for (const auto& [occ, amp] : v.amplitudes()) {
        Occupation target = occ;
        bool fits = true;
        for (const auto& e : shift.entries()) {
            std::uint32_t cap = v.trunc().caps[v.trunc().site_index(e.prime)];
            if (target.exponent_of(e.prime) + e.exponent > cap) {
                fits = false;
                break;
            }
            for (std::uint32_t k = 0; k < e.exponent; ++k) target = target.with_raised(e.prime);
        }
        if (fits)
            out.set_amplitude(target, amp);
        else
            out.add_leakage(std::norm(amp));
    }
    return out;
}

Complex inner(const FockVector& u, const FockVector& v) {
    require_same_trunc(u, v, "inner");
    Complex acc{0.0, 0.0};
    auto iu = u.amplitudes().begin();
    auto iv = v.amplitudes().begin();
    // Merge walk keeps the summation in canonical basis order.
    while (iu != u.amplitudes().end() && iv != v.amplitudes().end()) {
        if (iu->first < iv->first) ++iu;
        else if (iv->first < iu->first) ++iv;
        else {
            acc += std::conj(iu->second) * iv->second;
            ++iu, ++iv;
        }
    }
    return acc;
}

double norm2(const FockVector& v) {
    double acc = 0.0;
    for (const auto& [occ, amp] : v.amplitudes()) acc += std::norm(amp);
    return acc;
}

double norm(const FockVector& v) { return std::sqrt(norm2(v)); }

std::pair<double, double> number_expectations(const FockVector& v) {
    double n2 = norm2(v);
    if (std::abs(n2 - 1.0) > 1e-10)
        throw std::invalid_argument("number_expectations: state not normalized (|norm^2 - 1| = " +
                                    std::to_string(std::abs(n2 - 1.0)) + ")");
    double n_exp = 0.0, m_exp = 0.0;
    for (const auto& [occ, amp] : v.amplitudes()) {
        auto pr = profile(occ);
        double w = std::norm(amp);
        n_exp += double(pr.big_omega) * w;
        m_exp += double(pr.little_omega) * w;
    }
    return {n_exp, m_exp};
}

Complex unit_phase(std::int64_t energy, double t) {
    long double angle = std::fmod(static_cast<long double>(energy) * static_cast<long double>(t), kTwoPi);
    return std::polar(1.0, static_cast<double>(angle));
}

Complex quarter_power(std::int64_t k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

namespace {

FockVector apply_phase_impl(const std::function<std::int64_t(const Occupation&)>& energy,
                            double t, int quarter_turns, const FockVector& v) {
    FockVector out(v.trunc());
    out.add_leakage(v.leakage());
    for (const auto& [occ, amp] : v.amplitudes()) {
        std::int64_t e = energy(occ);
        if (e < 0) throw std::invalid_argument("diagonal energies must be nonnegative integers");
        Complex phase = unit_phase(e, t);
        if (quarter_turns != 0) phase *= quarter_power((e % 4) * quarter_turns);
        out.set_amplitude(occ, amp * phase);
    }
    return out;
}

} // namespace

FockVector apply_diagonal_phase(const std::function<std::int64_t(const Occupation&)>& energy,
                                double t, const FockVector& v) {
    return apply_phase_impl(energy, t, 0, v);
}

FockVector apply_diagonal_phase_quarter(const std::function<std::int64_t(const Occupation&)>& energy,
                                        double t, int quarter_turns, const FockVector& v) {
    return apply_phase_impl(energy, t, quarter_turns, v);
}

FockVector scaled(Complex c, const FockVector& v) {
    FockVector out(v.trunc());
    out.add_leakage(std::norm(c) * v.leakage());
    for (const auto& [occ, amp] : v.amplitudes()) out.set_amplitude(occ, c * amp);
    return out;
}

FockVector sum(const FockVector& a, const FockVector& b) {
    require_same_trunc(a, b, "sum");
    FockVector out(a.trunc());
    out.add_leakage(a.leakage() + b.leakage());
    for (const auto& [occ, amp] : a.amplitudes()) out.set_amplitude(occ, amp);
    for (const auto& [occ, amp] : b.amplitudes()) out.set_amplitude(occ, out.amplitude(occ) + amp);
    return out;
}

FockVector difference(const FockVector& a, const FockVector& b) {
    return sum(a, scaled(Complex{-1.0, 0.0}, b));
}

double inf_norm_difference(const FockVector& a, const FockVector& b) {
    require_same_trunc(a, b, "inf_norm_difference");
    double best = 0.0;
    auto ia = a.amplitudes().begin();
    auto ib = b.amplitudes().begin();
    while (ia != a.amplitudes().end() || ib != b.amplitudes().end()) {
        double d;
        if (ib == b.amplitudes().end() || (ia != a.amplitudes().end() && ia->first < ib->first)) {
            d = std::abs(ia->second);
            ++ia;
        } else if (ia == a.amplitudes().end() || ib->first < ia->first) {
            d = std::abs(ib->second);
            ++ib;
        } else {
            d = std::abs(ia->second - ib->second);
            ++ia, ++ib;
        }
        best = std::max(best, d);
    }
    return best;
}

} // namespace primefock
