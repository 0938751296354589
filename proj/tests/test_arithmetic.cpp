#include "doctest.h"
#include "primefock/arithmetic.hpp"

#include <cmath>
#include <complex>
#include <numeric>
#include <random>

using namespace primefock;

TEST_CASE("primes_up_to basic tables") {
    CHECK(primes_up_to(1).empty());
    CHECK(primes_up_to(10) == std::vector<Prime>{2, 3, 5, 7});
    CHECK(primes_up_to(30) == std::vector<Prime>{2, 3, 5, 7, 11, 13, 17, 19, 23, 29});
    CHECK(primes_up_to(0).empty());
    CHECK(primes_up_to(2) == std::vector<Prime>{2});
}

TEST_CASE("factorize known labels") {
    CHECK(factorize(1).is_vacuum());
    auto f12 = factorize(12);
    REQUIRE(f12.entries().size() == 2);
    CHECK(f12.entries()[0].prime == 2);
    CHECK(f12.entries()[0].exponent == 2);
    CHECK(f12.entries()[1].prime == 3);
    CHECK(f12.entries()[1].exponent == 1);
    auto f30 = factorize(30);
    REQUIRE(f30.entries().size() == 3);
    CHECK(f30.entries()[2].prime == 5);
    CHECK_THROWS_AS(factorize(0), std::invalid_argument);
}

TEST_CASE("profile on vacuum, 12, 30") {
    auto p1 = profile(Occupation{});
    CHECK(p1.big_omega == 0);
    CHECK(p1.little_omega == 0);
    CHECK(p1.q_energy == 0);
    CHECK(p1.omega2 == 0);
    CHECK(p1.moebius == 1);
    CHECK(p1.c_norm == 1.0);

    auto p12 = profile(factorize(12));
    CHECK(p12.big_omega == 3);
    CHECK(p12.little_omega == 2);
    CHECK(p12.q_energy == 5);
    CHECK(p12.omega2 == 1);
    CHECK(p12.moebius == 0);
    CHECK(p12.c_norm == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    auto p30 = profile(factorize(30));
    CHECK(p30.big_omega == 3);
    CHECK(p30.little_omega == 3);
    CHECK(p30.q_energy == 3);
    CHECK(p30.omega2 == 3);
    CHECK(p30.moebius == -1);
    CHECK(p30.c_norm == 1.0);
}

TEST_CASE("occupation invariants and ordering") {
    CHECK_THROWS_AS(Occupation::from_entries({{4, 1}}), std::invalid_argument);
    CHECK_THROWS_AS(Occupation::from_entries({{2, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Occupation::from_entries({{3, 1}, {2, 1}}), std::invalid_argument);

    // Canonical order is lexicographic over exponent vectors on the ascending
    // prime axis: vacuum first, then everything supported deeper at prime 2.
    Occupation one;
    auto two = factorize(2), three = factorize(3), four = factorize(4), six = factorize(6);
    CHECK(one < three);
    CHECK(three < two);  // (0,1) before (1,0)
    CHECK(two < six);    // (1,0) before (1,1)
    CHECK(six < four);   // (1,1) before (2,0)
    CHECK(two.with_raised(2) == four);
    CHECK(six.with_lowered(3).value() == two);
    CHECK(!two.with_lowered(5).has_value());
}

TEST_CASE("round trip: product of factorization recovers n up to 1e6") {
    for (std::uint64_t n = 1; n <= 1000000; ++n) {
        auto v = factorize(n).value();
        REQUIRE(v.has_value());
        if (*v != n) { REQUIRE(*v == n); }
    }
}

TEST_CASE("additivity on coprime pairs up to 1e3") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<std::uint64_t> dist(1, 1000);
    int checked = 0;
    while (checked < 2000) {
        std::uint64_t m = dist(rng), n = dist(rng);
        if (std::gcd(m, n) != 1) continue;
        ++checked;
        auto pm = profile(factorize(m));
        auto pn = profile(factorize(n));
        auto pmn = profile(factorize(m * n));
        CHECK(pmn.big_omega == pm.big_omega + pn.big_omega);
        CHECK(pmn.little_omega == pm.little_omega + pn.little_omega);
        CHECK(pmn.q_energy == pm.q_energy + pn.q_energy);
        CHECK(pmn.moebius == pm.moebius * pn.moebius);
        CHECK(pmn.c_norm == doctest::Approx(pm.c_norm * pn.c_norm).epsilon(1e-12));
    }
}

TEST_CASE("phase law: exp(i Q(n) pi/2) = i^omega2(n) for Omega <= 40") {
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> nsites(0, 5), expo(1, 12);
    auto primes = primes_up_to(40);
    std::uniform_int_distribution<std::size_t> pick(0, primes.size() - 1);
    const std::complex<double> iunit(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<Occupation::Entry> entries;
        std::vector<bool> used(primes.size(), false);
        int m = nsites(rng);
        std::uint64_t omega_total = 0;
        for (int k = 0; k < m; ++k) {
            std::size_t idx = pick(rng);
            if (used[idx]) continue;
            used[idx] = true;
            std::uint32_t a = std::uint32_t(expo(rng));
            if (omega_total + a > 40) break;
            omega_total += a;
            entries.push_back({primes[idx], a});
        }
        std::sort(entries.begin(), entries.end(),
                  [](const auto& a, const auto& b) { return a.prime < b.prime; });
        auto occ = Occupation::from_entries(entries);
        auto pr = profile(occ);
        std::complex<double> lhs = std::polar(1.0, double(pr.q_energy) * M_PI / 2.0);
        std::complex<double> rhs = std::pow(iunit, double(pr.omega2 % 4));
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("profile invariant relations") {
    for (std::uint64_t n = 1; n <= 5000; ++n) {
        auto pr = profile(factorize(n));
        CHECK(pr.little_omega <= pr.big_omega);
        CHECK(pr.omega2 <= pr.little_omega);
        CHECK(pr.q_energy >= pr.big_omega);
        if (pr.q_energy == pr.big_omega) CHECK(pr.moebius != 0);
        if (pr.moebius != 0) CHECK(pr.c_norm == 1.0);
    }
}
