#include "doctest.h"

#include "primefock/fock.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace primefock;

namespace {

Occupation occ(std::uint64_t n) { return factorize(n); }

FockVector unit(const TruncationSpec& trunc, std::uint64_t n) {
    return basis_state(trunc, occ(n));
}

// Entrywise comparison over the union of supports.
bool close(const FockVector& a, const FockVector& b, double tol = 1e-12) {
    return inf_norm_difference(a, b) <= tol;
}

FockVector random_vector(const TruncationSpec& trunc, std::mt19937& rng) {
    std::normal_distribution<double> g;
    FockVector v(trunc);
    trunc.for_each_basis([&](const Occupation& o) { v.set_amplitude(o, {g(rng), g(rng)}); });
    return v;
}

} // namespace

TEST_CASE("truncation spec validation") {
    CHECK_THROWS_AS(TruncationSpec::uniform({}, 2), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSpec::uniform({4}, 2), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSpec::uniform({3, 2}, 2), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSpec::uniform({2, 2}, 2), std::invalid_argument);
    CHECK_THROWS_AS(TruncationSpec::uniform({2}, 2, -0.5), std::invalid_argument);

    TruncationSpec bad;
    bad.active_primes = {2, 3};
    bad.caps = {1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    auto spec = TruncationSpec::uniform({2, 3, 5}, 4);
    CHECK(spec.n_sites() == 3);
    CHECK(spec.site_index(3) == 1);
    CHECK_THROWS_AS(spec.site_index(7), std::invalid_argument);
    CHECK(spec.is_active(5));
    CHECK(!spec.is_active(11));
    CHECK(spec.cap_of(2) == 4);
}

TEST_CASE("basis membership and size") {
    auto spec = TruncationSpec::uniform({2, 3}, 2);
    CHECK(spec.basis_size() == doctest::Approx(9.0));
    CHECK(spec.contains(occ(1)));
    CHECK(spec.contains(occ(12)));  // 2^2 * 3
    CHECK(spec.contains(occ(36)));  // 2^2 * 3^2
    CHECK(!spec.contains(occ(8)));  // 2^3 over the cap
    CHECK(!spec.contains(occ(5)));  // inactive site
}

TEST_CASE("basis enumeration follows canonical order") {
    auto spec = TruncationSpec::uniform({2, 3}, 2);
    std::vector<std::uint64_t> seen;
    spec.for_each_basis([&](const Occupation& o) { seen.push_back(*o.value()); });
    // Exponent vectors in lexicographic order, smallest prime most significant.
    std::vector<std::uint64_t> expected = {1, 3, 9, 2, 6, 18, 4, 12, 36};
    CHECK(seen == expected);

    // Enumerated occupations must themselves be strictly increasing in the
    // basis order used by the sparse map.
    std::vector<Occupation> occs;
    spec.for_each_basis([&](const Occupation& o) { occs.push_back(o); });
    for (std::size_t i = 1; i < occs.size(); ++i) CHECK(occs[i - 1] < occs[i]);
}

TEST_CASE("ladder operator matrix elements") {
    auto spec = TruncationSpec::uniform({2, 3}, 4);

    // a_2 |12> = sqrt(2) |6>, a_3 |12> = |4>
    auto v = annihilate(2, unit(spec, 12));
    CHECK(std::abs(v.amplitude(occ(6)) - Complex{std::sqrt(2.0), 0.0}) < 1e-15);
    CHECK(v.amplitudes().size() == 1);
    auto w = annihilate(3, unit(spec, 12));
    CHECK(std::abs(w.amplitude(occ(4)) - Complex{1.0, 0.0}) < 1e-15);

    // a_2^dag |12> = sqrt(3) |24>
    auto u = create(2, unit(spec, 12));
    CHECK(std::abs(u.amplitude(occ(24)) - Complex{std::sqrt(3.0), 0.0}) < 1e-15);
    CHECK(u.leakage() == 0.0);

    // a_2 kills states with no factor 2
    CHECK(annihilate(2, unit(spec, 9)).amplitudes().empty());
    CHECK(annihilate(2, unit(spec, 1)).amplitudes().empty());

    CHECK_THROWS_AS(annihilate(7, unit(spec, 12)), std::invalid_argument);
    CHECK_THROWS_AS(create(7, unit(spec, 12)), std::invalid_argument);
}

TEST_CASE("raising past the cap leaks the full weight") {
    auto spec = TruncationSpec::uniform({2}, 2);
    auto at_cap = unit(spec, 4); // 2^2 sits exactly at the cap
    auto pushed = create(2, at_cap);
    CHECK(pushed.amplitudes().empty());
    CHECK(pushed.leakage() == doctest::Approx(1.0));

    // Mixed case: only the component at the cap leaks.
    FockVector mix(spec);
    mix.set_amplitude(occ(1), {0.6, 0.0});
    mix.set_amplitude(occ(4), {0.0, 0.8});
    auto out = create(2, mix);
    CHECK(out.leakage() == doctest::Approx(0.64));
    CHECK(std::abs(out.amplitude(occ(2)) - Complex{0.6, 0.0}) < 1e-15);
}

TEST_CASE("canonical commutation relations on the cap interior") {
    auto spec = TruncationSpec::uniform({2, 3, 5}, 4);
    std::vector<Prime> ps = {2, 3, 5};
    for (Prime p : ps) {
        for (Prime q : ps) {
            spec.for_each_basis([&](const Occupation& o) {
                // Stay one step below every cap so the raised states never leak.
                for (const auto& e : o.entries())
                    if (e.exponent >= 4) return;
                auto x = basis_state(spec, o);
                auto lhs = annihilate(p, create(q, x));
                auto rhs = create(q, annihilate(p, x));
                auto comm = difference(lhs, rhs);
                auto expect = (p == q) ? x : FockVector(spec);
                CHECK(inf_norm_difference(comm, expect) <= 1e-12);
            });
        }
    }
}

TEST_CASE("generalized shifts act without square roots") {
    auto spec = TruncationSpec::uniform({2, 3}, 4);
    // b_6 |12> = |2>, b_6^dag |2> = |12>
    auto down = gen_shift_down(6, unit(spec, 12));
    CHECK(std::abs(down.amplitude(occ(2)) - Complex{1.0, 0.0}) < 1e-15);
    CHECK(down.amplitudes().size() == 1);
    auto up = gen_shift_up(6, unit(spec, 2));
    CHECK(std::abs(up.amplitude(occ(12)) - Complex{1.0, 0.0}) < 1e-15);

    // 6 does not divide 9, so b_6 |9> vanishes with no leakage.
    auto dead = gen_shift_down(6, unit(spec, 9));
    CHECK(dead.amplitudes().empty());
    CHECK(dead.leakage() == 0.0);

    // b_1 is the identity.
    CHECK(close(gen_shift_down(1, unit(spec, 12)), unit(spec, 12)));
    CHECK(close(gen_shift_up(1, unit(spec, 12)), unit(spec, 12)));

    // Shifts whose prime support leaves the active set are rejected.
    CHECK_THROWS_AS(gen_shift_up(10, unit(spec, 1)), std::invalid_argument);
    CHECK_THROWS_AS(gen_shift_down(7, unit(spec, 1)), std::invalid_argument);
    CHECK_THROWS_AS(gen_shift_down(0, unit(spec, 1)), std::invalid_argument);

    // Raising past the cap leaks: 2^4 at the cap, shift by 4 = 2^2.
    auto leak = gen_shift_up(4, unit(spec, 16));
    CHECK(leak.amplitudes().empty());
    CHECK(leak.leakage() == doctest::Approx(1.0));
}

TEST_CASE("generalized commutator projects onto p-free states") {
    auto spec = TruncationSpec::uniform({2, 3, 5}, 3);
    std::vector<Prime> ps = {2, 3, 5};
    for (Prime p : ps) {
        for (Prime q : ps) {
            spec.for_each_basis([&](const Occupation& o) {
                for (const auto& e : o.entries())
                    if (e.exponent >= 3) return;
                auto x = basis_state(spec, o);
                auto comm = difference(gen_shift_down(p, gen_shift_up(q, x)),
                                       gen_shift_up(q, gen_shift_down(p, x)));
                FockVector expect(spec);
                if (p == q && o.exponent_of(p) == 0) expect = x;
                CHECK(inf_norm_difference(comm, expect) <= 1e-12);
            });
        }
    }
}

TEST_CASE("generalized shifts never grow the norm") {
    auto spec = TruncationSpec::uniform({2, 3, 5}, 3);
    std::mt19937 rng(7);
    auto v = random_vector(spec, rng);
    double n = norm(v);
    for (std::uint64_t m : {2, 6, 30, 12, 9}) {
        CHECK(norm(gen_shift_down(m, v)) <= n + 1e-12);
        CHECK(norm(gen_shift_up(m, v)) <= n + 1e-12);
    }
}

TEST_CASE("inner product is sesquilinear and Hermitian") {
    auto spec = TruncationSpec::uniform({2, 3}, 3);
    std::mt19937 rng(11);
    auto u = random_vector(spec, rng);
    auto v = random_vector(spec, rng);
    Complex c{0.3, -1.2};

    CHECK(std::abs(inner(u, scaled(c, v)) - c * inner(u, v)) < 1e-12);
    CHECK(std::abs(inner(scaled(c, u), v) - std::conj(c) * inner(u, v)) < 1e-12);
    CHECK(std::abs(inner(u, v) - std::conj(inner(v, u))) < 1e-14);
    CHECK(inner(u, u).real() == doctest::Approx(norm2(u)));
    CHECK(std::abs(inner(u, u).imag()) < 1e-14);

    auto other = TruncationSpec::uniform({2, 3}, 4);
    CHECK_THROWS_AS(inner(u, FockVector(other)), std::invalid_argument);
    CHECK_THROWS_AS(sum(u, FockVector(other)), std::invalid_argument);
}

TEST_CASE("adjointness of create and annihilate") {
    auto spec = TruncationSpec::uniform({2, 3}, 6);
    std::mt19937 rng(13);
    FockVector u(spec), v(spec);
    // Keep a buffer below the cap so create() does not leak.
    std::normal_distribution<double> g;
    spec.for_each_basis([&](const Occupation& o) {
        for (const auto& e : o.entries())
            if (e.exponent >= 5) return;
        u.set_amplitude(o, {g(rng), g(rng)});
        v.set_amplitude(o, {g(rng), g(rng)});
    });
    for (Prime p : {2, 3}) {
        CHECK(std::abs(inner(u, create(p, v)) - inner(annihilate(p, u), v)) < 1e-10);
        CHECK(std::abs(inner(u, gen_shift_up(p, v)) - inner(gen_shift_down(p, u), v)) < 1e-10);
    }
}

TEST_CASE("number expectations on a two-term superposition") {
    auto spec = TruncationSpec::uniform({2, 3}, 3);
    FockVector v(spec);
    double r = 1.0 / std::sqrt(2.0);
    v.set_amplitude(occ(2), {r, 0.0});
    v.set_amplitude(occ(6), {0.0, r});
    auto [n_tot, n_distinct] = number_expectations(v);
    CHECK(n_tot == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(n_distinct == doctest::Approx(1.5).epsilon(1e-12));

    FockVector unnormalized(spec);
    unnormalized.set_amplitude(occ(2), {0.5, 0.0});
    CHECK_THROWS_AS(number_expectations(unnormalized), std::invalid_argument);
}

TEST_CASE("diagonal phase basics") {
    auto spec = TruncationSpec::uniform({2, 3}, 3);
    std::mt19937 rng(17);
    auto v = random_vector(spec, rng);
    auto energy = [](const Occupation& o) { return std::int64_t(profile(o).q_energy); };

    CHECK(close(apply_diagonal_phase(energy, 0.0, v), v, 1e-15));
    // Integer spectrum makes the flow 2pi periodic.
    CHECK(close(apply_diagonal_phase(energy, 2.0 * M_PI, v), v, 1e-12));
    // Unitarity of the diagonal flow.
    CHECK(norm2(apply_diagonal_phase(energy, 0.8371, v)) == doctest::Approx(norm2(v)).epsilon(1e-12));
    // Group law.
    auto one_shot = apply_diagonal_phase(energy, 1.1, v);
    auto two_step = apply_diagonal_phase(energy, 0.4, apply_diagonal_phase(energy, 0.7, v));
    CHECK(close(one_shot, two_step, 1e-12));

    auto negative = [](const Occupation&) { return std::int64_t(-1); };
    CHECK_THROWS_AS(apply_diagonal_phase(negative, 1.0, v), std::invalid_argument);
}

TEST_CASE("quarter-turn phase splitting stays exact for large spectra") {
    auto spec = TruncationSpec::uniform({2}, 200);
    FockVector v(spec);
    // 2^157: quadratic energy 157^2 = 24649, large enough that naively
    // rounding t + pi/2 would cost ~4e-12 of phase.
    std::vector<Occupation::Entry> entries = {{2, 157}};
    auto big = Occupation::from_entries(std::move(entries));
    v.set_amplitude(big, {1.0, 0.0});
    auto energy = [](const Occupation& o) { return std::int64_t(profile(o).q_energy); };

    double t = 0.3;
    auto split = apply_diagonal_phase_quarter(energy, t, 1, v);
    // Reference: e^{i E t} * i^(E mod 4), assembled from exact pieces.
    Complex ref = unit_phase(24649, t) * quarter_power(24649);
    CHECK(std::abs(split.amplitude(big) - ref) < 1e-15);

    // Four quarter turns advance the angle by 2 pi exactly.
    auto full = apply_diagonal_phase_quarter(energy, t, 4, v);
    auto plain = apply_diagonal_phase(energy, t, v);
    CHECK(close(full, plain, 1e-15));

    // Composition of quarter turns.
    auto a = apply_diagonal_phase_quarter(energy, t, 2, v);
    auto b = apply_diagonal_phase_quarter(energy, 0.0, 1,
             apply_diagonal_phase_quarter(energy, t, 1, v));
    CHECK(close(a, b, 1e-15));
}

TEST_CASE("quarter powers") {
    CHECK(quarter_power(0) == Complex{1.0, 0.0});
    CHECK(quarter_power(1) == Complex{0.0, 1.0});
    CHECK(quarter_power(2) == Complex{-1.0, 0.0});
    CHECK(quarter_power(3) == Complex{0.0, -1.0});
    CHECK(quarter_power(4) == Complex{1.0, 0.0});
    CHECK(quarter_power(-1) == Complex{0.0, -1.0});
    CHECK(quarter_power(-6) == Complex{-1.0, 0.0});
}

TEST_CASE("ladder operators respect the total-exponent grading") {
    auto spec = TruncationSpec::uniform({2, 3, 5}, 3);
    std::mt19937 rng(23);
    auto v = random_vector(spec, rng);
    // Project v onto the Omega = 2 sector, then check images live in 1 resp. 3.
    FockVector sector(spec);
    for (const auto& [o, amp] : v.amplitudes())
        if (profile(o).big_omega == 2) sector.set_amplitude(o, amp);
    auto lowered = annihilate(3, sector);
    for (const auto& [o, amp] : lowered.amplitudes()) CHECK(profile(o).big_omega == 1);
    auto raised = create(5, sector);
    for (const auto& [o, amp] : raised.amplitudes()) CHECK(profile(o).big_omega == 3);
    auto shifted = gen_shift_up(6, sector);
    for (const auto& [o, amp] : shifted.amplitudes()) CHECK(profile(o).big_omega == 4);
}

TEST_CASE("amplitude floor prunes small entries") {
    auto spec = TruncationSpec::uniform({2}, 3, 0.1);
    FockVector v(spec);
    v.set_amplitude(occ(2), {0.5, 0.0});
    v.set_amplitude(occ(4), {0.01, 0.0}); // below the floor, dropped
    CHECK(v.amplitudes().size() == 1);
    CHECK(v.amplitude(occ(4)) == Complex{0.0, 0.0});

    // Setting an amplitude to zero erases the entry.
    FockVector w(TruncationSpec::uniform({2}, 3));
    w.set_amplitude(occ(2), {1.0, 0.0});
    w.set_amplitude(occ(2), {0.0, 0.0});
    CHECK(w.amplitudes().empty());

    CHECK_THROWS_AS(w.set_amplitude(occ(32), {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("linear combinations and leakage bookkeeping") {
    auto spec = TruncationSpec::uniform({2}, 1);
    FockVector a(spec), b(spec);
    a.set_amplitude(occ(1), {1.0, 0.0});
    a.add_leakage(0.25);
    b.set_amplitude(occ(2), {0.0, 2.0});
    b.add_leakage(0.5);

    auto s = sum(a, b);
    CHECK(s.leakage() == doctest::Approx(0.75));
    CHECK(std::abs(s.amplitude(occ(1)) - Complex{1.0, 0.0}) < 1e-15);
    CHECK(std::abs(s.amplitude(occ(2)) - Complex{0.0, 2.0}) < 1e-15);

    auto half = scaled({0.5, 0.0}, a);
    CHECK(half.leakage() == doctest::Approx(0.0625));

    auto d = difference(a, a);
    CHECK(d.amplitudes().empty());

    CHECK(inf_norm_difference(a, b) == doctest::Approx(2.0));
}
