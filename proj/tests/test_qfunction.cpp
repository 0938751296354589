#include "doctest.h"

#include "primefock/qfunction.hpp"

#include <cmath>
#include <random>

using namespace primefock;

namespace {

double defect_of(const SiteParams& p, const TruncationSpec& trunc) {
    return truncation_defect(ncs(p, trunc));
}

} // namespace

TEST_CASE("grid validation") {
    QGrid g;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
    g.times = {0.0, 0.5};
    CHECK_THROWS_AS(g.validate(), std::invalid_argument); // no points
    g.points = {{1.0, 0.0}};
    CHECK_NOTHROW(g.validate());
    g.times.push_back(std::nan(""));
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("Gauss-Legendre rule") {
    std::vector<double> x, w;
    gauss_legendre(2, 0.0, 1.0, x, w);
    double cubic = 0.0;
    for (int i = 0; i < 2; ++i) cubic += w[i] * x[i] * x[i] * x[i];
    CHECK(cubic == doctest::Approx(0.25).epsilon(1e-14)); // exact at degree 3

    gauss_legendre(32, 0.0, M_PI, x, w);
    double sine = 0.0;
    for (int i = 0; i < 32; ++i) sine += w[i] * std::sin(x[i]);
    CHECK(sine == doctest::Approx(2.0).epsilon(1e-14));

    double total = 0.0;
    for (double wi : w) total += wi;
    CHECK(total == doctest::Approx(M_PI).epsilon(1e-14));
}

TEST_CASE("exponential series with quadratic phases") {
    Complex a{0.7, -0.4};
    CHECK(std::abs(s_series(a, 0.0) - std::exp(a)) < 1e-14);
    CHECK(std::abs(s_series({0.0, 0.0}, 2.3) - Complex{1.0, 0.0}) < 1e-16);

    // At the quarter period the series folds into two exponential branches.
    Complex folded = (std::polar(1.0, M_PI / 4.0) * std::exp(a) +
                      std::polar(1.0, -M_PI / 4.0) * std::exp(-a)) /
                     std::sqrt(2.0);
    CHECK(std::abs(s_series(a, M_PI / 2.0) - folded) < 1e-14);

    // Capped form agrees once the cap is admissible, and rejects short caps
    // with the needed value.
    int need = s_required_cap(a);
    CHECK(std::abs(s_closed(a, 1.3, need) - s_series(a, 1.3)) < 1e-15);
    CHECK(std::abs(s_closed(a, 1.3, need + 25) - s_series(a, 1.3)) < 1e-15);
    CHECK_THROWS_WITH_AS(s_closed(a, 1.3, 3),
                         doctest::Contains(("need kcap >= " + std::to_string(need)).c_str()),
                         std::invalid_argument);
    CHECK(s_required_cap({0.0, 0.0}) == 1);

    // Hard limits: 400 terms, and arguments whose scale overflows.
    CHECK_THROWS_AS(s_series({300.0, 0.0}, 0.4), std::runtime_error);
    CHECK_THROWS_AS(s_series({800.0, 0.0}, 0.4), std::runtime_error);
}

TEST_CASE("single-mode Husimi values") {
    Complex a0{1.2, -0.5}, a{0.4, 0.9};
    double gap = std::exp(-std::norm(a - a0));
    CHECK(q_single(a0, a, 0.0, SingleKind::Harmonic) == doctest::Approx(gap).epsilon(1e-13));
    CHECK(q_single(a0, a, 0.0, SingleKind::Quadratic) == doctest::Approx(gap).epsilon(1e-13));
    CHECK(q_single(a0, a0, 0.0, SingleKind::Harmonic) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(q_single(a0, a0, 0.0, SingleKind::Quadratic) == doctest::Approx(1.0).epsilon(1e-13));

    // Half period of the quadratic flow: the packet reappears mirrored.
    CHECK(q_single(a0, a, M_PI, SingleKind::Quadratic) ==
          doctest::Approx(std::exp(-std::norm(a + a0))).epsilon(1e-12));

    // Quarter period: Q sees exactly the two-branch split.
    Complex arg = std::conj(a0) * a;
    Complex split = (std::polar(1.0, M_PI / 4.0) * std::exp(arg) +
                     std::polar(1.0, -M_PI / 4.0) * std::exp(-arg)) /
                    std::sqrt(2.0);
    double expected = std::exp(-std::norm(a) - std::norm(a0)) * std::norm(split);
    CHECK(q_single(a0, a, M_PI / 2.0, SingleKind::Quadratic) ==
          doctest::Approx(expected).epsilon(1e-12));

    // The harmonic center rotates clockwise.
    double t = 0.77;
    Complex center = std::polar(1.0, -t) * a0;
    CHECK(q_single(a0, center, t, SingleKind::Harmonic) == doctest::Approx(1.0).epsilon(1e-13));

    // Bounded by 1 everywhere.
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 200; ++i) {
        Complex b0{u(rng), u(rng)}, b{u(rng), u(rng)};
        double tt = u(rng);
        for (auto kind : {SingleKind::Harmonic, SingleKind::Quadratic}) {
            double q = q_single(b0, b, tt, kind);
            CHECK(q >= 0.0);
            CHECK(q <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("nonlocal Husimi values") {
    SiteParams p0;
    p0.s = {0.8, 0.3};
    p0.z[2] = {0.9, 0.2};
    p0.z[3] = {-0.5, 0.4};
    SiteParams p1 = p0;
    p1.z[2] = {0.3, -0.6};
    p1.z[3] = {0.8, 0.1};
    auto trunc = TruncationSpec::uniform({2, 3}, 20);
    double sigma = p0.sigma();

    double expected = std::exp(-(std::pow(2.0, -2.0 * sigma) * std::norm(p1.z[2] - p0.z[2]) +
                                 std::pow(3.0, -2.0 * sigma) * std::norm(p1.z[3] - p0.z[3])));
    for (auto kind : {QKind::Harmonic, QKind::LocalQuadratic, QKind::GlobalQuadratic})
        CHECK(q_ncs(p0, p1, 0.0, kind, trunc) == doctest::Approx(expected).epsilon(1e-10));

    // Harmonic at any t: same Gaussian with the reference rotated clockwise.
    double t = 1.21;
    double rotated = 0.0;
    {
        Complex c2 = std::polar(1.0, -t) * p0.z[2];
        Complex c3 = std::polar(1.0, -t) * p0.z[3];
        rotated = std::exp(-(std::pow(2.0, -2.0 * sigma) * std::norm(p1.z[2] - c2) +
                             std::pow(3.0, -2.0 * sigma) * std::norm(p1.z[3] - c3)));
    }
    CHECK(q_ncs(p0, p1, t, QKind::Harmonic, trunc) == doctest::Approx(rotated).epsilon(1e-10));

    // Vacuum reference and probe: stationary under every flow.
    SiteParams vac0, vac1;
    vac0.s = vac1.s = {0.9, 0.0};
    for (auto kind : {QKind::Harmonic, QKind::LocalQuadratic, QKind::GlobalQuadratic})
        CHECK(q_ncs(vac0, vac1, 2.7, kind, trunc) == doctest::Approx(1.0).epsilon(1e-13));

    SiteParams off = p1;
    off.s = {0.9, 0.3};
    CHECK_THROWS_AS(q_ncs(p0, off, 0.0, QKind::Harmonic, trunc), std::invalid_argument);

    // Stays inside [0, 1] at scattered parameters.
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        SiteParams q0 = p0, q1 = p1;
        q0.z[2] += Complex{u(rng), u(rng)};
        q1.z[3] += Complex{u(rng), u(rng)};
        double val = q_ncs(q0, q1, u(rng) * 3.0, QKind::GlobalQuadratic, trunc);
        CHECK(val >= 0.0);
        CHECK(val <= 1.0 + 1e-10);
    }
}

TEST_CASE("harmonic marginals stay Gaussian in each site") {
    SiteParams p0;
    p0.s = {0.85, -0.25};
    p0.z[2] = {0.7, 0.5};
    p0.z[5] = {-0.4, 0.8};
    auto trunc = TruncationSpec::uniform({2, 5}, 18);
    double sigma = p0.sigma();
    double t = 0.93;
    for (Complex w : {Complex{0.2, -0.1}, Complex{1.1, 0.6}, Complex{-0.8, 0.4}}) {
        SiteParams probe = p0;
        probe.z[2] = w;
        Complex c2 = std::polar(1.0, -t) * p0.z[2];
        Complex c5 = std::polar(1.0, -t) * p0.z[5];
        double expected = std::exp(-(std::pow(2.0, -2.0 * sigma) * std::norm(w - c2) +
                                     std::pow(5.0, -2.0 * sigma) * std::norm(p0.z[5] - c5)));
        CHECK(q_ncs(p0, probe, t, QKind::Harmonic, trunc) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("global S(t): basis sum against the closed form") {
    SiteParams p0;
    p0.s = {0.8, 0.2};
    p0.z[2] = {0.9, -0.3};
    p0.z[3] = {0.5, 0.7};
    SiteParams p1 = p0;
    p1.z[2] = {0.4, 0.6};
    p1.z[3] = {-0.7, 0.2};
    auto trunc = TruncationSpec::uniform({2, 3}, 20);

    // t = 0: both routes are the plain exponential.
    auto [d0, c0] = equivalence_global(p0, p1, 0.0, trunc);
    Complex a{0.0, 0.0};
    for (Prime q : {2, 3})
        a += std::pow(double(q), -2.0 * p0.sigma()) * std::conj(p0.z_of(q)) * p1.z_of(q);
    CHECK(std::abs(d0 - std::exp(a)) < 1e-12);
    CHECK(std::abs(c0 - std::exp(a)) < 1e-14);

    double tol = 1e-8 + 10.0 * std::max(defect_of(p0, trunc), defect_of(p1, trunc));
    for (double t : {0.4, 1.3, 2.9}) {
        auto [dirichlet, closed] = equivalence_global(p0, p1, t, trunc);
        CHECK(std::abs(dirichlet - closed) / std::abs(closed) <= tol);
    }

    // Single site: the global flow is the single-mode quadratic one.
    SiteParams s0, s1;
    s0.s = s1.s = {0.9, -0.4};
    s0.z[2] = {1.0, 0.3};
    s1.z[2] = {0.2, -0.8};
    auto one = TruncationSpec::uniform({2}, 24);
    auto [d1, c1] = equivalence_global(s0, s1, 1.7, one);
    CHECK(std::abs(d1 - c1) < 1e-12);

    // Absolute convergence: the term-magnitude sum is the exponential of the
    // magnitude sum.
    double mag_sum = 0.0;
    trunc.for_each_basis([&](const Occupation& occ) {
        double term = 1.0;
        for (const auto& e : occ.entries()) {
            Prime q = e.prime;
            double xq = std::abs(std::pow(double(q), -2.0 * p0.sigma()) *
                                 std::conj(p0.z_of(q)) * p1.z_of(q));
            term *= std::pow(xq, double(e.exponent)) / std::tgamma(double(e.exponent) + 1.0);
        }
        mag_sum += term;
    });
    double abs_a = 0.0;
    for (Prime q : {2, 3})
        abs_a += std::abs(std::pow(double(q), -2.0 * p0.sigma()) * std::conj(p0.z_of(q)) *
                          p1.z_of(q));
    CHECK(mag_sum == doctest::Approx(std::exp(abs_a)).epsilon(1e-10));
}

TEST_CASE("locally quadratic Q factorizes over sites, globally quadratic does not") {
    SiteParams p0;
    p0.s = {0.75, 0.0};
    p0.z[2] = {1.0, 0.2};
    p0.z[3] = {0.6, -0.5};
    SiteParams p1 = p0;
    p1.z[2] = {0.5, -0.3};
    p1.z[3] = {0.9, 0.4};
    auto trunc = TruncationSpec::uniform({2, 3}, 20);
    double t = 0.83;

    double tol = 1e-8 + 10.0 * std::max(defect_of(p0, trunc), defect_of(p1, trunc));
    CHECK(separability_check(p0, p1, t, QKind::LocalQuadratic, trunc) <= tol);

    // Single site: nothing to factor.
    SiteParams s0, s1;
    s0.s = s1.s = {0.8, 0.1};
    s0.z[3] = {0.9, -0.2};
    s1.z[3] = {0.4, 0.7};
    auto one = TruncationSpec::uniform({3}, 20);
    CHECK(separability_check(s0, s1, t, QKind::LocalQuadratic, one) <= 1e-10);

    // The global square couples the sites at order one.
    CHECK(separability_check(p0, p1, t, QKind::GlobalQuadratic, trunc) > 100.0 * tol);
}

TEST_CASE("single-site resolution of identity") {
    // kmax far below the reach of r_max: all matrix entries hit the identity.
    double dev = resolution_check_single_site(2, {1.0, 0.0}, 15.0, 512, 512, 12);
    CHECK(dev <= 1e-6);

    // A phase on s rotates the circle traversal and changes nothing.
    double dev_rot = resolution_check_single_site(2, {1.0, 0.5}, 15.0, 512, 512, 12);
    CHECK(dev_rot <= 1e-6);

    // kmax = 0 with a short radial window: the deficit is the lost measure
    // mass e^{-u_max}.
    double u_max = std::pow(2.0, -2.0) * 4.0 * 4.0; // = 4
    double short_dev = resolution_check_single_site(2, {1.0, 0.0}, 4.0, 64, 64, 0);
    CHECK(short_dev == doctest::Approx(std::exp(-u_max)).epsilon(1e-8));

    CHECK_THROWS_AS(resolution_check_single_site(4, {1.0, 0.0}, 10.0, 64, 64, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(resolution_check_single_site(2, {0.4, 0.0}, 10.0, 64, 64, 4),
                    std::invalid_argument);
    CHECK_THROWS_AS(resolution_check_single_site(2, {1.0, 0.0}, 10.0, 16, 64, 4),
                    std::invalid_argument);
}
