#pragma once

#include "primefock/states.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace primefock {

// Coherent-state wavefunction in the detector variable x at local-oscillator
// angle theta:
//   psi_alpha(x) = pi^{-1/4} exp(-x^2/2 + sqrt(2) e^{i theta} alpha x
//                                - (Re(e^{i theta} alpha))^2).
// The constant of integration is chosen so the |.|^2 integral is exactly 1;
// this differs from the more common -((e^{i theta} alpha)^2 + |alpha|^2)/2
// choice by a pure phase that is shared between alpha and -alpha and thus
// cancels in every density and interference formula below.
Complex psi(Complex alpha, double theta, double x);

// Site-q reduction of a nonlocal state: the same Gaussian with
// alpha = p^{-s} z.  Callers are expected to keep Re(s) > 1/2.
Complex psi_site(Complex s, Complex z, Prime p, double theta, double x);

// Splitter outputs (port A, port B) for input amplitude alpha and
// transmission eta in [0, 1]: (sqrt(eta) alpha, -sqrt(1 - eta) alpha).
std::pair<Complex, Complex> beam_split(Complex alpha, double eta);

// Number-basis amplitudes of a coherent state evolved under the quadratic
// number Hamiltonian: d_k = e^{-|beta|^2/2} beta^k e^{i k^2 t} / sqrt(k!),
// for k = 0..kmax.  Phases are reduced in extended precision so large k^2 t
// arguments stay accurate.
std::vector<Complex> kerr_coefficients(Complex beta, double t, std::uint32_t kmax);

// Orthonormal Hermite functions phi_0..phi_kmax at x, with
// phi_0 = pi^{-1/4} e^{-x^2/2} and the stable upward recurrence
// phi_k = sqrt(2/k) x phi_{k-1} - sqrt((k-1)/k) phi_{k-2}.
std::vector<double> hermite_functions(double x, std::uint32_t kmax);

// Uniform symmetric grid of n points spanning +/- (sqrt(2)|alpha| + 10);
// wide enough for every density produced here, at any evolution time.
std::vector<double> default_grid(Complex alpha, std::size_t n = 2048);

// Gauss-Legendre settings for the port-B integral; zeros mean "choose
// automatically from the port-B amplitude and cap".
struct YQuadrature {
    int n_nodes = 0;
    double reach = 0.0;
};

/// Sampled density in the port-A detector variable, together with the
/// analytic envelope split used for plotting: values = envelope_plus +
/// envelope_minus + cross_term (clamped at zero).
struct HomodyneProfile {
    std::vector<double> grid;            // ascending x samples
    std::vector<double> values;          // P(x) >= 0
    std::vector<double> envelope_plus;   // |psi_+|^2 / 2
    std::vector<double> envelope_minus;  // |psi_-|^2 / 2
    std::vector<double> cross_term;      // Re(e^{i pi/2} psi_+ psi_-^* G_B)

    Complex alpha{};                    // port-A input amplitude
    double theta = 0.0;                 // port-A detector angle
    double theta_b = 0.0;               // port-B detector angle
    std::optional<double> eta;          // absent for a bare-state density
    double t = 0.0;
    std::uint32_t kmax_a = 0;           // number cap used for port A
    std::uint32_t kmax_b = 0;           // number cap used for port B
    double port_overlap = 1.0;          // G_B = e^{-2 (1-eta) |alpha|^2}
    double integral = 0.0;              // trapezoid integral of values
    double integral_tol = 1e-6;
    double path_deviation = 0.0;        // max |quadrature - analytic| on grid

    // Ascending grid, finite nonnegative values, integral within tolerance.
    void validate() const;
};

// |psi_alpha(x)|^2 sampled on the grid; no splitter, eta left absent.  The
// grid must cover the Gaussian center +/- 8 standard deviations.
HomodyneProfile state_density(Complex alpha, double theta,
                              const std::vector<double>& grid);

// Interference density through port A after the splitter, for the equal
// superposition of the +/-alpha branches formed at a quarter period:
//   psi_out(x, y) = [e^{i pi/4} psi_+(x) psi^B_-(y)
//                    + e^{-i pi/4} psi_-(x) psi^B_+(y)] / sqrt(2),
// branches Kerr-evolved by t before splitting.  P(x) = int |psi_out|^2 dy is
// computed twice -- by Gauss-Legendre in y and by the analytic expansion
// envelope_plus + envelope_minus + Re(e^{i pi/2} psi_+ psi_-^* G_B) -- and
// the two paths must agree pointwise to 1e-10.
//
// kmax = 0 picks each port's cap from the Poisson tail rule; a nonzero
// override below that rule is rejected with the required value.
HomodyneProfile cat_port_density(Complex alpha, double eta, double theta_a,
                                 double theta_b, double t,
                                 const std::vector<double>& grid,
                                 const YQuadrature& yq = {},
                                 std::uint32_t kmax = 0);

// Splitter placed at site q of a nonlocal coherent state: identical to
// cat_port_density with alpha = q^{-s} z_q and the site's detector angle,
// with the two code paths re-checked at the tighter 1e-12.  Spectator sites
// do not enter.
HomodyneProfile ncs_port_density(const SiteParams& params, Prime q, double eta,
                                 double theta_b, double t,
                                 const std::vector<double>& grid,
                                 const YQuadrature& yq = {},
                                 std::uint32_t kmax = 0);

// Trapezoid integral of samples over an ascending grid.
double profile_integral(const std::vector<double>& grid,
                        const std::vector<double>& values);

// Trapezoid mean of x under the (normalized) sampled density.
double profile_mean(const HomodyneProfile& prof);

// Trapezoid central moment E[(x - mean)^order] of the sampled density.
double profile_central_moment(const HomodyneProfile& prof, int order);

} // namespace primefock
