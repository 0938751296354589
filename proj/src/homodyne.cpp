#include "primefock/homodyne.hpp"

#include "primefock/qfunction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace primefock {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kPiQuarterInv = 0.75112554446494248286; // pi^{-1/4}
constexpr long double kTwoPiL = 6.283185307179586476925286766559005768L;
constexpr double kSigmaX = 0.70710678118654752440; // quadrature width 1/sqrt(2)
constexpr double kReachSigmas = 8.0;

// e^{i angle} with the angle reduced in extended precision first.
Complex unit_dir(long double angle) {
    double a = static_cast<double>(std::fmod(angle, kTwoPiL));
    return {std::cos(a), std::sin(a)};
}

void check_grid_shape(const std::vector<double>& grid, const char* what) {
    if (grid.size() < 2)
        throw std::invalid_argument(std::string(what) + ": grid needs at least 2 points");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i]))
            throw std::invalid_argument(std::string(what) + ": nonfinite grid point");
        if (i > 0 && !(grid[i - 1] < grid[i]))
            throw std::invalid_argument(std::string(what) +
                                        ": grid must be strictly ascending");
    }
}

void require_reach(const std::vector<double>& grid, double lo, double hi,
                   const char* what) {
    if (grid.front() > lo || grid.back() < hi)
        throw std::invalid_argument(
            std::string(what) + ": grid [" + std::to_string(grid.front()) + ", " +
            std::to_string(grid.back()) + "] must cover [" + std::to_string(lo) +
            ", " + std::to_string(hi) +
            "] (centers +/- 8 quadrature widths); widen it, e.g. via default_grid");
}

// Port wavefunction at x: sum_k d_k e^{i k theta} phi_k(x).  The detector
// phases are folded into the coefficient array up front by the caller.
Complex port_wave(const std::vector<Complex>& coeff, const std::vector<double>& phi) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < coeff.size(); ++k) acc += coeff[k] * phi[k];
    return acc;
}

std::vector<Complex> with_detector_phase(std::vector<Complex> coeff, double theta) {
    for (std::size_t k = 0; k < coeff.size(); ++k)
        coeff[k] *= unit_dir(static_cast<long double>(theta) * k);
    return coeff;
}

} // namespace

Complex psi(Complex alpha, double theta, double x) {
    const Complex beta = Complex{std::cos(theta), std::sin(theta)} * alpha;
    const double a = beta.real();
    // |psi|^2 = pi^{-1/2} e^{-(x - sqrt(2) a)^2}: bounded, so exp never overflows.
    const Complex expo{-0.5 * x * x + kSqrt2 * a * x - a * a,
                       kSqrt2 * beta.imag() * x};
    return kPiQuarterInv * std::exp(expo);
}

Complex psi_site(Complex s, Complex z, Prime p, double theta, double x) {
    const Complex alpha = z * std::exp(-s * std::log(static_cast<double>(p)));
    return psi(alpha, theta, x);
}

std::pair<Complex, Complex> beam_split(Complex alpha, double eta) {
    if (!(eta >= 0.0 && eta <= 1.0))
        throw std::invalid_argument("beam_split: transmission must lie in [0, 1], got " +
                                    std::to_string(eta));
    return {std::sqrt(eta) * alpha, -std::sqrt(1.0 - eta) * alpha};
}

std::vector<Complex> kerr_coefficients(Complex beta, double t, std::uint32_t kmax) {
    std::vector<Complex> d(static_cast<std::size_t>(kmax) + 1, Complex{0.0, 0.0});
    const double mag = std::abs(beta);
    if (mag == 0.0) {
        d[0] = Complex{1.0, 0.0};
        return d;
    }
    const double log_mag = std::log(mag);
    const double base = -0.5 * mag * mag;
    const long double arg_b = std::arg(beta);
    const long double tl = t;
    for (std::uint32_t k = 0; k <= kmax; ++k) {
        const double amp = std::exp(base + k * log_mag - 0.5 * std::lgamma(k + 1.0));
        const long double kl = k;
        d[k] = amp * unit_dir(arg_b * kl + tl * kl * kl);
    }
    return d;
}

std::vector<double> hermite_functions(double x, std::uint32_t kmax) {
    std::vector<double> phi(static_cast<std::size_t>(kmax) + 1);
    phi[0] = kPiQuarterInv * std::exp(-0.5 * x * x);
    if (kmax == 0) return phi;
    phi[1] = kSqrt2 * x * phi[0];
    for (std::uint32_t k = 2; k <= kmax; ++k)
        phi[k] = std::sqrt(2.0 / k) * x * phi[k - 1] -
                 std::sqrt((k - 1.0) / k) * phi[k - 2];
    return phi;
}

std::vector<double> default_grid(Complex alpha, std::size_t n) {
    if (n < 2) throw std::invalid_argument("default_grid: need at least 2 points");
    const double reach = kSqrt2 * std::abs(alpha) + 10.0;
    const double step = 2.0 * reach / static_cast<double>(n - 1);
    std::vector<double> grid(n);
    // Mirror-filled so grid[n-1-i] == -grid[i] exactly.
    for (std::size_t i = 0; i < n - 1 - i; ++i) {
        grid[i] = -reach + static_cast<double>(i) * step;
        grid[n - 1 - i] = reach - static_cast<double>(i) * step;
    }
    if (n % 2 == 1) grid[n / 2] = 0.0;
    return grid;
}

void HomodyneProfile::validate() const {
    check_grid_shape(grid, "homodyne profile");
    if (values.size() != grid.size() || envelope_plus.size() != grid.size() ||
        envelope_minus.size() != grid.size() || cross_term.size() != grid.size())
        throw std::invalid_argument("homodyne profile: column sizes disagree");
    for (double v : values)
        if (!std::isfinite(v) || v < 0.0)
            throw std::invalid_argument("homodyne profile: density samples must be "
                                        "finite and nonnegative");
    if (!(std::abs(integral - 1.0) <= integral_tol))
        throw std::runtime_error("homodyne profile: trapezoid integral " +
                                 std::to_string(integral) + " deviates from 1 beyond " +
                                 std::to_string(integral_tol) +
                                 "; the grid is likely too narrow for this state");
}

double profile_integral(const std::vector<double>& grid,
                        const std::vector<double>& values) {
    if (grid.size() != values.size() || grid.size() < 2)
        throw std::invalid_argument("profile_integral: need matching columns, >= 2 rows");
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        acc += 0.5 * (grid[i + 1] - grid[i]) * (values[i] + values[i + 1]);
    return acc;
}

double profile_mean(const HomodyneProfile& prof) {
    std::vector<double> weighted(prof.values.size());
    for (std::size_t i = 0; i < prof.values.size(); ++i)
        weighted[i] = prof.grid[i] * prof.values[i];
    return profile_integral(prof.grid, weighted) / prof.integral;
}

double profile_central_moment(const HomodyneProfile& prof, int order) {
    const double mean = profile_mean(prof);
    std::vector<double> weighted(prof.values.size());
    for (std::size_t i = 0; i < prof.values.size(); ++i)
        weighted[i] = std::pow(prof.grid[i] - mean, order) * prof.values[i];
    return profile_integral(prof.grid, weighted) / prof.integral;
}

HomodyneProfile state_density(Complex alpha, double theta,
                              const std::vector<double>& grid) {
    check_grid_shape(grid, "state_density");
    const Complex beta = Complex{std::cos(theta), std::sin(theta)} * alpha;
    const double center = kSqrt2 * beta.real();
    require_reach(grid, center - kReachSigmas * kSigmaX,
                  center + kReachSigmas * kSigmaX, "state_density");

    HomodyneProfile prof;
    prof.grid = grid;
    prof.values.resize(grid.size());
    prof.envelope_plus.resize(grid.size());
    prof.envelope_minus.assign(grid.size(), 0.0);
    prof.cross_term.assign(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = std::norm(psi(alpha, theta, grid[i]));
        prof.values[i] = v;
        prof.envelope_plus[i] = v;
    }
    prof.alpha = alpha;
    prof.theta = theta;
    prof.integral = profile_integral(prof.grid, prof.values);
    prof.validate();
    return prof;
}

HomodyneProfile cat_port_density(Complex alpha, double eta, double theta_a,
                                 double theta_b, double t,
                                 const std::vector<double>& grid,
                                 const YQuadrature& yq, std::uint32_t kmax) {
    check_grid_shape(grid, "cat_port_density");
    const auto ports = beam_split(alpha, eta); // validates eta
    const Complex beta = ports.first;          // port-A branch amplitude
    const Complex gamma = -ports.second;       // port-B amplitude, positive branch sign

    const std::uint32_t need_a = local_cs_required_cap(beta);
    const std::uint32_t need_b = local_cs_required_cap(gamma);
    std::uint32_t cap_a = need_a, cap_b = need_b;
    if (kmax != 0) {
        if (kmax < std::max(need_a, need_b))
            throw std::invalid_argument(
                "cat_port_density: cap " + std::to_string(kmax) +
                " is below the tail bound; need kmax >= " +
                std::to_string(std::max(need_a, need_b)));
        cap_a = cap_b = kmax;
    }

    // Both branch centers must sit 8 widths inside the grid.  (At generic t
    // the port-A state spreads over the whole |x| <= sqrt(2)|beta| ring; the
    // final integral check below catches grids that are too narrow for that.)
    const Complex beta_rot = Complex{std::cos(theta_a), std::sin(theta_a)} * beta;
    const double center = kSqrt2 * std::abs(beta_rot.real());
    require_reach(grid, -center - kReachSigmas * kSigmaX,
                  center + kReachSigmas * kSigmaX, "cat_port_density");

    // Port-B quadrature window: all of the +/-gamma mass, at any t.
    const double reach_need = kSqrt2 * std::abs(gamma) + kReachSigmas * kSigmaX;
    const double reach_y = yq.reach > 0.0 ? yq.reach : kSqrt2 * std::abs(gamma) + 10.0;
    if (reach_y < reach_need)
        throw std::invalid_argument(
            "cat_port_density: y reach " + std::to_string(reach_y) +
            " cannot hold the port-B mass; need reach >= " + std::to_string(reach_need));
    const int n_y = yq.n_nodes > 0 ? yq.n_nodes
                                   : std::max(401, static_cast<int>(4 * cap_b + 201));

    const auto a_plus =
        with_detector_phase(kerr_coefficients(beta, t, cap_a), theta_a);
    const auto a_minus =
        with_detector_phase(kerr_coefficients(-beta, t, cap_a), theta_a);
    const auto b_minus =
        with_detector_phase(kerr_coefficients(-gamma, t, cap_b), theta_b);
    const auto b_plus =
        with_detector_phase(kerr_coefficients(gamma, t, cap_b), theta_b);

    // Exact port-B overlap int psi^B_- conj(psi^B_+) dy: the detector and
    // Kerr phases cancel mode by mode, leaving e^{-2|gamma|^2} (t-independent).
    // The alternating mode sum loses all digits to cancellation for large
    // |gamma|, so the closed form is used, not the sum.
    const double g_b = std::exp(-2.0 * std::norm(gamma));

    std::vector<double> y_nodes, y_weights;
    gauss_legendre(n_y, -reach_y, reach_y, y_nodes, y_weights);
    std::vector<Complex> wave_b_minus(y_nodes.size()), wave_b_plus(y_nodes.size());
    for (std::size_t j = 0; j < y_nodes.size(); ++j) {
        const auto phi = hermite_functions(y_nodes[j], cap_b);
        wave_b_minus[j] = port_wave(b_minus, phi);
        wave_b_plus[j] = port_wave(b_plus, phi);
    }

    const Complex e_pio4{kSqrt2 / 2.0, kSqrt2 / 2.0};    // e^{+i pi/4}
    const Complex e_mio4{kSqrt2 / 2.0, -kSqrt2 / 2.0};   // e^{-i pi/4}

    HomodyneProfile prof;
    prof.grid = grid;
    prof.values.resize(grid.size());
    prof.envelope_plus.resize(grid.size());
    prof.envelope_minus.resize(grid.size());
    prof.cross_term.resize(grid.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto phi = hermite_functions(grid[i], cap_a);
        const Complex wave_plus = port_wave(a_plus, phi);
        const Complex wave_minus = port_wave(a_minus, phi);

        const double env_p = 0.5 * std::norm(wave_plus);
        const double env_m = 0.5 * std::norm(wave_minus);
        const Complex interf = wave_plus * std::conj(wave_minus) * g_b;
        const double cross = -interf.imag(); // Re(e^{i pi/2} ...)
        const double analytic = env_p + env_m + cross;

        double quad = 0.0;
        for (std::size_t j = 0; j < y_nodes.size(); ++j) {
            const Complex out = e_pio4 * wave_plus * wave_b_minus[j] +
                                e_mio4 * wave_minus * wave_b_plus[j];
            quad += y_weights[j] * 0.5 * std::norm(out);
        }
        worst = std::max(worst, std::abs(quad - analytic));

        prof.envelope_plus[i] = env_p;
        prof.envelope_minus[i] = env_m;
        prof.cross_term[i] = cross;
        prof.values[i] = std::max(analytic, 0.0);
    }
    if (worst > 1e-10)
        throw std::runtime_error(
            "cat_port_density: quadrature and analytic paths disagree by " +
            std::to_string(worst) + "; raise the y-quadrature resolution or the cap");

    prof.alpha = alpha;
    prof.theta = theta_a;
    prof.theta_b = theta_b;
    prof.eta = eta;
    prof.t = t;
    prof.kmax_a = cap_a;
    prof.kmax_b = cap_b;
    prof.port_overlap = g_b;
    prof.path_deviation = worst;
    prof.integral = profile_integral(prof.grid, prof.values);
    prof.validate();
    return prof;
}

HomodyneProfile ncs_port_density(const SiteParams& params, Prime q, double eta,
                                 double theta_b, double t,
                                 const std::vector<double>& grid,
                                 const YQuadrature& yq, std::uint32_t kmax) {
    params.validate();
    if (params.z.find(q) == params.z.end())
        throw std::invalid_argument("ncs_port_density: split site " +
                                    std::to_string(q) +
                                    " is not in the state's support");
    const Complex alpha =
        params.z_of(q) * std::exp(-params.s * std::log(static_cast<double>(q)));
    HomodyneProfile prof =
        cat_port_density(alpha, eta, params.phase_of(q), theta_b, t, grid, yq, kmax);
    if (prof.path_deviation > 1e-12)
        throw std::runtime_error(
            "ncs_port_density: quadrature and analytic paths disagree by " +
            std::to_string(prof.path_deviation) + " (limit 1e-12)");
    return prof;
}

} // namespace primefock
