#include "primefock/qfunction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace primefock {

namespace {

constexpr double kSeriesFloor = 1e-18;

Complex ipow(Complex base, std::uint32_t k) {
    Complex acc{1.0, 0.0};
    for (std::uint32_t i = 0; i < k; ++i) acc *= base;
    return acc;
}

HamiltonianKind to_kind(QKind kind) {
    switch (kind) {
        case QKind::Harmonic: return HamiltonianKind::harmonic();
        case QKind::LocalQuadratic: return HamiltonianKind::local_quadratic();
        case QKind::GlobalQuadratic: return HamiltonianKind::global_quadratic();
    }
    throw std::logic_error("to_kind: unknown QKind");
}

} // namespace

void QGrid::validate() const {
    if (times.empty())
        throw std::invalid_argument("QGrid: at least one evaluation time required");
    if (points.empty() && vec_points.empty())
        throw std::invalid_argument("QGrid: no evaluation points");
    for (double t : times)
        if (!std::isfinite(t)) throw std::invalid_argument("QGrid: nonfinite time");
    for (const auto& a : points)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
            throw std::invalid_argument("QGrid: nonfinite point");
    for (const auto& zs : vec_points)
        for (const auto& [p, zp] : zs)
            if (!std::isfinite(zp.real()) || !std::isfinite(zp.imag()))
                throw std::invalid_argument("QGrid: nonfinite site point");
}

Complex s_series(Complex a, double t) {
    double la = std::abs(a);
    double scale = std::exp(la);
    if (!std::isfinite(scale))
        throw std::runtime_error("s_series: |a| too large for the exponential series");
    Complex acc{0.0, 0.0};
    Complex apow{1.0, 0.0};
    double kfact = 1.0;
    for (int k = 0; k <= 400; ++k) {
        if (k > 0) {
            apow *= a;
            kfact *= double(k);
        }
        double mag = std::abs(apow) / kfact;
        acc += (apow / kfact) * unit_phase(std::int64_t(k) * k, t);
        // Terms grow until k ~ |a|; only trust the tail cutoff past the peak.
        if (k >= 1 && double(k) > la && mag < kSeriesFloor * scale) return acc;
    }
    throw std::runtime_error("s_series: series needs more than 400 terms");
}

int s_required_cap(Complex a) {
    double la = std::abs(a);
    if (la == 0.0) return 1;
    double cutoff = std::log(kSeriesFloor);
    for (int k = 0; k <= 400; ++k) {
        if (double(k) * std::log(la) - std::lgamma(double(k) + 1.0) < cutoff) return k;
    }
    throw std::runtime_error("s_required_cap: cap beyond the 400-term hard limit");
}

Complex s_closed(Complex a, double t, int kcap) {
    int need = s_required_cap(a);
    if (kcap < need)
        throw std::invalid_argument("s_closed: cap " + std::to_string(kcap) +
                                    " truncates visibly; need kcap >= " + std::to_string(need));
    if (kcap > 400)
        throw std::invalid_argument("s_closed: cap exceeds the 400-term hard limit");
    Complex acc{0.0, 0.0};
    Complex apow{1.0, 0.0};
    double kfact = 1.0;
    for (int k = 0; k <= kcap; ++k) {
        if (k > 0) {
            apow *= a;
            kfact *= double(k);
        }
        acc += (apow / kfact) * unit_phase(std::int64_t(k) * k, t);
    }
    return acc;
}

double q_single(Complex alpha0, Complex alpha, double t, SingleKind kind) {
    if (kind == SingleKind::Harmonic) {
        Complex center = std::polar(1.0, -t) * alpha0;
        return std::exp(-std::norm(alpha - center));
    }
    Complex s = s_series(std::conj(alpha0) * alpha, t);
    return std::exp(-std::norm(alpha) - std::norm(alpha0)) * std::norm(s);
}

double q_ncs(const SiteParams& params0, const SiteParams& params, double t, QKind kind,
             const TruncationSpec& trunc) {
    if (params0.s != params.s)
        throw std::invalid_argument("q_ncs: both parameter sets must share s");
    auto probe = evolve(to_kind(kind), t, ncs(params, trunc));
    auto reference = ncs(params0, trunc);
    return std::norm(inner(reference, probe));
}

std::pair<Complex, Complex> equivalence_global(const SiteParams& params0,
                                               const SiteParams& params, double t,
                                               const TruncationSpec& trunc) {
    if (params0.s != params.s)
        throw std::invalid_argument("equivalence_global: both parameter sets must share s");
    params0.validate();
    params.validate();

    double sigma = params.sigma();
    std::vector<Complex> x(trunc.n_sites());
    for (std::size_t i = 0; i < trunc.n_sites(); ++i) {
        Prime p = trunc.active_primes[i];
        x[i] = std::pow(double(p), -2.0 * sigma) * std::conj(params0.z_of(p)) * params.z_of(p);
    }

    Complex dirichlet{0.0, 0.0};
    trunc.for_each_basis([&](const Occupation& occ) {
        Complex term{1.0, 0.0};
        for (const auto& e : occ.entries()) {
            Complex xe = x[trunc.site_index(e.prime)];
            if (xe == Complex{0.0, 0.0}) return;
            term *= ipow(xe, e.exponent) / std::tgamma(double(e.exponent) + 1.0);
        }
        std::int64_t w = std::int64_t(profile(occ).big_omega);
        dirichlet += term * unit_phase(w * w, t);
    });

    Complex a_sum{0.0, 0.0};
    for (const auto& xe : x) a_sum += xe;
    return {dirichlet, s_series(a_sum, t)};
}

double separability_check(const SiteParams& params0, const SiteParams& params, double t,
                          QKind kind, const TruncationSpec& trunc) {
    double joint = q_ncs(params0, params, t, kind, trunc);
    double product = 1.0;
    for (Prime p : trunc.active_primes) {
        Complex scale = std::pow(Complex(double(p), 0.0), -params.s);
        product *= q_single(scale * params0.z_of(p), scale * params.z_of(p), t,
                            SingleKind::Quadratic);
    }
    return std::abs(joint - product) / std::max(product, 1e-300);
}

void gauss_legendre(int n, double a, double b, std::vector<double>& nodes,
                    std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    double xm = 0.5 * (b + a);
    double xl = 0.5 * (b - a);
    int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        // Newton iteration from the Chebyshev estimate of the i-th root.
        double x = std::cos(M_PI * (double(i) + 0.75) / (double(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * x * p1 - double(j) * p2) / (double(j) + 1.0);
            }
            pp = double(n) * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = xm - xl * x;
        nodes[n - 1 - i] = xm + xl * x;
        weights[i] = 2.0 * xl / ((1.0 - x * x) * pp * pp);
        weights[n - 1 - i] = weights[i];
    }
}

double resolution_check_single_site(Prime p, Complex s, double r_max, int n_r, int n_mu,
                                    int kmax) {
    if (!is_prime(p))
        throw std::invalid_argument("resolution check: site label must be prime");
    if (!(s.real() > 0.5))
        throw std::invalid_argument("resolution check: Re(s) must exceed 1/2");
    if (n_r < 32 || n_mu < 32)
        throw std::invalid_argument("resolution check: quadrature sizes must be >= 32");
    if (kmax < 0 || !(r_max > 0.0))
        throw std::invalid_argument("resolution check: kmax >= 0 and r_max > 0 required");

    double sigma = s.real();
    double u_max = std::pow(double(p), -2.0 * sigma) * r_max * r_max;
    std::vector<double> un, uw;
    gauss_legendre(n_r, 0.0, u_max, un, uw);

    int dim = kmax + 1;
    Complex unit_dir = std::pow(Complex(double(p), 0.0), -s);
    unit_dir /= std::abs(unit_dir); // only the p^{-i Im s} phase survives

    std::vector<double> inv_sqrt_fact(dim);
    for (int k = 0; k < dim; ++k) inv_sqrt_fact[k] = std::exp(-0.5 * std::lgamma(double(k) + 1.0));

    std::vector<Complex> m(std::size_t(dim) * dim, Complex{0.0, 0.0});
    std::vector<Complex> c(dim);
    for (int ir = 0; ir < n_r; ++ir) {
        double u = un[ir];
        // The radial measure collapses to e^{-u} du once the coherent kets
        // are left unnormalized; see the diagonal gamma integrals.
        double wu = uw[ir] * std::exp(-u) / double(n_mu);
        double amp = std::sqrt(u);
        for (int im = 0; im < n_mu; ++im) {
            Complex alpha = amp * unit_dir * std::polar(1.0, 2.0 * M_PI * double(im) / n_mu);
            Complex apow{1.0, 0.0};
            for (int k = 0; k < dim; ++k) {
                c[k] = apow * inv_sqrt_fact[k];
                apow *= alpha;
            }
            for (int j = 0; j < dim; ++j) {
                Complex cj = wu * c[j];
                for (int k = 0; k < dim; ++k) m[std::size_t(j) * dim + k] += cj * std::conj(c[k]);
            }
        }
    }

    double worst = 0.0;
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
            Complex expect = (j == k) ? Complex{1.0, 0.0} : Complex{0.0, 0.0};
            worst = std::max(worst, std::abs(m[std::size_t(j) * dim + k] - expect));
        }
    return worst;
}

} // namespace primefock
