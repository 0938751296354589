#include "primefock/states.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace primefock {

namespace {

constexpr double kTwoPiD = 6.283185307179586;

std::string prime_tag(Prime p) { return "site " + std::to_string(p); }

// Per-site log factor log(z_p) - s ln p, aligned with the active primes.
// sites with z_p = 0 are flagged; any occupation touching them has
// amplitude exactly zero.
struct SiteLogTable {
    std::vector<Complex> log_factor;
    std::vector<char> dead;

    SiteLogTable(const SiteParams& params, const TruncationSpec& trunc)
        : log_factor(trunc.n_sites()), dead(trunc.n_sites(), 1) {
        for (std::size_t i = 0; i < trunc.n_sites(); ++i) {
            Prime p = trunc.active_primes[i];
            Complex zp = params.z_of(p);
            if (zp == Complex{0.0, 0.0}) continue;
            dead[i] = 0;
            log_factor[i] = std::log(zp) - params.s * std::log(double(p));
        }
    }
};

void require_support_active(const SiteParams& params, const TruncationSpec& trunc,
                            const char* what) {
    for (const auto& [p, zp] : params.z)
        if (zp != Complex{0.0, 0.0} && !trunc.is_active(p))
            throw std::invalid_argument(std::string(what) + ": " + prime_tag(p) +
                                        " carries a nonzero amplitude but is not active");
}

// e^{-lambda} sum_{k<=K} lambda^k / k!
double poisson_head(double lambda, std::uint32_t K) {
    double term = std::exp(-lambda);
    double acc = term;
    for (std::uint32_t k = 1; k <= K; ++k) {
        term *= lambda / double(k);
        acc += term;
    }
    return std::min(acc, 1.0);
}

} // namespace

SiteParams SiteParams::negated() const {
    SiteParams out = *this;
    for (auto& [p, zp] : out.z) zp = -zp;
    return out;
}

double SiteParams::p_sum() const {
    double acc = 0.0;
    for (const auto& [p, zp] : z)
        acc += std::pow(double(p), -2.0 * sigma()) * std::norm(zp);
    return acc;
}

void SiteParams::validate() const {
    if (!(sigma() > 0.5))
        throw std::invalid_argument("SiteParams: Re(s) = " + std::to_string(sigma()) +
                                    " but the Dirichlet series needs Re(s) > 1/2");
    for (const auto& [p, zp] : z) {
        (void)zp;
        if (!is_prime(p))
            throw std::invalid_argument("SiteParams: key " + std::to_string(p) + " is not prime");
    }
    for (const auto& [p, theta] : phases) {
        if (!is_prime(p))
            throw std::invalid_argument("SiteParams: phase key " + std::to_string(p) +
                                        " is not prime");
        if (!(theta >= 0.0 && theta < kTwoPiD))
            throw std::invalid_argument("SiteParams: detector angle at " + prime_tag(p) +
                                        " must lie in [0, 2pi)");
    }
}

void SiteParams::validate_gen() const {
    validate();
    for (const auto& [p, zp] : z) {
        double bound = std::pow(double(p), sigma());
        if (!(std::abs(zp) < bound))
            throw std::invalid_argument("SiteParams: |zeta| = " + std::to_string(std::abs(zp)) +
                                        " at " + prime_tag(p) + " must be < p^sigma = " +
                                        std::to_string(bound));
    }
}

std::uint32_t local_cs_required_cap(Complex alpha) {
    double a2 = std::norm(alpha);
    return std::uint32_t(std::ceil(a2 + 20.0 * std::sqrt(a2 + 1.0) + 30.0));
}

FockVector local_cs(Complex alpha, Prime p, const TruncationSpec& trunc) {
    std::uint32_t cap = trunc.cap_of(p);
    std::uint32_t need = local_cs_required_cap(alpha);
    if (cap < need)
        throw std::invalid_argument("local_cs: cap " + std::to_string(cap) + " at " +
                                    prime_tag(p) + " is below the tail bound; need kmax >= " +
                                    std::to_string(need));
    FockVector v(trunc);
    if (alpha == Complex{0.0, 0.0}) {
        v.set_amplitude(Occupation{}, {1.0, 0.0});
        return v;
    }
    Complex log_alpha = std::log(alpha);
    double half_a2 = 0.5 * std::norm(alpha);
    for (std::uint32_t k = 0; k <= cap; ++k) {
        Complex log_amp = double(k) * log_alpha - 0.5 * std::lgamma(double(k) + 1.0);
        log_amp -= half_a2;
        Occupation occ;
        if (k > 0) {
            std::vector<Occupation::Entry> e = {{p, k}};
            occ = Occupation::from_entries(std::move(e));
        }
        v.set_amplitude(occ, std::exp(log_amp));
    }
    return v;
}

FockVector ncs(const SiteParams& params, const TruncationSpec& trunc) {
    params.validate();
    require_support_active(params, trunc, "ncs");
    SiteLogTable table(params, trunc);
    double base = -0.5 * params.p_sum();
    FockVector v(trunc);
    trunc.for_each_basis([&](const Occupation& occ) {
        Complex log_amp{base, 0.0};
        for (const auto& e : occ.entries()) {
            std::size_t i = trunc.site_index(e.prime);
            if (table.dead[i]) return;
            log_amp += double(e.exponent) * table.log_factor[i];
            log_amp -= 0.5 * std::lgamma(double(e.exponent) + 1.0);
        }
        v.set_amplitude(occ, std::exp(log_amp));
    });
    return v;
}

FockVector gen_cs(const SiteParams& params, const TruncationSpec& trunc) {
    params.validate_gen();
    require_support_active(params, trunc, "gen_cs");
    SiteLogTable table(params, trunc);
    double log_s = 0.0;
    for (const auto& [p, zp] : params.z)
        log_s += std::log1p(-std::pow(double(p), -2.0 * params.sigma()) * std::norm(zp));
    double base = 0.5 * log_s;
    FockVector v(trunc);
    trunc.for_each_basis([&](const Occupation& occ) {
        Complex log_amp{base, 0.0};
        for (const auto& e : occ.entries()) {
            std::size_t i = trunc.site_index(e.prime);
            if (table.dead[i]) return;
            log_amp += double(e.exponent) * table.log_factor[i];
        }
        v.set_amplitude(occ, std::exp(log_amp));
    });
    return v;
}

FockVector moebius_state(const SiteParams& params, const TruncationSpec& trunc) {
    params.validate();
    require_support_active(params, trunc, "moebius_state");
    SiteLogTable table(params, trunc);
    double log_smu = 0.0;
    for (const auto& [p, zp] : params.z)
        log_smu -= std::log1p(std::pow(double(p), -2.0 * params.sigma()) * std::norm(zp));
    double base = 0.5 * log_smu;
    FockVector v(trunc);
    trunc.for_each_basis([&](const Occupation& occ) {
        Complex log_amp{base, 0.0};
        int sign = 1;
        for (const auto& e : occ.entries()) {
            if (e.exponent > 1) return; // mu(n) = 0
            std::size_t i = trunc.site_index(e.prime);
            if (table.dead[i]) return;
            log_amp += table.log_factor[i];
            sign = -sign;
        }
        v.set_amplitude(occ, double(sign) * std::exp(log_amp));
    });
    return v;
}

FockVector build_state(StateFamily family, const SiteParams& params,
                       const TruncationSpec& trunc) {
    switch (family) {
        case StateFamily::LocalCs: {
            params.validate();
            if (params.z.size() != 1)
                throw std::invalid_argument(
                    "build_state: a local coherent state takes exactly one site entry");
            auto [p, zp] = *params.z.begin();
            Complex alpha = std::pow(Complex(double(p), 0.0), -params.s) * zp;
            return local_cs(alpha, p, trunc);
        }
        case StateFamily::Ncs: return ncs(params, trunc);
        case StateFamily::GenCs: return gen_cs(params, trunc);
        case StateFamily::Moebius: return moebius_state(params, trunc);
    }
    throw std::logic_error("build_state: unknown family");
}

double truncation_defect(const FockVector& v) {
    double d = 1.0 - norm2(v);
    if (d < 0.0) return 0.0;
    if (d > 1.0) return 1.0;
    return d;
}

double predicted_defect(StateFamily family, const SiteParams& params,
                        const TruncationSpec& trunc) {
    if (family == StateFamily::GenCs)
        params.validate_gen();
    else
        params.validate();
    require_support_active(params, trunc, "predicted_defect");
    double product = 1.0;
    for (const auto& [p, zp] : params.z) {
        if (zp == Complex{0.0, 0.0}) continue;
        double x = std::pow(double(p), -2.0 * params.sigma()) * std::norm(zp);
        std::uint32_t cap = trunc.cap_of(p);
        double factor = 1.0;
        switch (family) {
            case StateFamily::LocalCs:
            case StateFamily::Ncs:
                factor = poisson_head(x, cap);
                break;
            case StateFamily::GenCs:
                factor = 1.0 - std::pow(x, double(cap) + 1.0);
                break;
            case StateFamily::Moebius:
                factor = (1.0 + (cap >= 1 ? x : 0.0)) / (1.0 + x);
                break;
        }
        product *= factor;
    }
    double d = 1.0 - product;
    return d < 0.0 ? 0.0 : d;
}

TruncationSpec auto_truncation(StateFamily family, const SiteParams& params,
                               double defect_target, double max_basis) {
    if (family == StateFamily::GenCs)
        params.validate_gen();
    else
        params.validate();
    std::vector<Prime> support;
    for (const auto& [p, zp] : params.z)
        if (zp != Complex{0.0, 0.0}) support.push_back(p);
    if (support.empty()) support = {2};

    std::uint32_t kmax = (family == StateFamily::Moebius) ? 1 : 4;
    if (family == StateFamily::LocalCs) {
        auto [p, zp] = *params.z.begin();
        Complex alpha = std::pow(Complex(double(p), 0.0), -params.s) * zp;
        kmax = std::max(kmax, local_cs_required_cap(alpha));
    }
    for (;;) {
        auto spec = TruncationSpec::uniform(support, kmax);
        if (spec.basis_size() > max_basis)
            throw std::runtime_error("auto_truncation: defect target " +
                                     std::to_string(defect_target) +
                                     " needs more than " + std::to_string(max_basis) +
                                     " basis states; tighten the parameters");
        if (predicted_defect(family, params, spec) < defect_target) return spec;
        kmax *= 2;
    }
}

} // namespace primefock
