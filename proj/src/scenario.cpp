#include "primefock/scenario.hpp"

#include "primefock/arithmetic.hpp"

#include "json.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace primefock {

namespace {

using nlohmann::json;

struct Collector {
    std::vector<std::string> violations;
    void add(std::string m) { violations.push_back(std::move(m)); }
    bool ok() const { return violations.empty(); }
};

void check_keys(const json& j, const std::string& label,
                std::initializer_list<const char*> allowed, Collector& err) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known) err.add(label + ": unknown key \"" + it.key() + "\"");
    }
}

bool get_complex(const json& j, const std::string& label, Collector& err,
                 Complex& out) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        err.add(label + " must be a [re, im] number pair");
        return false;
    }
    out = Complex{j[0].get<double>(), j[1].get<double>()};
    return true;
}

bool get_real(const json& j, const std::string& label, Collector& err, double& out) {
    if (!j.is_number()) {
        err.add(label + " must be a number");
        return false;
    }
    out = j.get<double>();
    if (!std::isfinite(out)) {
        err.add(label + " must be finite");
        return false;
    }
    return true;
}

bool get_uint(const json& j, const std::string& label, Collector& err,
              std::uint64_t& out) {
    if (!j.is_number_unsigned()) {
        err.add(label + " must be a nonnegative integer");
        return false;
    }
    out = j.get<std::uint64_t>();
    return true;
}

void parse_sites(const json& j, Scenario& sc, Collector& err) {
    if (!j.is_array()) {
        err.add("sites must be an array of {prime, z, theta?} objects");
        return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
        const std::string label = "sites[" + std::to_string(i) + "]";
        const json& site = j[i];
        if (!site.is_object() || !site.contains("prime") || !site.contains("z")) {
            err.add(label + " must be an object with \"prime\" and \"z\"");
            continue;
        }
        check_keys(site, label, {"prime", "z", "theta"}, err);
        std::uint64_t p = 0;
        if (!get_uint(site["prime"], label + ".prime", err, p)) continue;
        if (!is_prime(p)) {
            err.add(label + ".prime = " + std::to_string(p) +
                    " violates the prime-site-index precondition");
            continue;
        }
        if (sc.params.z.count(p)) {
            err.add(label + ": duplicate entry for site " + std::to_string(p));
            continue;
        }
        Complex z;
        if (!get_complex(site["z"], label + ".z", err, z)) continue;
        sc.params.z[p] = z;
        if (site.contains("theta")) {
            double theta = 0.0;
            if (!get_real(site["theta"], label + ".theta", err, theta)) continue;
            if (theta < 0.0 || theta >= 2.0 * 3.14159265358979323846) {
                err.add(label + ".theta = " + std::to_string(theta) +
                        " violates the [0, 2pi) detector-angle precondition");
                continue;
            }
            sc.params.phases[p] = theta;
        }
    }
}

void parse_hamiltonian(const json& j, Scenario& sc, Collector& err) {
    if (!j.is_object() || !j.contains("kind")) {
        err.add("hamiltonian must be an object with a \"kind\" string");
        return;
    }
    check_keys(j, "hamiltonian", {"kind", "cutoff", "site"}, err);
    if (!j["kind"].is_string()) {
        err.add("hamiltonian.kind must be a string");
        return;
    }
    const std::string kind = j["kind"].get<std::string>();
    const bool has_cutoff = j.contains("cutoff");
    const bool has_site = j.contains("site");
    std::uint64_t cutoff = 0, site = 0;
    if (has_cutoff && !get_uint(j["cutoff"], "hamiltonian.cutoff", err, cutoff)) return;
    if (has_site && !get_uint(j["site"], "hamiltonian.site", err, site)) return;

    if (kind == "harmonic") {
        sc.hamiltonian = HamiltonianKind::harmonic();
    } else if (kind == "local-quadratic") {
        sc.hamiltonian = HamiltonianKind::local_quadratic();
    } else if (kind == "global-quadratic") {
        sc.hamiltonian = HamiltonianKind::global_quadratic();
    } else if (kind == "gen-global-quadratic") {
        sc.hamiltonian = HamiltonianKind::gen_global_quadratic();
    } else if (kind == "finite-local-quadratic" || kind == "mixed-below") {
        if (!has_cutoff) {
            err.add("hamiltonian.cutoff is required for kind \"" + kind + "\"");
            return;
        }
        sc.hamiltonian = kind == "finite-local-quadratic"
                             ? HamiltonianKind::finite_local_quadratic(cutoff)
                             : HamiltonianKind::mixed_below(cutoff);
    } else if (kind == "single-site-gen-quadratic") {
        if (!has_site) {
            err.add("hamiltonian.site is required for kind \"" + kind + "\"");
            return;
        }
        if (!is_prime(site)) {
            err.add("hamiltonian.site = " + std::to_string(site) +
                    " violates the prime-site-index precondition");
            return;
        }
        sc.hamiltonian = HamiltonianKind::single_site_gen_quadratic(site);
    } else {
        err.add("hamiltonian.kind \"" + kind +
                "\" is not one of harmonic, local-quadratic, global-quadratic, "
                "gen-global-quadratic, finite-local-quadratic, mixed-below, "
                "single-site-gen-quadratic");
    }
    if ((kind == "harmonic" || kind == "local-quadratic" ||
         kind == "global-quadratic" || kind == "gen-global-quadratic") &&
        (has_cutoff || has_site))
        err.add("hamiltonian: kind \"" + kind + "\" takes no cutoff or site");
}

void parse_tolerances(const json& j, Scenario& sc, Collector& err) {
    check_keys(j, "tolerances",
               {"cat", "cat_local", "s_equiv", "path", "integral", "resolution"},
               err);
    struct Slot { const char* key; double* dst; };
    const Slot slots[] = {
        {"cat", &sc.cat_tol},         {"cat_local", &sc.cat_tol_local},
        {"s_equiv", &sc.s_equiv_tol}, {"path", &sc.path_tol},
        {"integral", &sc.integral_tol}, {"resolution", &sc.resolution_tol},
    };
    for (const Slot& s : slots) {
        if (!j.contains(s.key)) continue;
        double v = 0.0;
        if (get_real(j[s.key], std::string("tolerances.") + s.key, err, v)) {
            if (v <= 0.0)
                err.add(std::string("tolerances.") + s.key + " must be positive");
            else
                *s.dst = v;
        }
    }
}

void parse_raster_axis(const json& j, const std::string& label, Collector& err,
                       double& lo, double& hi, int& n) {
    if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() ||
        !j[2].is_number_unsigned()) {
        err.add(label + " must be [min, max, count]");
        return;
    }
    const double a = j[0].get<double>(), b = j[1].get<double>();
    const std::uint64_t c = j[2].get<std::uint64_t>();
    if (!(a < b) || c < 2) {
        err.add(label + " needs min < max and count >= 2");
        return;
    }
    lo = a;
    hi = b;
    n = static_cast<int>(c);
}

} // namespace

ScenarioError::ScenarioError(const std::vector<std::string>& violations)
    : std::invalid_argument([&] {
          std::ostringstream os;
          os << "scenario invalid (" << violations.size() << " violation"
             << (violations.size() == 1 ? "" : "s") << "):";
          for (const std::string& v : violations) os << "\n  - " << v;
          return os.str();
      }()) {}

std::vector<Prime> Scenario::support() const {
    std::vector<Prime> v;
    v.reserve(params.z.size());
    for (const auto& entry : params.z) v.push_back(entry.first);
    return v;
}

Prime Scenario::effective_split_site() const {
    if (split_site != 0) return split_site;
    if (params.z.empty())
        throw std::invalid_argument("scenario has no sites to split or observe");
    return params.z.begin()->first;
}

Prime Scenario::effective_q_site() const {
    if (q_site != 0) return q_site;
    if (params.z.empty())
        throw std::invalid_argument("scenario has no sites to observe");
    return params.z.begin()->first;
}

TruncationSpec Scenario::truncation() const {
    if (kmax > 0 && !params.z.empty())
        return TruncationSpec::uniform(support(), kmax, amplitude_floor);
    return auto_truncation(family, params, defect_target, max_basis);
}

Scenario load_scenario_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ScenarioError({std::string("JSON parse failure: ") + e.what()});
    }
    if (!j.is_object()) throw ScenarioError({"scenario root must be a JSON object"});

    Collector err;
    Scenario sc;
    check_keys(j, "scenario",
               {"s", "family", "sites", "hamiltonian", "times", "sign_convention",
                "trunc", "defect_target", "max_basis", "tolerances", "split",
                "qfunc", "resolution", "outputs"},
               err);

    if (j.contains("s")) get_complex(j["s"], "s", err, sc.params.s);
    if (sc.params.sigma() <= 0.5)
        err.add("s: Re(s) = " + std::to_string(sc.params.sigma()) +
                " violates the Re(s) > 1/2 precondition");

    if (j.contains("family")) {
        if (!j["family"].is_string()) {
            err.add("family must be a string");
        } else {
            const std::string fam = j["family"].get<std::string>();
            if (fam == "local_cs") sc.family = StateFamily::LocalCs;
            else if (fam == "ncs") sc.family = StateFamily::Ncs;
            else if (fam == "gen_cs") sc.family = StateFamily::GenCs;
            else if (fam == "moebius") sc.family = StateFamily::Moebius;
            else
                err.add("family \"" + fam +
                        "\" is not one of local_cs, ncs, gen_cs, moebius");
        }
    }

    if (j.contains("sites")) parse_sites(j["sites"], sc, err);

    // Family-specific site preconditions, named per the violated bound.
    if (sc.family == StateFamily::LocalCs && sc.params.z.size() != 1)
        err.add("family local_cs requires exactly one site entry, got " +
                std::to_string(sc.params.z.size()));
    if (sc.family == StateFamily::GenCs || sc.family == StateFamily::Moebius) {
        for (const auto& entry : sc.params.z) {
            const double bound = std::pow(static_cast<double>(entry.first),
                                          sc.params.sigma());
            if (!(std::abs(entry.second) < bound))
                err.add("sites: |zeta_" + std::to_string(entry.first) + "| = " +
                        std::to_string(std::abs(entry.second)) +
                        " violates the strict |zeta_p| < p^sigma = " +
                        std::to_string(bound) + " precondition");
        }
    }

    if (j.contains("hamiltonian")) parse_hamiltonian(j["hamiltonian"], sc, err);

    if (j.contains("times")) {
        if (!j["times"].is_array() || j["times"].empty()) {
            err.add("times must be a nonempty array of reals");
        } else {
            sc.times.clear();
            for (std::size_t i = 0; i < j["times"].size(); ++i) {
                double t = 0.0;
                if (get_real(j["times"][i], "times[" + std::to_string(i) + "]", err, t))
                    sc.times.push_back(t);
            }
        }
    }

    if (j.contains("sign_convention")) {
        const json& sign = j["sign_convention"];
        if (sign.is_string() && sign.get<std::string>() == "plus")
            sc.time_sign = 1.0;
        else if (sign.is_string() && sign.get<std::string>() == "minus")
            sc.time_sign = -1.0;
        else
            err.add("sign_convention must be \"plus\" or \"minus\"");
    }

    if (j.contains("trunc")) {
        const json& tr = j["trunc"];
        check_keys(tr, "trunc", {"kmax", "amplitude_floor"}, err);
        if (tr.contains("kmax")) {
            std::uint64_t v = 0;
            if (get_uint(tr["kmax"], "trunc.kmax", err, v)) {
                if (v == 0 || v > 4096)
                    err.add("trunc.kmax must lie in [1, 4096]");
                else
                    sc.kmax = static_cast<std::uint32_t>(v);
            }
        }
        if (tr.contains("amplitude_floor")) {
            double v = 0.0;
            if (get_real(tr["amplitude_floor"], "trunc.amplitude_floor", err, v)) {
                if (v < 0.0)
                    err.add("trunc.amplitude_floor must be >= 0");
                else
                    sc.amplitude_floor = v;
            }
        }
    }

    if (j.contains("defect_target")) {
        double v = 0.0;
        if (get_real(j["defect_target"], "defect_target", err, v)) {
            if (!(v > 0.0 && v < 1.0))
                err.add("defect_target must lie in (0, 1)");
            else
                sc.defect_target = v;
        }
    }
    if (j.contains("max_basis")) {
        double v = 0.0;
        if (get_real(j["max_basis"], "max_basis", err, v)) {
            if (v < 1.0)
                err.add("max_basis must be >= 1");
            else
                sc.max_basis = v;
        }
    }

    if (j.contains("tolerances")) parse_tolerances(j["tolerances"], sc, err);

    if (j.contains("split")) {
        const json& sp = j["split"];
        check_keys(sp, "split",
                   {"site", "eta", "theta_b", "t", "kmax", "grid_points",
                    "y_nodes", "y_reach"},
                   err);
        if (sp.contains("site")) {
            std::uint64_t p = 0;
            if (get_uint(sp["site"], "split.site", err, p)) {
                if (!is_prime(p))
                    err.add("split.site = " + std::to_string(p) +
                            " violates the prime-site-index precondition");
                else
                    sc.split_site = p;
            }
        }
        if (sp.contains("eta")) {
            double v = 0.0;
            if (get_real(sp["eta"], "split.eta", err, v)) {
                if (!(v >= 0.0 && v <= 1.0))
                    err.add("split.eta = " + std::to_string(v) +
                            " violates the [0, 1] transmission precondition");
                else
                    sc.eta = v;
            }
        }
        if (sp.contains("theta_b")) get_real(sp["theta_b"], "split.theta_b", err, sc.theta_b);
        if (sp.contains("t")) get_real(sp["t"], "split.t", err, sc.split_t);
        if (sp.contains("kmax")) {
            std::uint64_t v = 0;
            if (get_uint(sp["kmax"], "split.kmax", err, v))
                sc.split_kmax = static_cast<std::uint32_t>(v);
        }
        if (sp.contains("grid_points")) {
            std::uint64_t v = 0;
            if (get_uint(sp["grid_points"], "split.grid_points", err, v)) {
                if (v < 2 || v > 1000000)
                    err.add("split.grid_points must lie in [2, 1000000]");
                else
                    sc.grid_points = static_cast<std::size_t>(v);
            }
        }
        if (sp.contains("y_nodes")) {
            std::uint64_t v = 0;
            if (get_uint(sp["y_nodes"], "split.y_nodes", err, v))
                sc.y_nodes = static_cast<int>(v);
        }
        if (sp.contains("y_reach")) {
            double v = 0.0;
            if (get_real(sp["y_reach"], "split.y_reach", err, v)) {
                if (v < 0.0)
                    err.add("split.y_reach must be >= 0");
                else
                    sc.y_reach = v;
            }
        }
    }

    if (j.contains("qfunc")) {
        const json& q = j["qfunc"];
        check_keys(q, "qfunc", {"site", "re", "im"}, err);
        if (q.contains("site")) {
            std::uint64_t p = 0;
            if (get_uint(q["site"], "qfunc.site", err, p)) {
                if (!is_prime(p))
                    err.add("qfunc.site = " + std::to_string(p) +
                            " violates the prime-site-index precondition");
                else
                    sc.q_site = p;
            }
        }
        if (q.contains("re"))
            parse_raster_axis(q["re"], "qfunc.re", err, sc.q_re_min, sc.q_re_max,
                              sc.q_re_n);
        if (q.contains("im"))
            parse_raster_axis(q["im"], "qfunc.im", err, sc.q_im_min, sc.q_im_max,
                              sc.q_im_n);
    }

    if (j.contains("resolution")) {
        const json& r = j["resolution"];
        check_keys(r, "resolution", {"p", "s", "r_max", "n_r", "n_mu", "kmax"}, err);
        if (r.contains("p")) {
            std::uint64_t p = 0;
            if (get_uint(r["p"], "resolution.p", err, p)) {
                if (!is_prime(p))
                    err.add("resolution.p = " + std::to_string(p) +
                            " violates the prime-site-index precondition");
                else
                    sc.res_p = p;
            }
        }
        if (r.contains("s")) {
            if (get_complex(r["s"], "resolution.s", err, sc.res_s) &&
                sc.res_s.real() <= 0.5)
                err.add("resolution.s: Re(s) = " + std::to_string(sc.res_s.real()) +
                        " violates the Re(s) > 1/2 precondition");
        }
        if (r.contains("r_max")) {
            double v = 0.0;
            if (get_real(r["r_max"], "resolution.r_max", err, v)) {
                if (v <= 0.0)
                    err.add("resolution.r_max must be positive");
                else
                    sc.res_r_max = v;
            }
        }
        struct Slot { const char* key; int* dst; };
        const Slot slots[] = {{"n_r", &sc.res_n_r}, {"n_mu", &sc.res_n_mu}};
        for (const Slot& s : slots) {
            if (!r.contains(s.key)) continue;
            std::uint64_t v = 0;
            if (get_uint(r[s.key], std::string("resolution.") + s.key, err, v))
                *s.dst = static_cast<int>(v);
        }
        if (r.contains("kmax")) {
            std::uint64_t v = 0;
            if (get_uint(r["kmax"], "resolution.kmax", err, v))
                sc.res_kmax = static_cast<std::uint32_t>(v);
        }
    }

    if (j.contains("outputs")) {
        if (!j["outputs"].is_object()) {
            err.add("outputs must map subcommand names to filenames");
        } else {
            for (auto it = j["outputs"].begin(); it != j["outputs"].end(); ++it) {
                if (!it.value().is_string())
                    err.add("outputs." + it.key() + " must be a string");
                else
                    sc.outputs[it.key()] = it.value().get<std::string>();
            }
        }
    }

    if (!err.ok()) throw ScenarioError(err.violations);

    sc.hash_hex = fnv1a64_hex(j.dump());
    return sc;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioError({"cannot read scenario file " + path});
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario_text(buf.str());
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
    return buf;
}

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const Scenario& sc,
                     double truncation_defect)
    : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open output file " + path);
    out_ << "# scenario_hash=" << sc.hash_hex
         << " truncation_defect=" << format_g17(truncation_defect)
         << " tool_version=" << kToolVersion << "\n";
}

void CsvWriter::comment(const std::string& key, const std::string& value) {
    out_ << "# " << key << "=" << value << "\n";
}

void CsvWriter::columns(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i)
        out_ << (i ? "," : "") << names[i];
    out_ << "\n";
    columns_written_ = true;
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
        out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
}

void CsvWriter::close() {
    out_.close();
    if (!out_) throw std::runtime_error("output write failure");
}

} // namespace primefock
