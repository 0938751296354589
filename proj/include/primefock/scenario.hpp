#pragma once

#include "primefock/dynamics.hpp"
#include "primefock/states.hpp"

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace primefock {

inline constexpr const char* kToolVersion = "primefock/1.0.0";

/// Thrown when a scenario fails validation; the message lists every violated
/// precondition, one per line, so a bad file is diagnosed in one pass.
class ScenarioError : public std::invalid_argument {
public:
    explicit ScenarioError(const std::vector<std::string>& violations);
};

/// Parsed experiment description.  Everything that influences numbers lives
/// here (and therefore in the hash); output locations do not.
struct Scenario {
    SiteParams params;
    StateFamily family = StateFamily::Ncs;
    HamiltonianKind hamiltonian = HamiltonianKind::global_quadratic();
    std::vector<double> times{0.0};
    double time_sign = 1.0; // "minus" sign convention negates every time

    // Truncation control: kmax = 0 means "search for defect_target".
    std::uint32_t kmax = 0;
    double amplitude_floor = 0.0;
    double defect_target = 1e-10;
    double max_basis = 2e7;

    // Tolerance contracts (defaults match the library's documented bounds).
    double cat_tol = 1e-11;       // + 10 * defect, nonlocal families
    double cat_tol_local = 1e-12; // single-site pairing
    double s_equiv_tol = 1e-8;    // + 10 * defect
    double path_tol = 1e-10;
    double integral_tol = 1e-6;
    double resolution_tol = 1e-6;

    // Splitter block (homodyne / interfere).
    Prime split_site = 0; // 0 = smallest support site
    double eta = 0.99;
    double theta_b = 0.0;
    double split_t = 0.0;
    std::uint32_t split_kmax = 0;
    std::size_t grid_points = 2048;
    int y_nodes = 0;
    double y_reach = 0.0;

    // Q-function raster block.
    Prime q_site = 0;
    double q_re_min = -4.0, q_re_max = 4.0;
    double q_im_min = -4.0, q_im_max = 4.0;
    int q_re_n = 81, q_im_n = 81;

    // Resolution-of-identity block.
    Prime res_p = 2;
    Complex res_s{1.0, 0.0};
    double res_r_max = 15.0;
    int res_n_r = 512, res_n_mu = 512;
    std::uint32_t res_kmax = 12;

    // Per-subcommand output filename overrides.
    std::map<std::string, std::string> outputs;

    std::string hash_hex; // FNV-1a of the canonical JSON text

    // Support primes in ascending order.
    std::vector<Prime> support() const;
    // Splitter / q-function site with the smallest-support fallback applied.
    Prime effective_split_site() const;
    Prime effective_q_site() const;
    // Scenario truncation: the explicit uniform cap, or the defect-target search.
    TruncationSpec truncation() const;
};

// Parse + validate a scenario from JSON text (canonical hashing included).
// Collects every violation before throwing ScenarioError.
Scenario load_scenario_text(const std::string& json_text);

// Whole-file convenience wrapper; nonexistent files throw ScenarioError.
Scenario load_scenario_file(const std::string& path);

// 64-bit FNV-1a of a byte string, as 16 lowercase hex digits.
std::string fnv1a64_hex(const std::string& bytes);

// Shortest decimal form that round-trips a double ("%.17g").
std::string format_g17(double v);

/// Deterministic CSV emitter: "# key=value" comment header first, then a
/// column-name line, then rows with every float printed via format_g17.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const Scenario& sc, double truncation_defect);

    void comment(const std::string& key, const std::string& value);
    void columns(const std::vector<std::string>& names);
    void row(const std::vector<std::string>& cells);
    void close();

    static std::string cell(double v) { return format_g17(v); }

private:
    std::ofstream out_;
    bool columns_written_ = false;
};

} // namespace primefock
