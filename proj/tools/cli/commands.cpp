#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <thread>

#include "dtc/analysis.hpp"
#include "dtc/chain.hpp"
#include "dtc/glide_model.hpp"
#include "dtc/heun.hpp"
#include "dtc/num/bessel.hpp"
#include "dtc/num/errors.hpp"

namespace dtc::cli {

namespace {

using num::Complex;
using num::kPi;

// Runs fn(i) for i in [0, count). The first failure by index is rethrown.
template <class F>
void parallel_for(std::size_t count, int workers, F&& fn) {
    std::vector<std::exception_ptr> failures(count);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    {
        std::vector<std::jthread> pool;
        for (std::size_t k = 1; k < std::min(threads, count); ++k) pool.emplace_back(work);
        work();
    }
    for (auto& f : failures) {
        if (f) std::rethrow_exception(f);
    }
}

double number(const json& cfg, const char* key) {
    const auto& v = cfg.at(key);
    if (!v.is_number()) throw ValidationError(std::string(key) + " must be a number");
    return v.get<double>();
}

int integer(const json& cfg, const char* key) {
    const auto& v = cfg.at(key);
    if (!v.is_number_integer()) throw ValidationError(std::string(key) + " must be an integer");
    const auto value = v.get<long long>();
    if (value < -2147483647LL || value > 2147483647LL) {
        throw ValidationError(std::string(key) + " is out of range");
    }
    return static_cast<int>(value);
}

std::vector<double> numbers(const json& cfg, const char* key) {
    std::vector<double> out;
    for (const auto& v : cfg.at(key)) {
        if (!v.is_number()) throw ValidationError(std::string(key) + " must list numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

double resolve_alpha(const json& cfg) {
    const int root = integer(cfg, "alpha_root");
    if (root > 0) return analysis::find_root(root).alpha;
    if (root < 0) throw ValidationError("alpha_root must be >= 0");
    if (cfg.at("alpha").is_null()) {
        throw ValidationError("alpha is required (set alpha or alpha_root)");
    }
    return number(cfg, "alpha");
}

chain::ChainParams chain_params(const json& cfg, double alpha) {
    chain::ChainParams p;
    p.coupling = number(cfg, "coupling");
    p.axis = chain::parse_axis(cfg.at("axis").get<std::string>());
    p.boundary = chain::parse_boundary(cfg.at("boundary").get<std::string>());
    p.alpha = alpha;
    p.perturbation_z = number(cfg, "perturbation_z");
    return p;
}

json stats_json(const num::IntegratorStats& s) {
    return {{"accepted", s.accepted}, {"rejected", s.rejected}, {"evaluations", s.evaluations}};
}

// ---------------------------------------------------------------- roots

std::vector<Artifact> cmd_roots(const json& cfg, int workers) {
    const int n_max = integer(cfg, "n_max");
    if (n_max < 0 || n_max > 50) throw ValidationError("n_max must lie in [0, 50]");
    analysis::RootOptions options;
    options.refine_tol = number(cfg, "tol");
    const auto method = cfg.at("method").get<std::string>();
    if (method == "auto") options.method = analysis::RootMethod::automatic;
    else if (method == "bisection") options.method = analysis::RootMethod::bisection;
    else if (method == "minimization") options.method = analysis::RootMethod::minimization;
    else throw ValidationError("method must be auto, bisection or minimization");

    std::vector<analysis::RootEntry> roots(static_cast<std::size_t>(n_max));
    parallel_for(roots.size(), workers, [&](std::size_t i) {
        roots[i] = analysis::find_root(static_cast<int>(i) + 1, options);
    });

    Table t{{"n", "alpha_n", "theta_n", "residual_modulus"}, {}};
    for (const auto& r : roots) {
        t.rows.push_back({std::int64_t{r.n}, r.alpha, r.theta, r.residual});
    }
    return {{"", std::move(t)}};
}

// ---------------------------------------------------------------- rho-curve

std::vector<Artifact> cmd_rho_curve(const json& cfg, int workers) {
    const double lo = number(cfg, "alpha_min");
    const double hi = number(cfg, "alpha_max");
    const int steps = integer(cfg, "steps");
    const double tol = number(cfg, "tol");
    if (!(lo >= 0.0) || !(hi >= lo)) throw ValidationError("need 0 <= alpha_min <= alpha_max");
    if (steps < 1 || steps > 1000000) throw ValidationError("steps must lie in [1, 10^6]");

    std::vector<std::array<double, 3>> rows(static_cast<std::size_t>(steps));
    parallel_for(rows.size(), workers, [&](std::size_t i) {
        const double a = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (steps - 1);
        const double b = 0.5 * kPi * num::bessel_j0(0.5 * a);
        rows[i] = {a, heun::remain_probability(a, tol), b * b};
    });

    Table t{{"alpha", "rho_exact", "rho_bessel"}, {}};
    for (const auto& r : rows) t.rows.push_back({r[0], r[1], r[2]});
    return {{"", std::move(t)}};
}

// ---------------------------------------------------------------- strobo

std::array<Complex, 2> parse_psi0(const json& v, std::uint64_t seed) {
    if (v.is_string()) {
        if (v.get<std::string>() != "random") {
            throw ValidationError("psi0 must be two components or \"random\"");
        }
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss;
        std::array<Complex, 2> c;
        for (auto& z : c) z = Complex(gauss(rng), gauss(rng));
        const double norm = std::sqrt(std::norm(c[0]) + std::norm(c[1]));
        for (auto& z : c) z /= norm;
        return c;
    }
    if (!v.is_array() || v.size() != 2) throw ValidationError("psi0 must have two components");
    std::array<Complex, 2> c;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& e = v[i];
        if (e.is_number()) {
            c[i] = e.get<double>();
        } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
            c[i] = Complex(e[0].get<double>(), e[1].get<double>());
        } else {
            throw ValidationError("psi0 components must be numbers or [re, im] pairs");
        }
    }
    const double norm = std::sqrt(std::norm(c[0]) + std::norm(c[1]));
    if (std::abs(norm - 1.0) > 1e-9) throw ValidationError("psi0 must be normalized");
    return c;
}

std::vector<Artifact> cmd_strobo(const json& cfg, int) {
    const double alpha = number(cfg, "alpha");
    const int n_periods = integer(cfg, "n_periods");
    const auto seed = cfg.at("seed").get<std::uint64_t>();
    const auto c = parse_psi0(cfg.at("psi0"), seed);
    const auto psi0 = glide::state_from_coefficients(c[0], c[1]);
    const auto records = analysis::stroboscopic_projections(alpha, psi0, n_periods, number(cfg, "tol"));

    Table t{{"n", "a_plus", "a_minus"}, {}};
    for (const auto& r : records) t.rows.push_back({std::int64_t{r.n}, r.a_plus, r.a_minus});

    json verdict = {{"alpha", alpha},
                    {"psi0", {{c[0].real(), c[0].imag()}, {c[1].real(), c[1].imag()}}},
                    {"records", records.size()}};
    if (records.size() >= 50) {
        analysis::ClassifierConfig cc;
        cc.cluster_tol = number(cfg, "cluster_tol");
        cc.arc_bins = integer(cfg, "arc_bins");
        cc.ergodic_coverage = number(cfg, "ergodic_coverage");
        const auto v = analysis::classify_periodicity(records, cc);
        verdict["kind"] = std::string(analysis::to_string(v.kind));
        verdict["cluster_count"] = v.cluster_count;
        verdict["coverage_fraction"] = v.coverage_fraction;
        verdict["two_period_drift"] = v.two_period_drift;
    } else {
        verdict["kind"] = nullptr;
        verdict["note"] = "classification needs at least 50 periods";
    }
    return {{"", std::move(t)}, {"_verdict", std::move(verdict)}};
}

// ---------------------------------------------------------------- manybody

Table oracle_series(double alpha, chain::Axis polarization, int n_periods, int spp) {
    const glide::GlideModelParams gp(alpha);
    const auto single = chain::build_initial_state(1, polarization);
    const auto phi_p = glide::instantaneous_state(gp, 0.0, glide::Chi::plus);
    const auto phi_m = glide::instantaneous_state(gp, 0.0, glide::Chi::minus);
    const Complex c_plus = phi_p.dot(single);
    const Complex c_minus = phi_m.dot(single);

    const auto total = static_cast<std::size_t>(n_periods) * static_cast<std::size_t>(spp);
    const auto transfer = heun::transfer_trajectory(alpha, 0.25 * gp.period() * n_periods, total);
    Table t{{"t", "m_x"}, {}};
    const auto sx = num::pauli_x();
    for (std::size_t k = 0; k <= total; ++k) {
        const double t_k = gp.period() * static_cast<double>(k) / spp;
        const num::State c = transfer[k] * (num::State(2) << c_plus, c_minus).finished();
        const heun::HeunCoefficients hc{0.25 * t_k, c[0], c[1]};
        const auto psi = heun::reconstruct_wavefunction(gp, hc, t_k);
        t.rows.push_back({t_k, psi.dot(sx * psi).real()});
    }
    return t;
}

std::vector<Artifact> cmd_manybody(const json& cfg, int) {
    const double alpha = resolve_alpha(cfg);
    auto p = chain_params(cfg, alpha);
    p.sites = integer(cfg, "sites");
    p.validate();
    const auto polarization = chain::parse_axis(cfg.at("polarization").get<std::string>());
    chain::EvolveOptions options;
    options.n_periods = integer(cfg, "n_periods");
    options.samples_per_period = integer(cfg, "samples_per_period");
    options.tol = number(cfg, "tol");
    options.site_resolved = cfg.at("site_resolved").get<bool>();
    const double threshold = number(cfg, "threshold");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
    const bool oracle = cfg.at("oracle").get<bool>();
    if (oracle && (p.coupling != 0.0 || p.perturbation_z != 0.0)) {
        throw ValidationError("the two-level oracle needs coupling = 0 and perturbation_z = 0");
    }

    Table series{{"t", "m_x"}, {}};
    if (options.site_resolved) {
        for (int i = 0; i < p.sites; ++i) series.columns.push_back("sx_" + std::to_string(i));
    }
    Table spectrum{{"frequency", "magnitude"}, {}};
    Table envelope{{"n", "Z"}, {}};
    json life = {{"alpha", alpha}, {"threshold", threshold}};

    if (options.n_periods == 0) {
        // validate the remaining settings without running
        (void)chain::evolve_chain(p, chain::build_initial_state(p.sites, polarization), options);
        life["tau"] = nullptr;
        life["censored"] = nullptr;
        life["completed_periods"] = 0;
    } else {
        const auto ev = chain::evolve_chain(p, chain::build_initial_state(p.sites, polarization), options);
        for (std::size_t k = 0; k < ev.magnetization.times.size(); ++k) {
            std::vector<Cell> row{ev.magnetization.times[k], ev.magnetization.values[k]};
            if (options.site_resolved) {
                for (double v : ev.site_sx[k]) row.emplace_back(v);
            }
            series.rows.push_back(std::move(row));
        }
        const auto sp = chain::magnetization_spectrum(ev.magnetization).one_sided();
        for (std::size_t k = 0; k < sp.frequency.size(); ++k) {
            spectrum.rows.push_back({sp.frequency[k], sp.magnitude[k]});
        }
        const auto z = chain::envelope_z(ev.stroboscopic);
        for (const auto& e : z) envelope.rows.push_back({std::int64_t{e.n}, e.z});
        const auto lt = chain::lifetime(z, threshold);
        const auto peak = sp.dominant_bin();
        life["tau"] = lt.tau;
        life["censored"] = lt.censored;
        life["completed_periods"] = ev.completed_periods;
        life["peak_frequency"] = sp.frequency[peak];
        life["half_frequency_dominance"] = chain::peak_dominance(sp, 0.5);
        life["max_norm_drift"] = ev.max_norm_drift;
        life["integrator"] = stats_json(ev.stats);
    }

    std::vector<Artifact> out{{"_series", std::move(series)},
                              {"_spectrum", std::move(spectrum)},
                              {"_envelope", std::move(envelope)},
                              {"_lifetime", std::move(life)}};
    if (oracle) {
        Table t{{"t", "m_x"}, {}};
        if (options.n_periods > 0) {
            t = oracle_series(alpha, polarization, options.n_periods, options.samples_per_period);
        }
        out.push_back({"_oracle", std::move(t)});
    }
    return out;
}

// ---------------------------------------------------------------- scaling

struct ScalingRow {
    int sites = 0;
    std::vector<double> envelope_mx;
    int completed = 0;
    double drift = 0.0;
};

std::vector<Artifact> cmd_scaling(const json& cfg, int workers) {
    std::vector<int> sizes;
    for (const auto& v : cfg.at("sites")) {
        if (!v.is_number_integer()) throw ValidationError("sites must list integers");
        sizes.push_back(v.get<int>());
    }
    if (sizes.size() < 3) {
        throw ValidationError("insufficient points for fit (need at least 3 system sizes)");
    }
    const double threshold = number(cfg, "threshold");
    auto thresholds = numbers(cfg, "thresholds");
    for (double th : thresholds) {
        if (!(th > 0.0 && th < 1.0)) throw ValidationError("thresholds must lie in (0, 1)");
    }
    if (!(threshold > 0.0 && threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
    const int horizon = integer(cfg, "horizon");
    if (horizon < 1) throw ValidationError("horizon must be >= 1");
    const double tol = number(cfg, "tol");
    const double alpha = resolve_alpha(cfg);
    const auto base = chain_params(cfg, alpha);
    const auto polarization = chain::parse_axis(cfg.at("polarization").get<std::string>());
    for (int L : sizes) {
        auto p = base;
        p.sites = L;
        p.validate();
    }
    const double stop = std::min(threshold, *std::min_element(thresholds.begin(), thresholds.end()));

    // spare workers go to the propagator columns of each size
    const int outer = std::clamp(workers, 1, static_cast<int>(sizes.size()));
    const int inner = std::max(1, workers / outer);
    std::vector<ScalingRow> rows(sizes.size());
    parallel_for(sizes.size(), outer, [&](std::size_t i) {
        auto p = base;
        p.sites = sizes[i];
        const auto u = chain::floquet_operator(p, tol, inner);
        const auto run = chain::stroboscopic_run(u, chain::build_initial_state(p.sites, polarization),
                                                 p.sites, horizon, stop);
        rows[i] = {p.sites, run.stroboscopic, run.completed_periods, run.max_norm_drift};
    });

    auto entries_at = [&](double th) {
        std::vector<chain::ScalingEntry> entries;
        for (const auto& r : rows) {
            const auto lt = chain::lifetime(chain::envelope_z(r.envelope_mx), th);
            entries.push_back({r.sites, lt.tau, lt.censored});
        }
        return entries;
    };
    auto fit_json = [&](double th) {
        const auto entries = entries_at(th);
        json j = {{"threshold", th}};
        json list = json::array();
        for (const auto& e : entries) list.push_back({{"L", e.sites}, {"tau", e.tau}, {"censored", e.censored}});
        j["entries"] = std::move(list);
        try {
            const auto fit = chain::scaling_fit(entries);
            j["b"] = fit.b;
            j["intercept"] = fit.intercept;
        } catch (const ValidationError& e) {
            j["b"] = nullptr;
            j["intercept"] = nullptr;
            j["error"] = e.what();
        }
        return j;
    };

    Table t{{"L", "tau", "censored", "completed_periods", "max_norm_drift"}, {}};
    const auto main_entries = entries_at(threshold);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        t.rows.push_back({std::int64_t{rows[i].sites}, main_entries[i].tau, main_entries[i].censored,
                          std::int64_t{rows[i].completed}, rows[i].drift});
    }
    json fit = fit_json(threshold);
    fit["alpha"] = alpha;
    json sensitivity = json::array();
    for (double th : thresholds) sensitivity.push_back(fit_json(th));
    fit["sensitivity"] = std::move(sensitivity);
    return {{"", std::move(t)}, {"_fit", std::move(fit)}};
}

// ---------------------------------------------------------------- winding

std::vector<Artifact> cmd_winding(const json& cfg, int) {
    const auto alphas = numbers(cfg, "alpha");
    const double epsilon = number(cfg, "epsilon");
    const int grid = integer(cfg, "grid");
    if (grid < 2) throw ValidationError("grid must be >= 2");
    Table t{{"alpha", "winding", "chiral_anticommutator"}, {}};
    for (double a : alphas) {
        const glide::GlideModelParams p(a);
        const auto ts = num::TimeGrid(0.0, p.period(), static_cast<std::size_t>(grid)).points();
        t.rows.push_back({a, glide::winding_number(p, 0.0, p.period(), epsilon),
                          glide::chiral_check(p, ts)});
    }
    return {{"", std::move(t)}};
}

bool same_kind(const std::string& key, const json& base, const json& value) {
    if (key == "psi0") return value.is_array() || value.is_string();
    if (base.is_null()) return value.is_null() || value.is_number();
    if (base.is_number_integer()) return value.is_number_integer();
    if (base.is_number()) return value.is_number();
    return base.type() == value.type();
}

} // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"roots", "rho-curve", "strobo",
                                                "manybody", "scaling", "winding"};
    return names;
}

json default_config(std::string_view command) {
    if (command == "roots") {
        return {{"n_max", 14}, {"tol", 1e-10}, {"method", "auto"}, {"seed", 0}};
    }
    if (command == "rho-curve") {
        return {{"alpha_min", 0.0}, {"alpha_max", 90.0}, {"steps", 901}, {"tol", 1e-12}, {"seed", 0}};
    }
    if (command == "strobo") {
        return {{"alpha", 8.0},         {"psi0", {1.0, 0.0}},  {"n_periods", 300},
                {"cluster_tol", 1e-6},  {"arc_bins", 20},      {"ergodic_coverage", 0.8},
                {"tol", 1e-12},         {"seed", 0}};
    }
    if (command == "manybody") {
        return {{"sites", 8},           {"coupling", 0.2},        {"axis", "x"},
                {"boundary", "open"},   {"polarization", "x"},    {"alpha", nullptr},
                {"alpha_root", 0},      {"perturbation_z", 0.0},  {"n_periods", 40},
                {"samples_per_period", 16}, {"tol", 1e-9},        {"threshold", 0.5},
                {"site_resolved", false},   {"oracle", false},    {"seed", 0}};
    }
    if (command == "scaling") {
        return {{"sites", {4, 6, 8}},   {"coupling", 0.2},        {"axis", "x"},
                {"boundary", "open"},   {"polarization", "x"},    {"alpha", nullptr},
                {"alpha_root", 0},      {"perturbation_z", 0.0},  {"horizon", 2000000},
                {"threshold", 0.5},     {"thresholds", {0.3, 0.4, 0.5, 0.6, 0.7}},
                {"tol", 1e-13},         {"seed", 0}};
    }
    if (command == "winding") {
        return {{"alpha", {1.0, 4.21, 80.07}}, {"epsilon", 1e-3}, {"grid", 1000}, {"seed", 0}};
    }
    throw ValidationError("unknown command '" + std::string(command) + "'");
}

json merge_config(const json& base, const json& overrides) {
    if (!overrides.is_object()) throw ValidationError("config overrides must be a JSON object");
    json out = base;
    for (const auto& [key, value] : overrides.items()) {
        if (!base.contains(key)) throw ValidationError("unknown config key '" + key + "'");
        if (!same_kind(key, base.at(key), value)) {
            throw ValidationError("config key '" + key + "' has the wrong type");
        }
        out[key] = value;
    }
    return out;
}

std::vector<Artifact> run_command(std::string_view command, const json& config, int workers) {
    const json cfg = merge_config(default_config(command), config);
    if (command == "roots") return cmd_roots(cfg, workers);
    if (command == "rho-curve") return cmd_rho_curve(cfg, workers);
    if (command == "strobo") return cmd_strobo(cfg, workers);
    if (command == "manybody") return cmd_manybody(cfg, workers);
    if (command == "scaling") return cmd_scaling(cfg, workers);
    return cmd_winding(cfg, workers);
}

int default_workers() {
    return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

} // namespace dtc::cli
