// Command-line front end for the rank-based panel anomaly tests.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rankhc/calibration.hpp"
#include "rankhc/comparators.hpp"
#include "rankhc/matrix.hpp"
#include "rankhc/parallel.hpp"
#include "rankhc/simgen.hpp"
#include "rankhc/theory.hpp"

using nlohmann::json;
using namespace rankhc;

namespace {

struct SeedOption {
    std::optional<std::uint64_t> fixed;
    bool randomize = false;

    void attach(CLI::App* cmd) {
        auto* s = cmd->add_option("--seed", fixed, "RNG seed (recorded)");
        auto* r = cmd->add_flag("--random-seed", randomize,
                                "draw a seed from the OS and record it");
        s->excludes(r);
    }

    RngSeed resolve() const {
        if (fixed) return RngSeed{*fixed};
        if (randomize) {
            std::random_device rd;
            return RngSeed{(static_cast<std::uint64_t>(rd()) << 32) ^ rd()};
        }
        throw std::invalid_argument(
            "randomized command needs --seed or --random-seed");
    }
};

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

// Structured output goes to --out when given, stdout otherwise.
void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) std::cout << content << '\n';
    else write_text(out_path, content);
}

void write_manifest(const std::string& out_path, const json& manifest) {
    if (out_path.empty()) return;
    write_text(out_path + ".manifest.json", manifest.dump(2));
}

ObservationMatrix load_input(const std::string& path, bool has_header,
                             bool transpose_on_load,
                             const std::vector<std::string>& directions) {
    ObservationMatrix m = load_csv(path, has_header, transpose_on_load);
    if (directions.empty()) return m;
    ColumnDirection dir(m.t(), Direction::MonitorHigh);
    for (const std::string& d : directions) {
        const auto colon = d.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument(
                "--direction expects <column>:high or <column>:low, got " + d);
        const std::size_t col = std::stoul(d.substr(0, colon));
        const std::string how = d.substr(colon + 1);
        if (col >= m.t())
            throw std::invalid_argument("--direction column out of range: " + d);
        if (how == "high") dir[col] = Direction::MonitorHigh;
        else if (how == "low") dir[col] = Direction::MonitorLow;
        else
            throw std::invalid_argument("--direction expects high or low: " + d);
    }
    return apply_direction(m, dir);
}

json result_with_manifest(const TestResult& res, json manifest) {
    json j = json::parse(res.to_json());
    j["manifest"] = std::move(manifest);
    return j;
}

OracleNullSpec oracle_by_name(const std::string& name) {
    if (name == "normal") return oracle_normal();
    if (name == "uniform") return oracle_uniform();
    if (name == "exponential") return oracle_exponential();
    if (name == "cauchy") return oracle_cauchy();
    throw std::invalid_argument("unknown oracle family: " + name);
}

int run(int argc, char** argv) {
    CLI::App app{"Rank-based sparse anomaly detection across referentials"};
    app.require_subcommand(1);
    std::size_t threads = 0;
    app.add_option("--threads", threads,
                   "max worker threads (0 = hardware); results do not depend "
                   "on this value");

    // ---- test ----
    auto* cmd_test = app.add_subcommand(
        "test", "Run a calibrated rank test on a CSV panel");
    std::string in_path, out_path, table_path, method = "random-ties";
    bool has_header = false, transposed = false, auto_tabulate = false;
    std::vector<std::string> directions;
    double alpha = 0.05;
    std::string grid_kind = "extended";
    int k_n = 0;
    std::size_t mc_pq = 100000, mc_t = 100000, permutations = 10000;
    bool subjects = false;
    std::size_t subject_mc = 20000;
    SeedOption test_seed;
    cmd_test->add_option("--input", in_path, "CSV panel, subjects x columns")
        ->required();
    cmd_test->add_flag("--has-header", has_header, "skip the first CSV line");
    cmd_test->add_flag("--transpose", transposed,
                       "input is columns x subjects; transpose on load");
    cmd_test->add_option("--direction", directions,
                         "<column>:high|low (default: all high)");
    cmd_test->add_option("--method", method,
                         "random-ties | midrank-perm | midrank-naive");
    cmd_test->add_option("--alpha", alpha, "nominal level");
    cmd_test->add_option("--grid", grid_kind, "standard | extended");
    cmd_test->add_option("--k-n", k_n, "grid resolution (0 = ceil(log^2 n))");
    cmd_test->add_option("--table", table_path, "null table file");
    cmd_test->add_flag("--auto-tabulate", auto_tabulate,
                       "tabulate when the table file is absent");
    cmd_test->add_option("--mc-pq", mc_pq, "tabulation replicates for p_q");
    cmd_test->add_option("--mc-t", mc_t, "tabulation replicates for T");
    cmd_test->add_option("--permutations", permutations,
                         "permutation count for midrank-perm");
    cmd_test->add_flag("--subjects", subjects, "emit subject-level p-values");
    cmd_test->add_option("--subject-mc", subject_mc,
                         "null pool size for subject p-values");
    cmd_test->add_option("--out", out_path, "output path (default stdout)");
    test_seed.attach(cmd_test);

    // ---- tabulate ----
    auto* cmd_tab = app.add_subcommand(
        "tabulate", "Precompute a null table for a panel shape");
    std::size_t tab_n = 0, tab_t = 0;
    std::string tab_out, tab_grid = "extended";
    int tab_kn = 0;
    std::size_t tab_mc_pq = 100000, tab_mc_t = 100000;
    SeedOption tab_seed;
    cmd_tab->add_option("--n", tab_n, "subjects")->required();
    cmd_tab->add_option("--t", tab_t, "columns")->required();
    cmd_tab->add_option("--grid", tab_grid, "standard | extended");
    cmd_tab->add_option("--k-n", tab_kn, "grid resolution (0 = default)");
    cmd_tab->add_option("--mc-pq", tab_mc_pq, "replicates for p_q");
    cmd_tab->add_option("--mc-t", tab_mc_t, "replicates for T");
    cmd_tab->add_option("--out", tab_out, "table file")->required();
    tab_seed.attach(cmd_tab);

    // ---- simulate ----
    auto* cmd_sim = app.add_subcommand(
        "simulate", "Power/level experiments over simulated panels");
    std::string sim_setting = "normal-shift", sim_out;
    std::size_t sim_n = 0, sim_t = 0, sim_s = 0, sim_trials = 1000;
    double sim_beta = 0.0, sim_sigma = 1.0, sim_alpha = 0.05;
    std::vector<double> sim_taus;
    std::vector<std::string> sim_methods{"rank"};
    std::vector<int> sim_kn_list;
    std::vector<std::size_t> sim_t_list;
    int sim_kn = 0;
    std::size_t sim_mc_pq = 100000, sim_mc_t = 100000;
    std::size_t sim_dist_mc = 2000, sim_perm_b = 200, sim_friedman_mc = 2000;
    SeedOption sim_seed;
    cmd_sim->add_option("--setting", sim_setting,
                        "normal-shift | exponential-rate | uniform-tilt | "
                        "convolution-normal | convolution-triangular | "
                        "cauchy-shift");
    cmd_sim->add_option("--n", sim_n, "subjects")->required();
    cmd_sim->add_option("--t", sim_t, "columns");
    cmd_sim->add_option("--beta", sim_beta, "sparsity exponent in (0.5, 1)");
    cmd_sim->add_option("--anomalous", sim_s,
                        "anomaly count (alternative to --beta)");
    cmd_sim->add_option("--sigma", sim_sigma,
                        "convolution component deviation");
    cmd_sim->add_option("--taus", sim_taus, "signal strengths")->required();
    cmd_sim->add_option("--alpha", sim_alpha, "nominal level");
    cmd_sim->add_option("--trials", sim_trials, "trials per tau");
    cmd_sim->add_option("--methods", sim_methods,
                        "subset of: rank dist-hc perm-hc friedman");
    cmd_sim->add_option("--k-n", sim_kn, "grid resolution (0 = default)");
    cmd_sim->add_option("--k-n-list", sim_kn_list,
                        "compare rank-test grids (overrides --methods)");
    cmd_sim->add_option("--t-list", sim_t_list,
                        "compare stream lengths (overrides --methods)");
    cmd_sim->add_option("--mc-pq", sim_mc_pq, "tabulation replicates for p_q");
    cmd_sim->add_option("--mc-t", sim_mc_t, "tabulation replicates for T");
    cmd_sim->add_option("--dist-mc", sim_dist_mc,
                        "calibration replicates for dist-hc");
    cmd_sim->add_option("--perm-b", sim_perm_b, "permutations for perm-hc");
    cmd_sim->add_option("--friedman-mc", sim_friedman_mc,
                        "calibration replicates for friedman");
    cmd_sim->add_option("--out", sim_out, "CSV output path")->required();
    sim_seed.attach(cmd_sim);

    // ---- boundary ----
    auto* cmd_bnd = app.add_subcommand(
        "boundary", "Emit detection-boundary curves as CSV");
    double bnd_beta_min = 0.501, bnd_beta_max = 0.999;
    std::size_t bnd_beta_steps = 100;
    std::vector<double> bnd_sigmas{0.0, 0.5, 1.0, std::sqrt(2.0), 2.0};
    std::string bnd_out;
    cmd_bnd->add_option("--beta-min", bnd_beta_min, "smallest beta (> 0.5)");
    cmd_bnd->add_option("--beta-max", bnd_beta_max, "largest beta (< 1)");
    cmd_bnd->add_option("--beta-steps", bnd_beta_steps, "grid size");
    cmd_bnd->add_option("--sigmas", bnd_sigmas, "heteroskedasticity values");
    cmd_bnd->add_option("--out", bnd_out, "CSV output path (default stdout)");

    // ---- friedman ----
    auto* cmd_fr = app.add_subcommand(
        "friedman", "Friedman rank test on a CSV panel");
    std::string fr_in, fr_out;
    bool fr_header = false, fr_transpose = false;
    std::vector<std::string> fr_directions;
    std::size_t fr_mc = 10000;
    SeedOption fr_seed;
    cmd_fr->add_option("--input", fr_in, "CSV panel")->required();
    cmd_fr->add_flag("--has-header", fr_header, "skip the first CSV line");
    cmd_fr->add_flag("--transpose", fr_transpose, "transpose on load");
    cmd_fr->add_option("--direction", fr_directions, "<column>:high|low");
    cmd_fr->add_option("--mc", fr_mc, "calibration replicates");
    cmd_fr->add_option("--out", fr_out, "output path (default stdout)");
    fr_seed.attach(cmd_fr);

    // ---- dist-hc ----
    auto* cmd_dh = app.add_subcommand(
        "dist-hc", "Distribution-aware means test (needs a known null)");
    std::string dh_in, dh_out, dh_family = "normal";
    bool dh_header = false, dh_transpose = false;
    std::vector<std::string> dh_directions;
    double dh_mu0 = 0.0, dh_sigma0 = 0.0;
    int dh_kn = 0;
    std::size_t dh_mc = 2000;
    SeedOption dh_seed;
    cmd_dh->add_option("--input", dh_in, "CSV panel")->required();
    cmd_dh->add_flag("--has-header", dh_header, "skip the first CSV line");
    cmd_dh->add_flag("--transpose", dh_transpose, "transpose on load");
    cmd_dh->add_option("--direction", dh_directions, "<column>:high|low");
    cmd_dh->add_option("--family", dh_family,
                       "normal | uniform | exponential | cauchy");
    cmd_dh->add_option("--mu0", dh_mu0, "override null location");
    cmd_dh->add_option("--sigma0", dh_sigma0, "override null scale (> 0)");
    cmd_dh->add_option("--k-n", dh_kn, "grid resolution (0 = default)");
    cmd_dh->add_option("--mc", dh_mc, "calibration replicates");
    cmd_dh->add_option("--out", dh_out, "output path (default stdout)");
    dh_seed.attach(cmd_dh);

    // ---- perm-hc ----
    auto* cmd_ph = app.add_subcommand(
        "perm-hc", "Permutation-calibrated means test (identical referentials "
                   "only)");
    std::string ph_in, ph_out;
    bool ph_header = false, ph_transpose = false;
    std::vector<std::string> ph_directions;
    int ph_kn = 0;
    std::size_t ph_b = 10000;
    SeedOption ph_seed;
    cmd_ph->add_option("--input", ph_in, "CSV panel")->required();
    cmd_ph->add_flag("--has-header", ph_header, "skip the first CSV line");
    cmd_ph->add_flag("--transpose", ph_transpose, "transpose on load");
    cmd_ph->add_option("--direction", ph_directions, "<column>:high|low");
    cmd_ph->add_option("--k-n", ph_kn, "grid resolution (0 = default)");
    cmd_ph->add_option("--permutations", ph_b, "permutation count");
    cmd_ph->add_option("--out", ph_out, "output path (default stdout)");
    ph_seed.attach(cmd_ph);

    // ---- fixtures ----
    auto* cmd_fx = app.add_subcommand(
        "fixtures", "Analytic sanity fixtures with known closed forms");
    std::string fx_kind = "correlated-block", fx_out;
    std::size_t fx_n = 10, fx_s = 4, fx_samples = 100000;
    double fx_weight = 0.7;
    SeedOption fx_seed;
    cmd_fx->add_option("--kind", fx_kind,
                       "correlated-block | zero-dispersion | oscillating");
    cmd_fx->add_option("--n", fx_n, "subjects");
    cmd_fx->add_option("--s", fx_s, "anomaly count (correlated-block)");
    cmd_fx->add_option("--weight", fx_weight,
                       "mixture weight p (zero-dispersion)");
    cmd_fx->add_option("--samples", fx_samples, "MC samples");
    cmd_fx->add_option("--out", fx_out, "output path (default stdout)");
    fx_seed.attach(cmd_fx);

    CLI11_PARSE(app, argc, argv);
    set_max_threads(threads);

    if (*cmd_test) {
        const RngSeed seed = test_seed.resolve();
        const ObservationMatrix m =
            load_input(in_path, has_header, transposed, directions);
        const GridKind kind = grid_kind == "standard" ? GridKind::Standard
                            : grid_kind == "extended" ? GridKind::Extended
                            : throw std::invalid_argument(
                                  "unknown grid kind: " + grid_kind);
        const GridSpec grid = make_grid(kind, m.n(), m.t(), k_n);
        SubjectOptions subj{subjects, subject_mc};

        json manifest{{"command", "test"},     {"input", in_path},
                      {"method", method},      {"alpha", alpha},
                      {"grid", grid_kind},     {"k_n", grid.k_n},
                      {"seed", seed.value},    {"mc_pq", mc_pq},
                      {"mc_t", mc_t},          {"permutations", permutations}};

        TestResult res;
        if (method == "midrank-perm") {
            res = test_midrank_permutation(m, grid, permutations, seed, subj);
        } else if (method == "random-ties" || method == "midrank-naive") {
            std::optional<NullTable> table;
            if (!table_path.empty() &&
                std::filesystem::exists(table_path)) {
                table = load_table(table_path);
                if (table->n != m.n() || table->t != m.t() ||
                    !table->grid.same_shape(grid))
                    throw std::invalid_argument(
                        "table at " + table_path +
                        " does not match the requested shape/grid");
            } else if (auto_tabulate) {
                table = tabulate_null(m.n(), m.t(), grid, mc_pq, mc_t, seed);
                if (!table_path.empty()) save_table(*table, table_path);
            } else {
                throw std::invalid_argument(
                    "null table missing for n=" + std::to_string(m.n()) +
                    ", t=" + std::to_string(m.t()) +
                    "; pass --table or --auto-tabulate");
            }
            manifest["table_seed"] = table->seed.value;
            res = method == "random-ties"
                      ? test_random_ties(m, *table, seed, subj)
                      : test_midrank_naive(m, *table, seed, subj);
        } else {
            throw std::invalid_argument("unknown method: " + method);
        }
        json j = result_with_manifest(res, manifest);
        j["reject"] = res.reject(alpha);
        emit(out_path, j.dump(2));
        return 0;
    }

    if (*cmd_tab) {
        const RngSeed seed = tab_seed.resolve();
        const GridKind kind = tab_grid == "standard" ? GridKind::Standard
                            : GridKind::Extended;
        const GridSpec grid = make_grid(kind, tab_n, tab_t, tab_kn);
        const NullTable table =
            tabulate_null(tab_n, tab_t, grid, tab_mc_pq, tab_mc_t, seed);
        save_table(table, tab_out);
        json manifest{{"command", "tabulate"}, {"n", tab_n},
                      {"t", tab_t},            {"grid", tab_grid},
                      {"k_n", grid.k_n},       {"mc_pq", tab_mc_pq},
                      {"mc_t", tab_mc_t},      {"seed", seed.value},
                      {"out", tab_out}};
        write_manifest(tab_out, manifest);
        std::cout << manifest.dump(2) << '\n';
        return 0;
    }

    if (*cmd_sim) {
        const RngSeed seed = sim_seed.resolve();
        simgen::SignalSpec base;
        base.setting = simgen::parse_family(sim_setting);
        base.n = sim_n;
        base.t = sim_t;
        base.sigma = sim_sigma;
        if (sim_s > 0) base.beta = simgen::beta_for_count(sim_n, sim_s);
        else if (sim_beta > 0.0) base.beta = sim_beta;
        else throw std::invalid_argument("simulate needs --beta or --anomalous");

        std::vector<simgen::PowerCurve> curves;
        if (!sim_t_list.empty()) {
            curves = simgen::stream_length_experiment(
                base.setting, sim_n, sim_s > 0 ? sim_s : base.anomalous(),
                sim_taus, sim_t_list, sim_alpha, sim_trials, sim_mc_pq,
                sim_mc_t, seed);
        } else if (!sim_kn_list.empty()) {
            if (sim_t == 0) throw std::invalid_argument("simulate needs --t");
            curves = simgen::grid_experiment(base, sim_taus, sim_alpha,
                                             sim_trials, sim_kn_list,
                                             sim_mc_pq, sim_mc_t, seed);
        } else {
            if (sim_t == 0) throw std::invalid_argument("simulate needs --t");
            simgen::MethodSet methods;
            std::optional<NullTable> table;
            std::optional<DistHcCalibration> dist;
            for (const std::string& name : sim_methods) {
                if (name == "rank") {
                    const GridSpec grid =
                        make_grid(GridKind::Extended, sim_n, sim_t, sim_kn);
                    table = tabulate_null(sim_n, sim_t, grid, sim_mc_pq,
                                          sim_mc_t,
                                          RngSeed{mix_keys(seed.value, 0x74)});
                    methods.rank_table = &*table;
                } else if (name == "dist-hc") {
                    dist = calibrate_dist_hc(
                        simgen::oracle_for(base.setting), sim_n, sim_t, sim_kn,
                        sim_dist_mc, RngSeed{mix_keys(seed.value, 0x64)});
                    methods.dist = &*dist;
                } else if (name == "perm-hc") {
                    methods.perm_b = sim_perm_b;
                } else if (name == "friedman") {
                    methods.friedman_mc = sim_friedman_mc;
                } else {
                    throw std::invalid_argument("unknown method: " + name);
                }
            }
            curves = simgen::power_experiment(base, sim_taus, sim_alpha,
                                              sim_trials, methods, seed);
        }
        simgen::write_power_csv(curves, sim_out);
        write_text(sim_out + ".manifest.json",
                   simgen::power_manifest_json(curves, base, sim_taus,
                                               sim_trials, seed));
        return 0;
    }

    if (*cmd_bnd) {
        if (!(bnd_beta_min > 0.5 && bnd_beta_max < 1.0 &&
              bnd_beta_min <= bnd_beta_max))
            throw std::invalid_argument(
                "boundary: need 0.5 < beta-min <= beta-max < 1");
        std::string csv = "beta,sigma,rho,rho_tilde\n";
        char buf[128];
        for (std::size_t i = 0; i < bnd_beta_steps; ++i) {
            const double beta =
                bnd_beta_steps == 1
                    ? bnd_beta_min
                    : bnd_beta_min + (bnd_beta_max - bnd_beta_min) *
                                         static_cast<double>(i) /
                                         static_cast<double>(bnd_beta_steps - 1);
            for (double sigma : bnd_sigmas) {
                std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g\n",
                              beta, sigma, theory::rho(beta, sigma),
                              theory::rho_tilde(beta, sigma));
                csv += buf;
            }
        }
        emit(bnd_out, csv);
        write_manifest(bnd_out,
                       json{{"command", "boundary"},
                            {"beta_min", bnd_beta_min},
                            {"beta_max", bnd_beta_max},
                            {"beta_steps", bnd_beta_steps},
                            {"sigmas", bnd_sigmas}});
        return 0;
    }

    if (*cmd_fr) {
        const RngSeed seed = fr_seed.resolve();
        const ObservationMatrix m =
            load_input(fr_in, fr_header, fr_transpose, fr_directions);
        const TestResult res = friedman_test(m, fr_mc, seed);
        emit(fr_out, result_with_manifest(
                         res, json{{"command", "friedman"},
                                   {"input", fr_in},
                                   {"mc", fr_mc},
                                   {"seed", seed.value}})
                         .dump(2));
        return 0;
    }

    if (*cmd_dh) {
        const RngSeed seed = dh_seed.resolve();
        const ObservationMatrix m =
            load_input(dh_in, dh_header, dh_transpose, dh_directions);
        OracleNullSpec spec = oracle_by_name(dh_family);
        if (dh_sigma0 > 0.0) {
            spec.mu0 = dh_mu0;
            spec.sigma0 = dh_sigma0;
        }
        const TestResult res = dist_aware_hc(m, spec, dh_kn, dh_mc, seed);
        emit(dh_out, result_with_manifest(
                         res, json{{"command", "dist-hc"},
                                   {"input", dh_in},
                                   {"family", dh_family},
                                   {"mu0", spec.mu0},
                                   {"sigma0", spec.sigma0},
                                   {"k_n", dh_kn},
                                   {"mc", dh_mc},
                                   {"seed", seed.value}})
                         .dump(2));
        return 0;
    }

    if (*cmd_ph) {
        const RngSeed seed = ph_seed.resolve();
        const ObservationMatrix m =
            load_input(ph_in, ph_header, ph_transpose, ph_directions);
        const TestResult res = raw_permutation_hc(m, ph_kn, ph_b, seed);
        emit(ph_out, result_with_manifest(
                         res, json{{"command", "perm-hc"},
                                   {"input", ph_in},
                                   {"k_n", ph_kn},
                                   {"permutations", ph_b},
                                   {"seed", seed.value}})
                         .dump(2));
        return 0;
    }

    if (*cmd_fx) {
        json j{{"command", "fixtures"}, {"kind", fx_kind}};
        if (fx_kind == "correlated-block") {
            const simgen::TwoOutcomeFixture fx =
                simgen::two_outcome_fixture(fx_n, fx_s);
            j["n"] = fx.n;
            j["s"] = fx.s;
            j["q"] = fx.q;
            j["z_q"] = fx.z_q;
            j["sum_var"] = fx.sum_var;
            j["sum_cov"] = fx.sum_cov;
            j["identity_holds"] = fx.identity_holds;
        } else if (fx_kind == "zero-dispersion") {
            // Mixture null with weight p on U[0,1] and 1-p on U[2,3]; the
            // anomalous U[1,2] draw sits at null-CDF value p exactly, so
            // E[U] = p, E[U^2] = p^2 and the dispersion is zero.
            const RngSeed seed = fx_seed.resolve();
            const double p = fx_weight;
            if (!(p >= 0.0 && p <= 1.0))
                throw std::invalid_argument("--weight must lie in [0, 1]");
            const auto c = theory::anomaly_characteristics(
                [p](Rng& rng) {
                    return rng.uniform() < p ? rng.uniform()
                                             : 2.0 + rng.uniform();
                },
                [](Rng& rng) { return 1.0 + rng.uniform(); }, fx_samples,
                seed);
            j["seed"] = seed.value;
            j["samples"] = fx_samples;
            j["weight"] = p;
            j["e_u"] = c.e_u;
            j["e_u2"] = c.e_u2;
            j["mu"] = c.mu;
            j["sigma_sq"] = c.sigma_sq;
            j["expected_e_u"] = p;
            j["expected_e_u2"] = p * p;
        } else if (fx_kind == "oscillating") {
            // U[-1,1] null against U[-(2+sin n), 2+sin n]:
            // mu = 0, E[U^2] = (5 + 3 sin n)/(12 + 6 sin n).
            const RngSeed seed = fx_seed.resolve();
            const double half =
                2.0 + std::sin(static_cast<double>(fx_n));
            const auto c = theory::anomaly_characteristics(
                [](Rng& rng) { return 2.0 * rng.uniform() - 1.0; },
                [half](Rng& rng) { return half * (2.0 * rng.uniform() - 1.0); },
                fx_samples, seed);
            j["seed"] = seed.value;
            j["samples"] = fx_samples;
            j["n"] = fx_n;
            j["e_u"] = c.e_u;
            j["e_u2"] = c.e_u2;
            j["mu"] = c.mu;
            j["sigma_sq"] = c.sigma_sq;
            j["expected_mu"] = 0.0;
            j["expected_e_u2"] = (5.0 + 3.0 * std::sin(static_cast<double>(fx_n))) /
                                 (12.0 + 6.0 * std::sin(static_cast<double>(fx_n)));
        } else {
            throw std::invalid_argument("unknown fixture kind: " + fx_kind);
        }
        emit(fx_out, j.dump(2));
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}}.dump() << std::endl;
        return 1;
    }
}
