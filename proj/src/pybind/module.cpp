#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <stdexcept>
#include <vector>

#include "rankhc/calibration.hpp"
#include "rankhc/comparators.hpp"
#include "rankhc/parallel.hpp"
#include "rankhc/simgen.hpp"
#include "rankhc/theory.hpp"

namespace py = pybind11;
using namespace rankhc;

namespace {

ObservationMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw std::invalid_argument("empty panel");
    const std::size_t n = rows.size();
    const std::size_t t = rows.front().size();
    std::vector<double> values;
    values.reserve(n * t);
    for (const auto& row : rows) {
        if (row.size() != t)
            throw std::invalid_argument("ragged panel: rows differ in length");
        values.insert(values.end(), row.begin(), row.end());
    }
    return ObservationMatrix(n, t, std::move(values));
}

py::dict to_dict(const TestResult& res) {
    py::dict d;
    d["statistic"] = res.profile.statistic;
    d["p_value"] = res.p_value;
    d["method"] = method_name(res.method);
    d["seed"] = res.seed.value;
    d["calibration_samples"] = res.calibration_samples;
    py::list per_q;
    for (const HcPoint& pt : res.profile.per_q) {
        py::dict e;
        e["q"] = pt.q;
        e["z"] = pt.z;
        e["N"] = pt.count;
        e["p"] = pt.p;
        e["V"] = pt.v;
        per_q.append(e);
    }
    d["per_q"] = per_q;
    if (res.subject_p) d["subject_p"] = *res.subject_p;
    return d;
}

GridKind parse_grid(const std::string& kind) {
    if (kind == "standard") return GridKind::Standard;
    if (kind == "extended") return GridKind::Extended;
    throw std::invalid_argument("unknown grid kind: " + kind);
}

OracleNullSpec parse_oracle(const std::string& family) {
    if (family == "normal") return oracle_normal();
    if (family == "uniform") return oracle_uniform();
    if (family == "exponential") return oracle_exponential();
    if (family == "cauchy") return oracle_cauchy();
    throw std::invalid_argument("unknown oracle family: " + family);
}

}  // namespace

PYBIND11_MODULE(_rankhc, m) {
    m.doc() = "Rank-based sparse anomaly detection across referentials";

    py::class_<NullTable>(m, "NullTable")
        .def_readonly("n", &NullTable::n)
        .def_readonly("t", &NullTable::t)
        .def_readonly("mc_pq", &NullTable::mc_pq)
        .def_readonly("mc_t", &NullTable::mc_t)
        .def_property_readonly(
            "seed", [](const NullTable& t) { return t.seed.value; })
        .def_property_readonly(
            "k_n", [](const NullTable& t) { return t.grid.k_n; })
        .def_property_readonly(
            "pq", [](const NullTable& t) { return t.pq; });

    m.def(
        "tabulate",
        [](std::size_t n, std::size_t t, std::size_t mc_pq, std::size_t mc_t,
           std::uint64_t seed, const std::string& grid, int k_n) {
            return tabulate_null(n, t, make_grid(parse_grid(grid), n, t, k_n),
                                 mc_pq, mc_t, RngSeed{seed});
        },
        py::arg("n"), py::arg("t"), py::arg("mc_pq"), py::arg("mc_t"),
        py::arg("seed"), py::arg("grid") = "extended", py::arg("k_n") = 0,
        py::call_guard<py::gil_scoped_release>());

    m.def("save_table", [](const NullTable& t, const std::string& path) {
        save_table(t, path);
    });
    m.def("load_table", [](const std::string& path) { return load_table(path); });

    m.def(
        "test_random_ties",
        [](const std::vector<std::vector<double>>& rows, const NullTable& table,
           std::uint64_t seed, bool subjects) {
            return to_dict(test_random_ties(to_matrix(rows), table,
                                            RngSeed{seed}, {subjects, 20000}));
        },
        py::arg("rows"), py::arg("table"), py::arg("seed"),
        py::arg("subjects") = false);

    m.def(
        "test_midrank_permutation",
        [](const std::vector<std::vector<double>>& rows, std::size_t B,
           std::uint64_t seed, const std::string& grid, int k_n,
           bool subjects) {
            const ObservationMatrix mat = to_matrix(rows);
            const GridSpec g =
                make_grid(parse_grid(grid), mat.n(), mat.t(), k_n);
            return to_dict(test_midrank_permutation(mat, g, B, RngSeed{seed},
                                                    {subjects, 20000}));
        },
        py::arg("rows"), py::arg("permutations"), py::arg("seed"),
        py::arg("grid") = "extended", py::arg("k_n") = 0,
        py::arg("subjects") = false);

    m.def(
        "test_midrank_naive",
        [](const std::vector<std::vector<double>>& rows, const NullTable& table,
           std::uint64_t seed) {
            return to_dict(
                test_midrank_naive(to_matrix(rows), table, RngSeed{seed}));
        },
        py::arg("rows"), py::arg("table"), py::arg("seed"));

    m.def(
        "friedman_test",
        [](const std::vector<std::vector<double>>& rows, std::size_t mc,
           std::uint64_t seed) {
            return to_dict(friedman_test(to_matrix(rows), mc, RngSeed{seed}));
        },
        py::arg("rows"), py::arg("mc"), py::arg("seed"));

    m.def(
        "dist_aware_hc",
        [](const std::vector<std::vector<double>>& rows,
           const std::string& family, std::size_t mc, std::uint64_t seed,
           int k_n) {
            return to_dict(dist_aware_hc(to_matrix(rows), parse_oracle(family),
                                         k_n, mc, RngSeed{seed}));
        },
        py::arg("rows"), py::arg("family"), py::arg("mc"), py::arg("seed"),
        py::arg("k_n") = 0);

    m.def(
        "raw_permutation_hc",
        [](const std::vector<std::vector<double>>& rows, std::size_t B,
           std::uint64_t seed, int k_n) {
            return to_dict(
                raw_permutation_hc(to_matrix(rows), k_n, B, RngSeed{seed}));
        },
        py::arg("rows"), py::arg("permutations"), py::arg("seed"),
        py::arg("k_n") = 0);

    m.def("rho", &theory::rho, py::arg("beta"), py::arg("sigma"));
    m.def("rho_tilde", &theory::rho_tilde, py::arg("beta"), py::arg("sigma"));
    m.def("xi_sigma", &theory::xi_sigma, py::arg("sigma"));
    m.def(
        "upsilon0",
        [](const std::string& family) {
            if (family == "uniform")
                return theory::upsilon0_closed_form(theory::ExpFamily::Uniform);
            if (family == "exponential")
                return theory::upsilon0_closed_form(
                    theory::ExpFamily::Exponential);
            if (family == "normal")
                return theory::upsilon0_closed_form(theory::ExpFamily::Normal);
            throw std::invalid_argument("unknown family: " + family);
        },
        py::arg("family"));
    m.def(
        "theta_tau",
        [](const std::string& setting, double tau, double beta, std::size_t n,
           std::size_t t, double sigma) {
            return theory::theta_tau(simgen::parse_family(setting), tau, beta,
                                     n, t, sigma);
        },
        py::arg("setting"), py::arg("tau"), py::arg("beta"), py::arg("n"),
        py::arg("t"), py::arg("sigma") = 1.0);

    m.def(
        "generate",
        [](const std::string& setting, double tau, double beta, std::size_t n,
           std::size_t t, std::uint64_t seed, double sigma) {
            simgen::SignalSpec spec;
            spec.setting = simgen::parse_family(setting);
            spec.tau = tau;
            spec.beta = beta;
            spec.n = n;
            spec.t = t;
            spec.sigma = sigma;
            const ObservationMatrix mat = simgen::generate(spec, RngSeed{seed});
            std::vector<std::vector<double>> rows(n, std::vector<double>(t));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < t; ++j) rows[i][j] = mat.at(i, j);
            return rows;
        },
        py::arg("setting"), py::arg("tau"), py::arg("beta"), py::arg("n"),
        py::arg("t"), py::arg("seed"), py::arg("sigma") = 1.0);

    m.def(
        "two_outcome_fixture",
        [](std::size_t n, std::size_t s) {
            const simgen::TwoOutcomeFixture fx = simgen::two_outcome_fixture(n, s);
            py::dict d;
            d["n"] = fx.n;
            d["s"] = fx.s;
            d["q"] = fx.q;
            d["z_q"] = fx.z_q;
            d["sum_var"] = fx.sum_var;
            d["sum_cov"] = fx.sum_cov;
            d["identity_holds"] = fx.identity_holds;
            return d;
        },
        py::arg("n"), py::arg("s"));

    m.def("set_max_threads", &set_max_threads, py::arg("threads"));
}
