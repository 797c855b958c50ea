// Python surface: graphs, the posterior and TopX primitives, and whole runs.
// Structured inputs and outputs cross the boundary as JSON-compatible dicts.

#include "crowdcheck/config.hpp"
#include "crowdcheck/experiments.hpp"
#include "crowdcheck/graph.hpp"
#include "crowdcheck/inference.hpp"
#include "crowdcheck/protocol.hpp"
#include "crowdcheck/selection.hpp"
#include "crowdcheck/usermodel.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace crowdcheck;
using nlohmann::json;

namespace {

json to_json_value(const py::handle& obj) {
    py::module_ pyjson = py::module_::import("json");
    return json::parse(pyjson.attr("dumps")(obj).cast<std::string>());
}

py::object to_python(const json& j) {
    py::module_ pyjson = py::module_::import("json");
    return pyjson.attr("loads")(j.dump());
}

// pybind11 holders cannot be shared_ptr<const T>; the library takes const views.
using GraphPtr = std::shared_ptr<SocialGraph>;

py::dict run_simulation_py(const GraphPtr& graph, const py::dict& world, const std::string& policy,
                           std::uint64_t seed) {
    const WorldConfig cfg = world_config_from_json(to_json_value(world));
    RunTrace trace;
    {
        py::gil_scoped_release release;
        trace = run_simulation(graph, cfg, parse_policy_kind(policy), seed);
    }
    json out = to_json(trace);
    json histories = json::array();
    for (const auto& h : trace.final_histories)
        histories.push_back({h.notfake_given_notfake, h.notfake_given_fake, h.fake_given_notfake, h.fake_given_fake});
    out["final_histories"] = histories;
    return to_python(out).cast<py::dict>();
}

py::dict run_experiment_py(const py::dict& config, const GraphPtr& graph, unsigned jobs) {
    json doc = to_json_value(config);
    const RunConfig rc = run_config_from_json(doc);
    AggregateResult r;
    {
        py::gil_scoped_release release;
        r = run_experiment(rc.experiment, graph, jobs);
    }
    json rows = json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"policy", to_string(row.policy)},
                        {"grid", row.grid},
                        {"seed", row.seed},
                        {"epoch", row.epoch},
                        {"util_cum", row.util_cum},
                        {"util_avg", row.util_avg},
                        {"util_norm", row.util_norm},
                        {"normalized", row.normalized}});
    json final_points = json::array();
    for (PolicyKind p : r.spec.policies)
        for (double g : r.spec.resolved_grid())
            if (const auto* pt = r.final_point(p, g))
                final_points.push_back({{"policy", to_string(p)},
                                        {"grid", g},
                                        {"util_norm_mean", pt->util_norm.mean},
                                        {"util_norm_std", pt->util_norm.std}});
    json regret_rows = json::array();
    for (const auto& row : r.regret_rows)
        regret_rows.push_back(
            {{"policy", to_string(row.policy)}, {"seed", row.seed}, {"epoch", row.epoch}, {"regret", row.regret}});
    return to_python({{"experiment", to_string(r.spec.kind)},
                      {"rows", rows},
                      {"final", final_points},
                      {"regret", regret_rows}})
        .cast<py::dict>();
}

}  // namespace

PYBIND11_MODULE(_crowdcheck, m) {
    m.doc() = "Crowd-flag fake news detection simulator";

    py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

    py::class_<SocialGraph, GraphPtr>(m, "Graph")
        .def_static(
            "from_edges",
            [](std::size_t n, const std::vector<std::pair<UserId, UserId>>& edges) {
                return std::make_shared<SocialGraph>(SocialGraph::from_edges(n, edges));
            },
            py::arg("node_count"), py::arg("edges"))
        .def_static(
            "load",
            [](const std::string& path) {
                return std::make_shared<SocialGraph>(load_edge_list_file(path).graph);
            },
            py::arg("path"), "Load a SNAP edge list.")
        .def_static(
            "synthetic",
            [](const std::string& kind, std::size_t n, double edge_prob, std::uint64_t seed) {
                return std::make_shared<SocialGraph>(synthetic_graph(parse_synthetic_kind(kind), n, edge_prob, seed));
            },
            py::arg("kind"), py::arg("n"), py::arg("edge_prob") = 0.0, py::arg("seed") = 0)
        .def_property_readonly("node_count", &SocialGraph::node_count)
        .def_property_readonly("edge_count", &SocialGraph::edge_count)
        .def("neighbors",
             [](const SocialGraph& g, UserId u) {
                 auto s = g.neighbors(u);
                 return std::vector<UserId>(s.begin(), s.end());
             })
        .def("degree", &SocialGraph::degree)
        .def("has_edge", &SocialGraph::has_edge)
        .def("to_edge_list", &SocialGraph::to_edge_list)
        .def("__repr__", [](const SocialGraph& g) {
            return "<Graph nodes=" + std::to_string(g.node_count()) + " edges=" + std::to_string(g.edge_count()) + ">";
        });

    m.def(
        "flagging_params",
        [](double alpha, double beta, double gamma) {
            const auto p = flagging_params(UserProfile{alpha, beta, gamma});
            return std::make_pair(p.theta_notfake, p.theta_fake);
        },
        py::arg("alpha"), py::arg("beta"), py::arg("gamma") = 0.0,
        "(theta_notfake, theta_fake) of a user profile.");

    m.def(
        "news_fake_posterior",
        [](double omega, const std::vector<std::pair<double, double>>& params, const std::vector<UserId>& exposed,
           const std::vector<UserId>& flaggers, UserId source) {
            std::vector<FlaggingParams> p;
            p.reserve(params.size());
            for (auto [nf, f] : params) p.push_back({nf, f});
            return news_fake_posterior(omega, p, exposed, flaggers, source);
        },
        py::arg("omega"), py::arg("params"), py::arg("exposed"), py::arg("flaggers"), py::arg("source"),
        "P(fake | flags); params[u] = (theta_notfake, theta_fake).");

    m.def(
        "topx",
        [](const std::vector<std::tuple<NewsId, double, std::size_t>>& candidates, std::size_t k, std::uint64_t seed) {
            std::vector<Candidate> c;
            for (auto [id, p, v] : candidates) c.push_back({id, p, v});
            Rng rng(seed);
            return topx(c, k, rng);
        },
        py::arg("candidates"), py::arg("k"), py::arg("seed") = 0,
        "Ids of the k (id, prob_fake, value) candidates with the largest prob_fake * value.");

    m.def("run_simulation", &run_simulation_py, py::arg("graph"), py::arg("world") = py::dict(),
          py::arg("policy") = "detective", py::arg("seed") = 1,
          "One policy on one world; world is a dict of WorldConfig overrides. Returns the trace.");

    m.def("run_experiment", &run_experiment_py, py::arg("config"), py::arg("graph") = GraphPtr{},
          py::arg("jobs") = 1,
          "Runs config['experiment'] with config['world'] as the base world. Returns rows and final means.");

    m.def("policies", [] {
        std::vector<std::string> out;
        for (auto k : all_policy_kinds()) out.push_back(to_string(k));
        return out;
    });
    m.def("version", &version_string);
}
