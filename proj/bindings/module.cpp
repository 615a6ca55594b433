#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "stratmap/map_io.hpp"
#include "stratmap/metrics.hpp"
#include "stratmap/runner.hpp"

namespace py = pybind11;
using namespace stratmap;

namespace {

Milestone make_milestone(const std::string& id, const std::string& description,
                         const std::vector<std::string>& key_actions,
                         const std::vector<std::string>& deps, const std::string& pitfalls) {
    Milestone m;
    m.id = id;
    m.description = description;
    m.key_actions = key_actions;
    m.deps = std::set<MilestoneId>(deps.begin(), deps.end());
    m.pitfalls = pitfalls;
    return m;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "strategy-map exploration engine";

    py::register_exception<SchemaViolation>(m, "SchemaViolation");
    py::register_exception<UnknownMilestone>(m, "UnknownMilestone");
    py::register_exception<ConfigError>(m, "ConfigErrorException");
    py::register_exception<BadK>(m, "BadKError");

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t>(), py::arg("seed"))
        .def("uniform", &RngStream::uniform)
        .def("uniform_index", &RngStream::uniform_index, py::arg("n"))
        .def("normal", &RngStream::normal);

    py::class_<MilestoneStats>(m, "MilestoneStats")
        .def(py::init<>())
        .def_readwrite("n", &MilestoneStats::n)
        .def_readwrite("mean_reward", &MilestoneStats::mean_reward)
        .def_readwrite("m2", &MilestoneStats::m2)
        .def("record", &MilestoneStats::record, py::arg("credit"))
        .def("variance", [](const MilestoneStats& st) -> py::object {
            if (auto var = st.variance()) return py::float_(*var);
            return py::none();
        });

    py::class_<Milestone>(m, "Milestone")
        .def(py::init(&make_milestone), py::arg("id"), py::arg("description") = "",
             py::arg("key_actions") = std::vector<std::string>{},
             py::arg("deps") = std::vector<std::string>{}, py::arg("pitfalls") = "")
        .def_readonly("id", &Milestone::id)
        .def_readonly("description", &Milestone::description)
        .def_readonly("key_actions", &Milestone::key_actions)
        .def_property_readonly("deps",
                               [](const Milestone& milestone) {
                                   return std::vector<MilestoneId>(milestone.deps.begin(),
                                                                   milestone.deps.end());
                               })
        .def_readonly("pitfalls", &Milestone::pitfalls)
        .def_readonly("guidance", &Milestone::guidance);

    py::class_<AbstractState>(m, "AbstractState")
        .def_static("initial", &AbstractState::initial, py::arg("root"))
        .def_readwrite("achieved", &AbstractState::achieved)
        .def_readwrite("failed_or_skipped", &AbstractState::failed_or_skipped);

    py::class_<ApplyResult>(m, "ApplyResult")
        .def_readonly("accepted", &ApplyResult::accepted)
        .def_property_readonly("reason",
                               [](const ApplyResult& r) { return to_string(r.reason); })
        .def_readonly("detail", &ApplyResult::detail)
        .def("__bool__", [](const ApplyResult& r) { return r.accepted; });

    py::class_<EditOp>(m, "EditOp")
        .def_static(
            "add_child",
            [](const Milestone& milestone) { return EditOp::add_child(milestone); },
            py::arg("milestone"))
        .def_static(
            "add_branch",
            [](const Milestone& milestone) { return EditOp::add_branch(milestone); },
            py::arg("milestone"))
        .def_static("update_deps",
                    [](const std::string& target, const std::vector<std::string>& deps) {
                        return EditOp::update_deps(
                            target, std::set<MilestoneId>(deps.begin(), deps.end()));
                    })
        .def_static("prune", &EditOp::prune, py::arg("target"))
        .def_static("update_node",
                    [](const std::string& target, py::object description, py::object key_actions,
                       py::object pitfalls, py::object guidance) {
                        EditOp op;
                        op.kind = EditOpKind::update_node;
                        op.target = target;
                        if (!description.is_none())
                            op.description = description.cast<std::string>();
                        if (!key_actions.is_none())
                            op.key_actions = key_actions.cast<std::vector<std::string>>();
                        if (!pitfalls.is_none()) op.pitfalls = pitfalls.cast<std::string>();
                        if (!guidance.is_none()) op.guidance = guidance.cast<std::string>();
                        return op;
                    },
                    py::arg("target"), py::arg("description") = py::none(),
                    py::arg("key_actions") = py::none(), py::arg("pitfalls") = py::none(),
                    py::arg("guidance") = py::none());

    py::class_<StrategyMap>(m, "StrategyMap")
        .def(py::init<>())
        .def(py::init<MilestoneId>(), py::arg("root_id"))
        .def_property_readonly("root", &StrategyMap::root)
        .def("__len__", &StrategyMap::size)
        .def("__contains__", &StrategyMap::contains)
        .def("ids", &StrategyMap::ids)
        .def("edges", &StrategyMap::edges)
        .def("successors", &StrategyMap::successors, py::arg("id"))
        .def("milestone", &StrategyMap::milestone, py::arg("id"),
             py::return_value_policy::reference_internal)
        .def("stats", py::overload_cast<const MilestoneId&>(&StrategyMap::stats),
             py::arg("id"), py::return_value_policy::reference_internal)
        .def("apply", &StrategyMap::apply, py::arg("op"))
        .def("eligible",
             [](const StrategyMap& map, const AbstractState& state, bool flat) {
                 return map.eligible(state, flat ? DepsView::flat_list : DepsView::dag);
             },
             py::arg("state"), py::arg("flat") = false)
        .def("topological_order", &StrategyMap::topological_order)
        .def("validate", &StrategyMap::validate)
        .def("to_string", [](const StrategyMap& map) { return map_to_string(map); })
        .def_static("from_string", &map_from_string, py::arg("text"))
        .def("save", &save_map, py::arg("path"))
        .def_static("load", &load_map, py::arg("path"));

    py::class_<SelectionPolicy>(m, "SelectionPolicy")
        .def(py::init([](const std::string& kind, double c, double epsilon, double sigma_prior,
                         double sigma_min) {
                 SelectionPolicy policy;
                 policy.kind = policy_kind_from_string(kind);
                 policy.c = c;
                 policy.epsilon = epsilon;
                 policy.sigma_prior = sigma_prior;
                 policy.sigma_min = sigma_min;
                 policy.validate();
                 return policy;
             }),
             py::arg("kind") = "thompson", py::arg("c") = 10.0, py::arg("epsilon") = 0.1,
             py::arg("sigma_prior") = 100.0, py::arg("sigma_min") = 1.0)
        .def_readwrite("c", &SelectionPolicy::c)
        .def_readwrite("epsilon", &SelectionPolicy::epsilon)
        .def_readwrite("sigma_prior", &SelectionPolicy::sigma_prior)
        .def_readwrite("sigma_min", &SelectionPolicy::sigma_min);

    m.def("thompson_sigma", &thompson_sigma, py::arg("stats"), py::arg("policy"));
    m.def("thompson_score", &thompson_score, py::arg("stats"), py::arg("policy"), py::arg("rng"));
    m.def("ucb_score", &ucb_score, py::arg("stats"), py::arg("total_eligible_visits"),
          py::arg("policy"));
    m.def(
        "select_next",
        [](const StrategyMap& map, const AbstractState& state, const SelectionPolicy& policy,
           RngStream& rng, bool flat) -> py::object {
            const auto choice =
                select_next(map, state, policy, rng, flat ? DepsView::flat_list : DepsView::dag);
            if (choice) return py::str(*choice);
            return py::none();
        },
        py::arg("map"), py::arg("state"), py::arg("policy"), py::arg("rng"),
        py::arg("flat") = false);

    py::class_<AttributedRewards>(m, "AttributedRewards")
        .def(py::init([](int episode, const std::map<std::string, double>& rewards,
                         const std::vector<std::string>& attempted) {
                 AttributedRewards out;
                 out.episode_index = episode;
                 out.rewards = std::map<MilestoneId, double>(rewards.begin(), rewards.end());
                 out.attempted = attempted;
                 out.validate();
                 return out;
             }),
             py::arg("episode_index"), py::arg("rewards"), py::arg("attempted"))
        .def_readonly("rewards", &AttributedRewards::rewards)
        .def_readonly("attempted", &AttributedRewards::attempted);

    py::class_<CreditAssignment>(m, "CreditAssignment")
        .def_readonly("episode_index", &CreditAssignment::episode_index)
        .def_readonly("gamma", &CreditAssignment::gamma)
        .def_readonly("credits", &CreditAssignment::credits);

    m.def("compute_credits_dag", &compute_credits_dag, py::arg("map"), py::arg("attributed"),
          py::arg("gamma"));
    m.def("compute_credits_sequential", &compute_credits_sequential, py::arg("attributed"),
          py::arg("gamma"));
    m.def("update_stats", &update_stats, py::arg("map"), py::arg("credits"));

    m.def("final_k",
          [](const std::vector<double>& scores, int k) {
              return final_k(std::span<const double>(scores.data(), scores.size()), k);
          },
          py::arg("scores"), py::arg("k"));
    m.def("coverage_entropy", &coverage_entropy, py::arg("heatmap"));
    m.def("compare_policies",
          [](const std::map<std::string, std::vector<double>>& reports) {
              py::list out;
              for (const auto& summary : compare_policies(reports)) {
                  out.append(py::make_tuple(summary.policy, summary.mean, summary.stddev));
              }
              return out;
          },
          py::arg("final_k_per_policy"));

    m.def(
        "run_experiment",
        [](const std::string& config_text, const std::string& out_dir) {
            RunConfig config = parse_run_config(config_text);
            if (!out_dir.empty()) config.out_dir = out_dir;
            const RunOutputs outputs = run_experiment(config);
            py::dict report;
            report["final_k_mean"] = outputs.report.final_k_mean;
            report["final_k_stddev"] = outputs.report.final_k_stddev;
            py::list seeds;
            for (const auto& seed : outputs.report.seeds) {
                py::dict entry;
                entry["seed"] = seed.seed;
                entry["scores"] = seed.episode_scores;
                entry["final_k"] = seed.final_k_value;
                if (seed.coverage_entropy) entry["coverage_entropy"] = *seed.coverage_entropy;
                entry["reward_cells_reached"] = seed.reward_cells_reached;
                entry["proposer_calls"] = seed.proposer_calls;
                seeds.append(entry);
            }
            report["seeds"] = seeds;
            return report;
        },
        py::arg("config_text"), py::arg("out_dir") = "",
        "Run a full experiment from configuration text; returns the report.");

    m.attr("__version__") = "0.1.0";
}
