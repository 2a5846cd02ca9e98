// Python bindings for the core library. Games, schedules, learners and the
// gap computations are exposed directly; protocol runs take the same JSON
// protocol section the CLI reads.

#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mlsf/errors.hpp"
#include "mlsf/experiment.hpp"
#include "mlsf/game.hpp"
#include "mlsf/leader.hpp"
#include "mlsf/metrics.hpp"
#include "mlsf/oracle.hpp"
#include "mlsf/protocols.hpp"
#include "mlsf/schedule.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

py::dict checkpoint_dict(const mlsf::Checkpoint& c) {
  py::dict d;
  d["t"] = c.round;
  d["regret"] = c.regret;
  d["average_regret"] = c.average_regret;
  d["cse_gap_max"] = c.max_gap;
  d["gaps"] = c.gaps;
  d["follower_mispulls"] = c.mispulls;
  if (!c.stage2_regret.empty()) d["stage2_regret"] = c.stage2_regret;
  return d;
}

py::dict trajectory_dict(const mlsf::Trajectory& t) {
  py::dict d;
  d["setting"] = std::string(mlsf::to_string(t.setting));
  d["schedule"] = py::module_::import("json").attr("loads")(
      mlsf::schedule_to_json(t.schedule).dump());
  py::list checkpoints;
  for (const auto& c : t.checkpoints) checkpoints.append(checkpoint_dict(c));
  d["checkpoints"] = checkpoints;
  d["final_regret"] = t.final_regret;
  d["final_gaps"] = t.final_gap.gaps;
  d["final_cse_gap"] = t.final_gap.max_gap;
  d["follower_mispulls"] = t.mispulls;
  d["chi"] = t.chi;
  std::vector<std::vector<double>> strategies;
  for (const auto& s : t.final_strategies) strategies.emplace_back(s.probs().begin(), s.probs().end());
  d["final_strategies"] = strategies;
  if (t.predictor) {
    d["predictor"] = std::vector<std::size_t>(t.predictor->table().begin(), t.predictor->table().end());
    d["misidentified"] = t.misidentified;
  }
  return d;
}

// Parses {"setting": ..., "T": ..., ...} plus optional seed and checkpoints
// through the experiment parser so both front ends accept the same fields.
mlsf::ProtocolConfig protocol_from_json(const mlsf::GameSpec& game, const std::string& text,
                                        std::uint64_t seed,
                                        const std::vector<std::int64_t>& checkpoints) {
  json doc = {{"game", {{"inline", mlsf::game_to_json(game)}}},
              {"protocol", json::parse(text)},
              {"seeds", {seed}}};
  if (!checkpoints.empty()) doc["checkpoints"] = checkpoints;
  auto config = mlsf::parse_experiment(doc);
  config.protocol.seed = seed;
  return config.protocol;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Repeated multi-leader single-follower games";

  auto base = py::register_exception<mlsf::Error>(m, "Error", PyExc_ValueError);
  py::register_exception<mlsf::ValidationError>(m, "ValidationError", base.ptr());
  py::register_exception<mlsf::GenerationError>(m, "GenerationError", base.ptr());
  py::register_exception<mlsf::DomainError>(m, "DomainError", base.ptr());
  py::register_exception<mlsf::CommitError>(m, "CommitError", base.ptr());
  py::register_exception<mlsf::ScheduleError>(m, "ScheduleError", base.ptr());
  py::register_exception<mlsf::CapError>(m, "CapError", base.ptr());
  py::register_exception<mlsf::ConfigError>(m, "ConfigError", base.ptr());

  py::class_<mlsf::GameSpec>(m, "Game")
      .def(py::init<std::size_t, std::size_t, std::size_t, std::vector<double>,
                    std::vector<double>>(),
           py::arg("m"), py::arg("n"), py::arg("n_f"), py::arg("leader_losses"),
           py::arg("follower_losses"),
           "Flat tensors: leader_losses[(i * n^m + a) * n_f + b], follower_losses[a * n_f + b].")
      .def_property_readonly("m", &mlsf::GameSpec::leaders)
      .def_property_readonly("n", &mlsf::GameSpec::actions)
      .def_property_readonly("n_f", &mlsf::GameSpec::follower_actions)
      .def_property_readonly("joint_size", &mlsf::GameSpec::joint_size)
      .def("leader_loss", &mlsf::GameSpec::leader_loss, py::arg("leader"), py::arg("joint"),
           py::arg("response"))
      .def("follower_loss", &mlsf::GameSpec::follower_loss, py::arg("joint"), py::arg("response"))
      .def("best_response", &mlsf::GameSpec::best_response, py::arg("joint"))
      .def("composed_loss", &mlsf::GameSpec::composed_loss, py::arg("leader"), py::arg("joint"))
      .def("encode",
           [](const mlsf::GameSpec& g, const std::vector<std::size_t>& coords) {
             if (coords.size() != g.leaders()) throw mlsf::ValidationError("encode: wrong arity");
             for (auto c : coords) {
               if (c >= g.actions()) throw mlsf::ValidationError("encode: action out of range");
             }
             return g.indexer().encode(coords);
           })
      .def("decode",
           [](const mlsf::GameSpec& g, std::size_t joint) {
             if (joint >= g.joint_size()) throw mlsf::ValidationError("decode: index out of range");
             return g.indexer().decode(joint);
           })
      .def("to_json", [](const mlsf::GameSpec& g) { return mlsf::game_to_json(g).dump(); })
      .def_static("from_json", [](const std::string& text) {
        try {
          return mlsf::game_from_json(json::parse(text));
        } catch (const json::parse_error& e) {
          throw mlsf::ValidationError(e.what());
        }
      })
      .def(py::self == py::self)
      .def("__repr__", [](const mlsf::GameSpec& g) {
        return "Game(m=" + std::to_string(g.leaders()) + ", n=" + std::to_string(g.actions()) +
               ", n_f=" + std::to_string(g.follower_actions()) + ")";
      });

  m.def("generate_game", &mlsf::generate_game, py::arg("m"), py::arg("n"), py::arg("n_f"),
        py::arg("epsilon_floor"), py::arg("seed"), py::arg("budget") = 10000);

  m.def(
      "gap_profile",
      [](const mlsf::GameSpec& g) {
        const auto p = mlsf::gap_profile(g);
        py::dict d;
        std::vector<std::vector<double>> delta(g.joint_size());
        for (std::size_t a = 0; a < g.joint_size(); ++a) {
          for (std::size_t k = 0; k < g.follower_actions(); ++k) delta[a].push_back(p.gap(a, k));
        }
        d["delta"] = delta;
        d["epsilon_min"] = p.epsilon_min;
        d["hardness"] = p.hardness;
        d["max_hardness"] = p.max_hardness();
        return d;
      },
      py::arg("game"));

  m.def(
      "hedge_update",
      [](std::vector<double> weights, double eta, const std::vector<double>& loss) {
        return mlsf::hedge_update({std::move(weights), eta}, loss).weights;
      },
      py::arg("weights"), py::arg("eta"), py::arg("loss"),
      "One exponential-weights step; returns the renormalized weights.");
  m.def(
      "exp3_update",
      [](std::vector<double> weights, double eta, std::size_t played, double loss, double prob) {
        return mlsf::exp3_update({std::move(weights), eta, 0.0}, played, loss, prob).weights;
      },
      py::arg("weights"), py::arg("eta"), py::arg("played"), py::arg("observed_loss"),
      py::arg("prob_played"));
  m.def("importance_estimate", &mlsf::importance_estimate, py::arg("n"), py::arg("played"),
        py::arg("observed_loss"), py::arg("prob_played"));
  m.def(
      "mix_exploration",
      [](const std::vector<double>& probs, double alpha) {
        const auto mixed = mlsf::mix_exploration(mlsf::MixedStrategy(probs), alpha);
        return std::vector<double>(mixed.probs().begin(), mixed.probs().end());
      },
      py::arg("probs"), py::arg("alpha"));

  auto sched = m.def_submodule("schedule", "Closed-form parameter schedules");
  sched.def("hedge_eta", &mlsf::schedule::hedge_eta, py::arg("T"), py::arg("n"));
  sched.def("exp3_eta", &mlsf::schedule::exp3_eta, py::arg("T"), py::arg("n"));
  sched.def(
      "alpha_exp3",
      [](std::int64_t T, std::size_t n, std::size_t m) {
        const auto r = mlsf::schedule::alpha_exp3(T, n, m);
        py::dict d;
        d["alpha"] = r.alpha;
        d["raw_alpha"] = r.raw_alpha;
        d["eta"] = r.eta;
        return d;
      },
      py::arg("T"), py::arg("n"), py::arg("m"));
  sched.def("commit_budget", &mlsf::schedule::commit_budget, py::arg("p"), py::arg("H"),
            py::arg("m"), py::arg("n"), py::arg("n_f"));
  sched.def("ucbe_exploration", &mlsf::schedule::ucbe_exploration, py::arg("q"), py::arg("n_f"),
            py::arg("H"));
  sched.def("commit_round", &mlsf::schedule::commit_round, py::arg("q"), py::arg("n"),
            py::arg("m"));

  m.def(
      "cse_gap",
      [](const mlsf::GameSpec& g, const std::vector<double>& chi) {
        if (chi.size() != g.joint_size()) throw mlsf::ValidationError("chi: wrong length");
        const auto gap = mlsf::cse_gap(g, chi);
        return py::make_tuple(gap.gaps, gap.max_gap);
      },
      py::arg("game"), py::arg("chi"), "Returns (per-leader gaps, max gap).");
  m.def(
      "enumerate_swap_gap",
      [](const mlsf::GameSpec& g, const std::vector<double>& chi, std::size_t leader) {
        if (chi.size() != g.joint_size()) throw mlsf::ValidationError("chi: wrong length");
        if (leader >= g.leaders()) throw mlsf::ValidationError("leader out of range");
        return mlsf::oracle::enumerate_swap_gap(g, chi, leader);
      },
      py::arg("game"), py::arg("chi"), py::arg("leader"));
  m.def(
      "expected_loss_vector",
      [](const mlsf::GameSpec& g, std::size_t leader,
         const std::vector<std::vector<double>>& strategies) {
        std::vector<mlsf::MixedStrategy> s;
        for (const auto& p : strategies) s.emplace_back(p);
        if (s.size() != g.leaders() || leader >= g.leaders()) {
          throw mlsf::ValidationError("expected_loss_vector: one strategy per leader");
        }
        return mlsf::expected_loss_vector(g, leader, s);
      },
      py::arg("game"), py::arg("leader"), py::arg("strategies"));

  m.def(
      "_run_protocol",
      [](const mlsf::GameSpec& g, const std::string& protocol, std::uint64_t seed,
         const std::vector<std::int64_t>& checkpoints) {
        const auto config = protocol_from_json(g, protocol, seed, checkpoints);
        mlsf::Trajectory t;
        {
          py::gil_scoped_release release;
          t = mlsf::run_protocol(g, config);
        }
        return trajectory_dict(t);
      },
      py::arg("game"), py::arg("protocol"), py::arg("seed"), py::arg("checkpoints"));

  m.def(
      "_run_experiment",
      [](const std::string& text, const std::string& out, std::size_t threads) {
        mlsf::ExperimentConfig config;
        try {
          config = mlsf::parse_experiment(json::parse(text));
        } catch (const json::parse_error& e) {
          throw mlsf::ConfigError(e.what());
        }
        if (!out.empty()) config.output_dir = out;
        {
          py::gil_scoped_release release;
          mlsf::run_experiment(config, threads);
        }
        return (config.output_dir / "summary.json").string();
      },
      py::arg("config"), py::arg("out"), py::arg("threads"));

  m.attr("build_id") = mlsf::build_id();
}
