// Copyright 2026 The mftrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "mftrl/certificates.h"
#include "mftrl/cli.h"
#include "mftrl/dynamics.h"
#include "mftrl/experiment.h"
#include "mftrl/game.h"
#include "mftrl/learner.h"
#include "mftrl/regularizer.h"

namespace py = pybind11;

namespace mftrl {
namespace {

using Vec = std::vector<double>;

StrategyProfile Profile(const Vec& p1, const Vec& p2) {
  return {MixedStrategy(p1), MixedStrategy(p2)};
}

RmdParams Params(const GameMatrix& g, double mu, const std::string& reference) {
  auto [c1, c2] = ResolveReference(reference, g);
  return {g, mu, std::move(c1), std::move(c2)};
}

}  // namespace
}  // namespace mftrl

PYBIND11_MODULE(_core, m) {
  using namespace mftrl;
  m.doc() = "Mutant FTRL self-play and replicator-mutator dynamics.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError",
                                           PyExc_RuntimeError);

  py::class_<GameMatrix>(m, "GameMatrix")
      .def(py::init<std::vector<std::vector<double>>, double>(), py::arg("u1"),
           py::arg("u_max") = -1.0)
      .def_property_readonly("rows", &GameMatrix::rows)
      .def_property_readonly("cols", &GameMatrix::cols)
      .def_property_readonly("u_max", &GameMatrix::u_max)
      .def("u1", &GameMatrix::ToRows)
      .def("__eq__", [](const GameMatrix& a, const GameMatrix& b) {
        return a == b;
      });

  m.def("make_brps", &MakeBiasedRps);
  m.def("make_meq", &MakeMultipleEquilibria);
  m.def("make_random_game", &MakeRandomGame, py::arg("n1"), py::arg("n2"),
        py::arg("seed"));
  m.def("load_game", &LoadGame, py::arg("name_or_path"), py::arg("seed") = 0);

  m.def(
      "expected_value",
      [](const GameMatrix& g, const Vec& p1, const Vec& p2, int player) {
        return ExpectedValue(g, Profile(p1, p2), static_cast<Player>(player));
      },
      py::arg("game"), py::arg("p1"), py::arg("p2"), py::arg("player") = 1);
  m.def(
      "conditional_utilities",
      [](const GameMatrix& g, const Vec& opponent, int player) {
        return ConditionalUtilities(g, MixedStrategy(opponent),
                                    static_cast<Player>(player));
      },
      py::arg("game"), py::arg("opponent"), py::arg("player"));
  m.def(
      "exploitability",
      [](const GameMatrix& g, const Vec& p1, const Vec& p2) {
        return Exploitability(g, Profile(p1, p2));
      },
      py::arg("game"), py::arg("p1"), py::arg("p2"));

  m.def(
      "mirror_argmax",
      [](const std::string& reg, const Vec& z) {
        return MirrorArgmax(ParseRegularizer(reg), z).vector();
      },
      py::arg("regularizer"), py::arg("z"));
  m.def(
      "bregman",
      [](const std::string& reg, const Vec& x, const Vec& y) {
        return Bregman(ParseRegularizer(reg), MixedStrategy(x),
                       MixedStrategy(y));
      },
      py::arg("regularizer"), py::arg("x"), py::arg("y"));
  m.def(
      "kl", [](const Vec& x, const Vec& y) {
        return Kl(MixedStrategy(x), MixedStrategy(y));
      },
      py::arg("x"), py::arg("y"));

  m.def(
      "rmd_field",
      [](const GameMatrix& g, double mu, const Vec& p1, const Vec& p2,
         const std::string& reference) {
        return RmdField(Params(g, mu, reference), Profile(p1, p2));
      },
      py::arg("game"), py::arg("mu"), py::arg("p1"), py::arg("p2"),
      py::arg("reference") = "uniform");
  m.def(
      "integrate_rmd",
      [](const GameMatrix& g, double mu, const Vec& p1, const Vec& p2,
         double t_end, double dt, int keep_every,
         const std::string& reference) {
        py::list out;
        for (const TimedProfile& tp :
             IntegrateRmd(Params(g, mu, reference), Profile(p1, p2), t_end,
                          dt, keep_every)) {
          out.append(py::make_tuple(tp.time, tp.profile.p1.vector(),
                                    tp.profile.p2.vector()));
        }
        return out;
      },
      py::arg("game"), py::arg("mu"), py::arg("p1"), py::arg("p2"),
      py::arg("t_end"), py::arg("dt") = 1e-2, py::arg("keep_every") = 1,
      py::arg("reference") = "uniform");
  m.def(
      "solve_stationary",
      [](const GameMatrix& g, double mu, double tol,
         const std::string& reference) {
        const StationaryPoint sp =
            SolveStationary(Params(g, mu, reference), tol);
        py::dict d;
        d["p1"] = sp.profile.p1.vector();
        d["p2"] = sp.profile.p2.vector();
        d["residual"] = sp.residual;
        d["xi"] = sp.xi;
        d["exploitability"] = Exploitability(g, sp.profile);
        return d;
      },
      py::arg("game"), py::arg("mu"), py::arg("tol") = 1e-12,
      py::arg("reference") = "uniform");

  m.def(
      "run_experiment",
      [](const std::string& config_json) {
        const ExperimentConfig cfg = ExperimentConfig::FromJson(config_json);
        std::vector<SeedResult> results;
        {
          py::gil_scoped_release release;
          results = RunExperiment(cfg);
        }
        py::dict out;
        for (const SeedResult& r : results) {
          py::list rows;
          for (const MetricRow& row : r.metrics.rows) {
            rows.append(py::make_tuple(
                row.iteration, row.exploitability,
                row.kl_to_stationary ? py::cast(*row.kl_to_stationary)
                                     : py::none()));
          }
          out[py::int_(r.seed)] = rows;
        }
        return out;
      },
      py::arg("config_json"),
      "Runs a JSON config; returns {seed: [(iteration, exploitability, "
      "kl_to_stationary or None), ...]}.");
  m.def("config_hash", [](const std::string& config_json) {
    return ExperimentConfig::FromJson(config_json).Hash();
  });

  m.def("certificate_names", &CertificateNames);
  m.def(
      "run_certificate",
      [](const std::string& name) {
        const CertificateResult r = RunCertificate(name);
        py::dict d;
        d["name"] = r.name;
        d["pass"] = r.pass;
        d["observed"] = r.observed;
        d["threshold"] = r.threshold;
        d["detail"] = r.detail;
        return d;
      },
      py::arg("name"));

  m.def(
      "cli_main",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = CliMain(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Returns (exit_code, stdout, stderr).");
}
