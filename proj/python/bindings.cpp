// Copyright 2026 The cluster-teleport Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cluster_teleport/analysis.hpp"
#include "cluster_teleport/cli.hpp"
#include "cluster_teleport/protocols.hpp"

namespace py = pybind11;
namespace ct = cluster_teleport;
using namespace ct::protocols;

namespace {

std::vector<std::complex<double>> amplitudes(const PureState& s) { return s.amplitudes(); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Controlled probabilistic teleportation over a four-qubit cluster channel";

  py::register_exception<AssumptionViolation>(m, "AssumptionViolation", PyExc_ValueError);
  py::register_exception<ct::qcore::InvariantError>(m, "InvariantError", PyExc_ValueError);

  py::class_<InputState>(m, "InputState")
      .def(py::init<Amplitude, Amplitude>(), py::arg("a"), py::arg("b"))
      .def_property_readonly("a", &InputState::a)
      .def_property_readonly("b", &InputState::b);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<Amplitude, Amplitude, Amplitude, Amplitude>(), py::arg("alpha"), py::arg("beta"),
           py::arg("gamma"), py::arg("eta"))
      .def_static("uniform", &ChannelParams::uniform)
      .def_property_readonly("alpha", &ChannelParams::alpha)
      .def_property_readonly("beta", &ChannelParams::beta)
      .def_property_readonly("gamma", &ChannelParams::gamma)
      .def_property_readonly("eta", &ChannelParams::eta)
      .def("phase_aligned", &ChannelParams::phase_aligned)
      .def("magnitude_ordered", &ChannelParams::magnitude_ordered);

  py::enum_<BellOutcome>(m, "BellOutcome")
      .value("PhiPlus", BellOutcome::PhiPlus)
      .value("PhiMinus", BellOutcome::PhiMinus)
      .value("PsiPlus", BellOutcome::PsiPlus)
      .value("PsiMinus", BellOutcome::PsiMinus);

  py::class_<TeleportResult>(m, "TeleportResult")
      .def_property_readonly("status", [](const TeleportResult& r) { return to_string(r.status); })
      .def_readonly("target_fidelity", &TeleportResult::target_fidelity)
      .def_readonly("sender_fidelity_on_fail", &TeleportResult::sender_fidelity_on_fail)
      .def_readonly("receiver_fail_bit", &TeleportResult::receiver_fail_bit)
      .def_property_readonly("transcript_json",
                             [](const TeleportResult& r) { return r.transcript.to_json().dump(); });

  m.def("proposed_teleport", &proposed_teleport, py::arg("zeta"), py::arg("channel"), py::arg("seed"));
  m.def(
      "ramirez_teleport",
      [](const InputState& z, const ChannelParams& p, std::uint64_t seed, std::optional<double> rho) {
        return ramirez_teleport(z, p, seed, {rho});
      },
      py::arg("zeta"), py::arg("channel"), py::arg("seed"), py::arg("rho") = py::none());

  m.def(
      "table1_outcome",
      [](BellOutcome alice, BellOutcome bob, const ChannelParams& p) {
        const auto b = table1_outcome(alice, bob, p);
        return py::dict(py::arg("pre_correction") = to_string(b.pre_correction), py::arg("delta0") = b.delta0,
                        py::arg("delta1") = b.delta1);
      },
      py::arg("alice"), py::arg("bob"), py::arg("channel"));
  m.def(
      "table2_branch",
      [](BellOutcome bob, const ChannelParams& p) {
        const auto b = table2_branch(bob, p);
        return py::dict(py::arg("prob") = b.prob, py::arg("u") = b.u, py::arg("v") = b.v,
                        py::arg("tau_form") = to_string(b.tau_form), py::arg("n_hat") = b.n_hat,
                        py::arg("tau_state") = amplitudes(tau_state(b)));
      },
      py::arg("bob"), py::arg("channel"));
  m.def(
      "make_povm",
      [](double d0, double d1, double rho) {
        const auto cfg = make_povm(d0, d1, rho);
        return py::dict(py::arg("varsigma") = cfg.varsigma, py::arg("rho") = cfg.rho,
                        py::arg("rho_min") = cfg.rho_min, py::arg("m1") = cfg.m1, py::arg("m2") = cfg.m2);
      },
      py::arg("delta0"), py::arg("delta1"), py::arg("rho"));
  m.def(
      "critique_density_matrix",
      [](const InputState& z, const ChannelParams& p) {
        const auto r = critique_density_matrix(z, p);
        return py::dict(py::arg("p1") = r.p1, py::arg("p2") = r.p2, py::arg("max_deviation") = r.max_deviation,
                        py::arg("max_off_diagonal") = r.max_off_diagonal);
      },
      py::arg("zeta"), py::arg("channel"));

  m.def("success_probability", &ct::analysis::success_probability, py::arg("channel"));
  m.def("failure_probability", &ct::analysis::failure_probability, py::arg("channel"));
  m.def("geometric_success", &ct::analysis::geometric_success, py::arg("p"), py::arg("n"));
  m.def(
      "monte_carlo_repeat",
      [](const InputState& z, const ChannelParams& p, std::int64_t trials, std::int64_t max_tries,
         std::uint64_t seed, unsigned workers) {
        ct::analysis::RepeatStats s;
        {
          py::gil_scoped_release release;
          s = ct::analysis::monte_carlo_repeat(z, p, trials, max_tries, seed, workers);
        }
        return py::dict(py::arg("trials") = s.trials, py::arg("attempts") = s.attempts,
                        py::arg("successes") = s.successes, py::arg("exhausted") = s.exhausted,
                        py::arg("p_hat") = s.p_hat, py::arg("p_closed") = s.p_closed,
                        py::arg("min_sender_fidelity") = s.min_sender_fidelity,
                        py::arg("histogram") = s.first_success_histogram);
      },
      py::arg("zeta"), py::arg("channel"), py::arg("trials"), py::arg("max_tries"), py::arg("seed"),
      py::arg("workers") = 1);
  m.def(
      "figure2_data",
      [](const std::vector<double>& ps, const std::vector<std::int64_t>& ns) {
        std::vector<std::tuple<double, std::int64_t, double>> rows;
        for (const auto& r : ct::analysis::figure2_data(ps, ns)) rows.emplace_back(r.p, r.n, r.prob);
        return rows;
      },
      py::arg("p_values"), py::arg("n_values"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = ct::cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"));
}
