// Copyright 2026 The kopkit Authors
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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <array>
#include <sstream>
#include <string>
#include <vector>

#include "kopkit/dubins.h"
#include "kopkit/error.h"
#include "kopkit/kinematics.h"
#include "kopkit/lns.h"
#include "kopkit/orienteering.h"
#include "kopkit/steering_cost.h"

namespace py = pybind11;

namespace kopkit {
namespace {

std::array<KinematicLimits, 2> AxisPair(AxisLimitPolicy policy, double v_max,
                                        double a_max) {
  const KinematicLimits l = PerAxisLimits(policy, v_max, a_max);
  return {l, l};
}

py::array_t<double> MatrixArray(const CostMatrix& m) {
  const auto d = m.dims();
  std::vector<py::ssize_t> shape(d.begin(), d.end());
  py::array_t<double> out(shape);
  std::copy(m.data().begin(), m.data().end(), out.mutable_data());
  return out;
}

CostMatrix MatrixFromArray(
    const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 6 || a.shape(0) != a.shape(3) || a.shape(1) != a.shape(4) ||
      a.shape(2) != a.shape(5)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cost matrix must have shape (N, H, V, N, H, V)");
  }
  CostMatrix m(static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)),
               static_cast<int>(a.shape(2)));
  std::copy(a.data(), a.data() + a.size(), m.mutable_data().begin());
  return m;
}

}  // namespace
}  // namespace kopkit

PYBIND11_MODULE(_core, m) {
  using namespace kopkit;
  m.doc() = "Kinematic orienteering core";

  static py::exception<Error> error(m, "KopkitError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc =
          py::reinterpret_borrow<py::object>(error.ptr())(py::str(e.what()));
      exc.attr("code") = ErrorCodeName(e.code());
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  py::class_<KinematicLimits>(m, "KinematicLimits")
      .def(py::init<double, double, double>(), py::arg("a_max"),
           py::arg("v_min"), py::arg("v_max"))
      .def_static("symmetric", &KinematicLimits::Symmetric, py::arg("a_max"),
                  py::arg("v_max"))
      .def_property_readonly("a_max", &KinematicLimits::a_max)
      .def_property_readonly("v_min", &KinematicLimits::v_min)
      .def_property_readonly("v_max", &KinematicLimits::v_max);

  py::class_<AxisBoundary>(m, "AxisBoundary")
      .def(py::init<double, double, double, double>(), py::arg("p_s"),
           py::arg("v_s"), py::arg("p_e"), py::arg("v_e"))
      .def_readwrite("p_s", &AxisBoundary::p_s)
      .def_readwrite("v_s", &AxisBoundary::v_s)
      .def_readwrite("p_e", &AxisBoundary::p_e)
      .def_readwrite("v_e", &AxisBoundary::v_e);

  py::class_<PatternSolution>(m, "PatternSolution")
      .def_property_readonly(
          "kind", [](const PatternSolution& s) { return PatternKindName(s.kind); })
      .def_readonly("a", &PatternSolution::a)
      .def_readonly("t1", &PatternSolution::t1)
      .def_readonly("t2", &PatternSolution::t2)
      .def_readonly("t3", &PatternSolution::t3)
      .def_readonly("v_c", &PatternSolution::v_c)
      .def_property_readonly("duration", &PatternSolution::duration);

  m.def("axis_time_optimal", &AxisTimeOptimal, py::arg("axis"),
        py::arg("limits"));
  m.def("axis_feasible_at", &AxisFeasibleAt, py::arg("axis"),
        py::arg("limits"), py::arg("duration"));
  m.def("candidate_times", &CandidateTimes, py::arg("axis"),
        py::arg("limits"));
  m.def(
      "optimal_sync_time",
      [](const std::vector<AxisBoundary>& axes,
         const std::vector<KinematicLimits>& limits) {
        const SyncResult r = OptimalSyncTime(axes, limits);
        return py::make_tuple(r.duration, r.per_axis);
      },
      py::arg("axes"), py::arg("limits"),
      "Returns (duration, [PatternSolution per axis]).");

  py::class_<Location>(m, "Location")
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
           py::arg("priority") = 0.0)
      .def_readwrite("x", &Location::x)
      .def_readwrite("y", &Location::y)
      .def_readwrite("priority", &Location::priority);

  py::class_<PoseState>(m, "PoseState")
      .def(py::init<int, int, int>(), py::arg("location"), py::arg("heading"),
           py::arg("speed"))
      .def_readwrite("location", &PoseState::location)
      .def_readwrite("heading", &PoseState::heading)
      .def_readwrite("speed", &PoseState::speed)
      .def("__eq__", [](const PoseState& a, const PoseState& b) { return a == b; })
      .def("__repr__", [](const PoseState& p) {
        std::ostringstream s;
        s << "PoseState(" << p.location << ", " << p.heading << ", "
          << p.speed << ")";
        return s.str();
      });

  py::class_<Discretization>(m, "Discretization")
      .def_static("uniform", &Discretization::Uniform, py::arg("headings"),
                  py::arg("speeds"), py::arg("v_ref"))
      .def_static("with_speeds", &Discretization::WithSpeeds,
                  py::arg("headings"), py::arg("speeds"))
      .def_property_readonly("headings", &Discretization::headings)
      .def_property_readonly("speeds", &Discretization::speeds)
      .def_property_readonly("speed_values", &Discretization::speed_values)
      .def("heading_angle", &Discretization::heading_angle);

  m.def(
      "leg_cost",
      [](const PoseState& from, const PoseState& to,
         const std::vector<Location>& locations, const Discretization& disc,
         double v_max, double a_max, const std::string& policy) {
        return LegCost(from, to, locations, disc,
                       AxisPair(ParseAxisLimitPolicy(policy), v_max, a_max));
      },
      py::arg("from_state"), py::arg("to_state"), py::arg("locations"),
      py::arg("disc"), py::arg("v_max"), py::arg("a_max"),
      py::arg("policy") = "scaled");
  m.def(
      "cost_matrix",
      [](const std::vector<Location>& locations, const Discretization& disc,
         double v_max, double a_max, const std::string& policy) {
        CostMatrix c;
        {
          py::gil_scoped_release release;
          c = BuildCostMatrix(locations, disc, ParseAxisLimitPolicy(policy),
                              v_max, a_max);
        }
        return MatrixArray(c);
      },
      py::arg("locations"), py::arg("disc"), py::arg("v_max"),
      py::arg("a_max"), py::arg("policy") = "scaled",
      "Flight times as an array of shape (N, H, V, N, H, V).");
  m.def(
      "dubins_cost_matrix",
      [](const std::vector<Location>& locations, int headings, double v_const,
         double a_max) {
        return MatrixArray(
            BuildDubinsCostMatrix(locations, headings, v_const, a_max));
      },
      py::arg("locations"), py::arg("headings"), py::arg("v_const"),
      py::arg("a_max"));
  m.def("turning_radius", &TurningRadius, py::arg("v_const"),
        py::arg("a_max"));
  m.def(
      "sample_tour",
      [](const std::vector<PoseState>& tour,
         const std::vector<Location>& locations, const Discretization& disc,
         double v_max, double a_max, const std::string& policy, double dt) {
        const auto samples =
            SampleTour(tour, locations, disc,
                       AxisPair(ParseAxisLimitPolicy(policy), v_max, a_max), dt);
        py::array_t<double> out(
            {static_cast<py::ssize_t>(samples.size()), py::ssize_t{7}});
        auto view = out.mutable_unchecked<2>();
        for (std::size_t i = 0; i < samples.size(); ++i) {
          const auto& s = samples[i];
          const double row[7] = {s.t,           s.position[0], s.position[1],
                                 s.velocity[0], s.velocity[1],
                                 s.acceleration[0], s.acceleration[1]};
          for (int c = 0; c < 7; ++c) view(i, c) = row[c];
        }
        return out;
      },
      py::arg("tour"), py::arg("locations"), py::arg("disc"),
      py::arg("v_max"), py::arg("a_max"), py::arg("policy") = "scaled",
      py::arg("dt") = 0.02,
      "Rows of (t, x, y, vx, vy, ax, ay).");

  py::class_<Instance>(m, "Instance")
      .def(py::init<>())
      .def_readwrite("name", &Instance::name)
      .def_readwrite("locations", &Instance::locations)
      .def_readwrite("budget", &Instance::budget)
      .def("__len__", &Instance::size);
  m.def(
      "parse_instance",
      [](const std::string& text, const std::string& name) {
        return ParseInstance(text, name);
      },
      py::arg("text"), py::arg("name") = "");
  m.def(
      "load_instance",
      [](const std::string& path) { return LoadInstance(path); },
      py::arg("path"));

  py::class_<Solution>(m, "Solution")
      .def_readonly("tour", &Solution::tour)
      .def_readonly("leg_durations", &Solution::leg_durations)
      .def_readonly("total_time", &Solution::total_time)
      .def_readonly("objective", &Solution::objective);

  m.def(
      "evaluate",
      [](const std::vector<PoseState>& tour, const py::array_t<double>& matrix,
         const Instance& instance) {
        return Evaluate(tour, MatrixFromArray(matrix), instance);
      },
      py::arg("tour"), py::arg("matrix"), py::arg("instance"));
  m.def("is_feasible",
        static_cast<bool (*)(const Solution&, const Instance&)>(&IsFeasible), py::arg("solution"), py::arg("instance"));
  m.def(
      "solve_exact",
      [](const Instance& instance, const py::array_t<double>& matrix,
         int max_locations, int max_states) {
        ExactOptions options;
        options.max_locations = max_locations;
        options.max_states = max_states;
        return SolveExact(instance, MatrixFromArray(matrix), options);
      },
      py::arg("instance"), py::arg("matrix"), py::arg("max_locations") = 9,
      py::arg("max_states") = 8);
  m.def(
      "solve_lns",
      [](const Instance& instance, const py::array_t<double>& matrix,
         std::uint64_t seed, int phase1_iters, double phase1_destroy,
         int phase2_iters, double phase2_destroy,
         const std::string& endpoint_opt) {
        LnsConfig config;
        config.seed = seed;
        config.phase1_iters = phase1_iters;
        config.phase1_destroy = phase1_destroy;
        config.phase2_iters = phase2_iters;
        config.phase2_destroy = phase2_destroy;
        config.endpoint_opt = ParseEndpointOpt(endpoint_opt);
        const CostMatrix c = MatrixFromArray(matrix);
        py::gil_scoped_release release;
        return SolveLns(instance, c, config);
      },
      py::arg("instance"), py::arg("matrix"), py::arg("seed") = 0,
      py::arg("phase1_iters") = 100, py::arg("phase1_destroy") = 0.5,
      py::arg("phase2_iters") = 100, py::arg("phase2_destroy") = 0.2,
      py::arg("endpoint_opt") = "neighbors");
  m.def(
      "export_milp",
      [](const Instance& instance, const py::array_t<double>& matrix) {
        return ExportMilp(instance, MatrixFromArray(matrix));
      },
      py::arg("instance"), py::arg("matrix"),
      "The binary program in LP text format.");
}
