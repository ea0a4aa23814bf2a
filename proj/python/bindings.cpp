// Python bindings. Densities cross the boundary as float64 arrays of shape
// (M, G**d); within a level, velocity axis 0 varies fastest.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <algorithm>

#include "smolv/collision.hpp"
#include "smolv/commands.hpp"
#include "smolv/config.hpp"
#include "smolv/diagnostics.hpp"
#include "smolv/integrator.hpp"
#include "smolv/ou_propagator.hpp"
#include "smolv/parallel.hpp"
#include "smolv/particles.hpp"

namespace py = pybind11;
using namespace smolv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_array(const DensitySet& f) {
  Array out({static_cast<py::ssize_t>(f.levels()), static_cast<py::ssize_t>(f.cells())});
  std::copy(f.data().begin(), f.data().end(), out.mutable_data());
  return out;
}

DensitySet from_array(const Array& a, const Params& p) {
  const VelocityGrid grid = build_grid(p);
  if (a.ndim() != 2 || a.shape(0) != p.M || static_cast<std::size_t>(a.shape(1)) != grid.size()) {
    throw std::invalid_argument("density array must have shape (M, G**d)");
  }
  DensitySet f(grid, p.M);
  std::copy(a.data(), a.data() + a.size(), f.data().begin());
  return f;
}

py::dict row_dict(const DiagnosticsRow& r) {
  py::dict d;
  d["t"] = r.t;
  d["mass"] = r.mass;
  d["T"] = r.T;
  d["expelled"] = r.expelled;
  d["leakage"] = r.leakage;
  d["momentum"] = r.momentum;
  d["moment2"] = r.moment2;
  d["moment_k"] = std::vector<double>(r.moment_k.begin(), r.moment_k.end());
  d["l2_energy"] = r.l2_energy;
  d["h1_seminorm"] = r.h1_seminorm;
  d["weighted_l2"] = r.weighted_l2;
  d["dist_ref"] = r.dist_ref;
  return d;
}

template <class Output>
py::dict run_dict(const Output& out) {
  py::dict d;
  py::list rows, snaps;
  for (const auto& r : out.rows) rows.append(row_dict(r));
  for (const auto& s : out.snapshots) snaps.append(py::make_tuple(s.t, to_array(s.f)));
  d["rows"] = rows;
  d["snapshots"] = snaps;
  return d;
}

RunControl control_of(const Config& c) {
  RunControl rc;
  rc.output_every = c.output.output_every;
  rc.snapshot_times = c.output.snapshot_times;
  return rc;
}

}  // namespace

PYBIND11_MODULE(_smolv, mod) {
  mod.doc() = "Coagulating Brownian particles with Stokes drag: PDE solver and particle system";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<StepRefused>(mod, "StepRefused", PyExc_RuntimeError);

  py::class_<Config>(mod, "Config")
      .def_property_readonly("d", [](const Config& c) { return c.params.d; })
      .def_property_readonly("M", [](const Config& c) { return c.params.M; })
      .def_property_readonly("G", [](const Config& c) { return c.params.G; })
      .def_property_readonly("V", [](const Config& c) { return c.params.V; })
      .def_property_readonly("kappa", [](const Config& c) { return c.params.kappa; })
      .def_property_readonly("t_end", [](const Config& c) { return c.params.t_end; })
      .def("render", &render_config)
      .def("__repr__", [](const Config& c) { return "<smolv.Config\n" + render_config(c) + ">"; });

  mod.def("parse_config", &parse_config, py::arg("text"));
  mod.def("load_config", [](const std::string& path) { return load_config(path); },
          py::arg("path"));
  mod.def("config_reference", &config_reference);
  mod.def("set_deterministic", &set_deterministic, py::arg("flag"));

  mod.def("initial_density", [](const Config& c) {
    return to_array(discretize_initial(c.init, build_grid(c.params), c.params.M));
  });
  mod.def("cell_centers", [](const Config& c) {
    const VelocityGrid g = build_grid(c.params);
    Array out({static_cast<py::ssize_t>(g.size()), static_cast<py::ssize_t>(g.dim())});
    auto* p = out.mutable_data();
    for (std::size_t a = 0; a < g.size(); ++a)
      for (int k = 0; k < g.dim(); ++k) *p++ = g.center(a, k);
    return out;
  });

  mod.def(
      "collision",
      [](const Config& c, const Array& f) {
        const CollisionOutput out = collision_operator(from_array(f, c.params), c.params,
                                                       c.params.R);
        return py::make_tuple(to_array(out.Q), out.expelled_mass_rate);
      },
      py::arg("config"), py::arg("f"),
      "Returns (Q, expelled_mass_rate) for density f under the config's kernel.");

  mod.def(
      "ou_step",
      [](const Config& c, const Array& field, double tau, double coefficient) {
        const VelocityGrid g = build_grid(c.params);
        if (static_cast<std::size_t>(field.size()) != g.size())
          throw std::invalid_argument("field must have G**d entries");
        const OUStepResult r =
            ou_step({field.data(), g.size()}, {tau, coefficient, c.params.kappa}, g);
        Array out(static_cast<py::ssize_t>(r.field.size()));
        std::copy(r.field.begin(), r.field.end(), out.mutable_data());
        return py::make_tuple(out, r.leaked_mass);
      },
      py::arg("config"), py::arg("field"), py::arg("tau"), py::arg("c"),
      "Exact Ornstein-Uhlenbeck pushforward of one level over tau; returns (field, leaked).");

  mod.def(
      "solve",
      [](const Config& c) {
        py::gil_scoped_release release;
        RunOutput out = run(c.params, discretize_initial(c.init, build_grid(c.params), c.params.M),
                            control_of(c));
        py::gil_scoped_acquire acquire;
        py::dict d = run_dict(out);
        d["steps"] = out.steps;
        d["final"] = to_array(out.final_state.f);
        return d;
      },
      py::arg("config"));

  mod.def(
      "run_particles",
      [](const Config& c) {
        py::gil_scoped_release release;
        ParticleRunOutput out = run_particles(c.params, c.particles, c.init, control_of(c));
        py::gil_scoped_acquire acquire;
        py::dict d = run_dict(out);
        d["merges"] = out.merges;
        d["expulsions"] = out.expulsions;
        d["max_mass_ledger_error"] = out.max_mass_ledger_error;
        d["max_merge_momentum_error"] = out.max_merge_momentum_error;
        return d;
      },
      py::arg("config"));

  mod.def("solve_to_dir", [](const Config& c, const std::filesystem::path& dir) {
    solve_command(c, dir);
  });
  mod.def("particles_to_dir", [](const Config& c, const std::filesystem::path& dir) {
    particles_command(c, dir);
  });
  mod.def(
      "compare",
      [](const std::filesystem::path& a, const std::filesystem::path& b,
         const std::filesystem::path& report) {
        py::list rows;
        for (const auto& r : compare_command(a, b, report)) {
          py::dict d;
          d["t"] = r.t;
          d["m"] = r.m;
          d["l1_distance"] = r.l1_distance;
          d["mass_diff"] = r.mass_diff;
          d["std_error"] = r.std_error;
          rows.append(d);
        }
        return rows;
      },
      py::arg("dir_a"), py::arg("dir_b"), py::arg("report"));
}
