#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"

#include "entropykit/diagnostics.hpp"
#include "entropykit/error.hpp"
#include "entropykit/estimators.hpp"
#include "entropykit/experiments.hpp"
#include "entropykit/version.hpp"

namespace py = pybind11;
namespace ek = entropykit;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Accepts shape (n,) as n scalars or shape (n, d) as n points.
ek::PointSample to_sample(const DoubleArray& a) {
  if (a.ndim() != 1 && a.ndim() != 2) {
    throw ek::Error(ek::ErrorCode::InvalidDimension, "points must be a 1-D or 2-D array");
  }
  const std::size_t d = a.ndim() == 1 ? 1 : static_cast<std::size_t>(a.shape(1));
  std::vector<double> coords(a.data(), a.data() + a.size());
  return ek::PointSample(std::move(coords), d);
}

std::vector<ek::LogPoint> to_logpoints(const std::vector<std::pair<std::uint32_t, double>>& pts) {
  std::vector<ek::LogPoint> out;
  out.reserve(pts.size());
  for (const auto& [interval, fraction] : pts) out.push_back({interval, fraction});
  return out;
}

ek::DistributionSpec to_spec(const std::string& spec_json) {
  return ek::DistributionSpec::from_json(nlohmann::json::parse(spec_json));
}

py::dict estimate_dict(const ek::EntropyEstimate& e) {
  py::dict out;
  out["h_n"] = e.value;
  out["n"] = e.n;
  out["d"] = e.d;
  out["backend"] = e.backend ? std::string(ek::to_string(*e.backend)) : std::string("logdomain");
  out["euler_mascheroni"] = e.euler_mascheroni;
  out["log_domain"] = e.log_domain;
  if (e.clamp) out["clamp"] = *e.clamp;
  return out;
}

py::dict report_dict(const ek::DiagnosticsReport& r) {
  py::dict out;
  out["m_n"] = r.m_n;
  out["tilde_h_n"] = r.tilde_h_n;
  out["h_n"] = r.h_n;
  out["ball_mass_sum"] = r.ball_mass_sum;
  out["empirical_log_tail"] = r.empirical_log_tail;
  out["ks_ball_mass_uniform"] = r.ks_ball_mass_uniform ? py::object(py::float_(*r.ks_ball_mass_uniform)) : py::none();
  out["decomposition_residual"] = r.decomposition_residual;
  out["n"] = r.n;
  out["d"] = r.d;
  out["spec"] = r.spec;
  return out;
}

py::dict row_dict(const ek::ResultRow& r) {
  py::dict out;
  out["n"] = r.n;
  out["replicate"] = r.replicate;
  out["h_n"] = r.h_n;
  out["true_entropy"] = r.true_entropy;
  out["abs_error"] = r.abs_error;
  out["m_n"] = r.m_n;
  out["tilde_h_n"] = r.tilde_h_n;
  out["ball_mass_sum"] = r.ball_mass_sum;
  out["log_tail"] = r.log_tail;
  out["ell_n"] = r.ell_n;
  out["wall_time_ms"] = r.wall_time_ms;
  out["error"] = r.error;
  return out;
}

}  // namespace

PYBIND11_MODULE(_entropykit, m) {
  m.doc() = "Nearest-neighbour differential entropy estimation";
  m.attr("__version__") = ek::kVersion;
  m.attr("EULER_MASCHERONI") = ek::kEulerMascheroni;

  PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
  error_type.call_once_and_store_result(
      [&]() { return py::object(py::exception<ek::Error>(m, "EntropyKitError")); });
  // Raised as EntropyKitError(message, code_name).
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ek::Error& e) {
      const py::object& cls = error_type.get_stored();
      py::object inst = cls(e.what(), ek::to_string(e.code()));
      PyErr_SetObject(cls.ptr(), inst.ptr());
    } catch (const nlohmann::json::exception& e) {
      const py::object& cls = error_type.get_stored();
      py::object inst = cls(e.what(), ek::to_string(ek::ErrorCode::ParseError));
      PyErr_SetObject(cls.ptr(), inst.ptr());
    }
  });

  m.def(
      "nn_distances",
      [](const DoubleArray& points, const std::string& backend, std::size_t threads) {
        return ek::nn_distances(to_sample(points), ek::parse_backend(backend), threads).r;
      },
      py::arg("points"), py::arg("backend") = "index", py::arg("threads") = 1);

  m.def(
      "kl_entropy",
      [](const DoubleArray& points, const std::string& backend, std::size_t threads) {
        return estimate_dict(ek::kl_entropy(to_sample(points), ek::parse_backend(backend), threads));
      },
      py::arg("points"), py::arg("backend") = "index", py::arg("threads") = 1);

  m.def(
      "kl_entropy_logdomain",
      [](const std::vector<std::pair<std::uint32_t, double>>& points, std::uint32_t clamp) {
        return estimate_dict(ek::kl_entropy_logdomain(to_logpoints(points), clamp));
      },
      py::arg("points"), py::arg("clamp") = ek::kDefaultIntervalClamp);

  m.def(
      "one_nn_density",
      [](const DoubleArray& points, const std::string& backend) {
        return ek::one_nn_density(to_sample(points), ek::parse_backend(backend));
      },
      py::arg("points"), py::arg("backend") = "index");

  m.def(
      "ell_statistic",
      [](const DoubleArray& points) { return ek::ell_statistic(to_sample(points)); },
      py::arg("points"));

  m.def("unit_ball_volume", &ek::unit_ball_volume, py::arg("d"));

  m.def(
      "exact_entropy", [](const std::string& spec) { return ek::exact_entropy(to_spec(spec)); },
      py::arg("spec_json"));

  m.def(
      "sample",
      [](const std::string& spec_json, std::size_t n, std::uint64_t seed) -> py::object {
        const ek::Draws draws = ek::draw(to_spec(spec_json), n, seed);
        if (const auto* pts = std::get_if<std::vector<ek::LogPoint>>(&draws)) {
          std::vector<std::pair<std::uint32_t, double>> out;
          for (const auto& p : *pts) out.emplace_back(p.interval, p.fraction);
          return py::cast(out);
        }
        const auto& s = std::get<ek::PointSample>(draws);
        DoubleArray out({s.size(), s.dimension()});
        std::copy(s.coordinates().begin(), s.coordinates().end(), out.mutable_data());
        return out;
      },
      py::arg("spec_json"), py::arg("n"), py::arg("seed"));

  m.def(
      "diagnose",
      [](const DoubleArray& points, const std::string& spec_json, bool allow_monte_carlo) {
        ek::DiagnosticsOptions options;
        options.allow_monte_carlo = allow_monte_carlo;
        return report_dict(ek::diagnose(to_sample(points), to_spec(spec_json), options));
      },
      py::arg("points"), py::arg("spec_json"), py::arg("allow_monte_carlo") = false);

  m.def(
      "diagnose_logdomain",
      [](const std::vector<std::pair<std::uint32_t, double>>& points, const std::string& spec_json) {
        return report_dict(ek::diagnose(to_logpoints(points), to_spec(spec_json)));
      },
      py::arg("points"), py::arg("spec_json"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, std::size_t threads) {
        const auto config = ek::ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        std::vector<ek::ResultRow> rows;
        {
          py::gil_scoped_release release;
          rows = ek::run_experiment(config, threads);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return py::make_tuple(out, ek::results_to_csv(rows));
      },
      py::arg("config_json"), py::arg("threads") = 1);
}
