#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "rear/app.hpp"
#include "rear/corpus.hpp"
#include "rear/random.hpp"
#include "rear/service.hpp"
#include "rear/stats.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Corpus and events loaded once, analyzed many times.
class Engine {
 public:
  Engine(const std::vector<std::filesystem::path>& corpus, const std::filesystem::path& events)
      : store_(rear::app::load_corpus(corpus)), events_(rear::eventstudy::load_events(events)) {}

  std::string analyze(const std::string& analysis, const std::string& config_json) const {
    const auto id = rear::eventstudy::parse_analysis(analysis);
    if (!id) throw rear::NotFoundError("unknown analysis \"" + analysis + "\"");
    const auto cfg = rear::app::RunConfig::from_json(json::parse(config_json), rear::app::RunConfig{});
    py::gil_scoped_release release;
    const auto run = rear::app::run_analysis(store_.documents(), events_, cfg, *id);
    json out = run.document;
    out["chart"] = run.chart;
    return out.dump();
  }

  std::string datasets() const { return rear::app::datasets_json(store_.documents(), rear::app::RunConfig{}).dump(); }

  std::size_t n_documents() const { return store_.size(); }
  std::size_t n_events() const { return events_.size(); }

 private:
  rear::corpus::DocumentStore store_;
  std::vector<rear::eventstudy::KeyEvent> events_;
};

}  // namespace

PYBIND11_MODULE(_rear, m) {
  m.doc() = "Event-study engine for movement salience";
  m.attr("__version__") = std::string(rear::app::kEngineVersion);
  m.attr("rng_version") = std::string(rear::stats::RandomPlan::kGeneratorVersion);

  auto base = py::register_exception<rear::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<rear::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<rear::IoError>(m, "IoError", base.ptr());
  py::register_exception<rear::DataError>(m, "DataError", base.ptr());
  py::register_exception<rear::NotFoundError>(m, "NotFoundError", base.ptr());

  m.def(
      "mann_whitney",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        const auto r = rear::stats::mann_whitney(a, b);
        return py::make_tuple(r.u, r.p_two_sided, std::string(rear::stats::to_string(r.method)));
      },
      py::arg("a"), py::arg("b"), "Returns (U of a, two-sided p, method).");

  m.def(
      "benjamini_hochberg",
      [](const std::vector<double>& p, double alpha) {
        const auto r = rear::stats::benjamini_hochberg(p, alpha);
        return py::make_tuple(r.adjusted, r.rejected);
      },
      py::arg("p_values"), py::arg("alpha") = 0.05, "Returns (adjusted p, rejected).");

  m.def(
      "cohens_d", [](const std::vector<double>& a, const std::vector<double>& b) { return rear::stats::cohens_d(a, b); },
      py::arg("a"), py::arg("b"));

  m.def(
      "emotion_intensity",
      [](const std::map<std::string, double>& scores) {
        return rear::corpus::emotion_intensity(rear::corpus::EmotionVector::from_map(scores));
      },
      py::arg("scores"), "All 28 categories required.");

  m.def(
      "derive_seed",
      [](std::uint64_t seed, const std::string& analysis, int window, std::size_t index, const std::string& purpose) {
        return rear::stats::RandomPlan(seed).derive({analysis, window, index, purpose});
      },
      py::arg("seed"), py::arg("analysis"), py::arg("window"), py::arg("index"), py::arg("purpose"));

  py::class_<Engine>(m, "Engine")
      .def(py::init<const std::vector<std::filesystem::path>&, const std::filesystem::path&>(), py::arg("corpus"),
           py::arg("events"))
      .def("analyze", &Engine::analyze, py::arg("analysis"), py::arg("config_json") = "{}")
      .def("datasets", &Engine::datasets)
      .def_property_readonly("n_documents", &Engine::n_documents)
      .def_property_readonly("n_events", &Engine::n_events);
}
