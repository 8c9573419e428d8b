#include <sstream>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "app.hpp"
#include "ens/core/dialogue.hpp"
#include "ens/core/tagged.hpp"
#include "ens/corpus/split.hpp"
#include "ens/eval/metrics.hpp"
#include "ens/eval/stats.hpp"
#include "ens/training/losses.hpp"
#include "ens/training/preference.hpp"

namespace py = pybind11;

namespace {

ens::AblationMask mask_of(int setting) {
  auto m = ens::AblationMask::setting(setting);
  if (!m) throw ens::Error(ens::ErrorCode::kMask, "unknown mask setting " + std::to_string(setting));
  return *m;
}

// Rationale fields as a JSON document string.
std::string fields_json(const ens::EnsCotRationale& r) { return ens::to_json(ens::to_fields(r)).dump(); }

ens::EnsCotRationale rationale_from_json(const std::string& doc) {
  return ens::to_rationale(ens::rationale_fields_from_json(nlohmann::json::parse(doc))).value();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of the emotion-aware negotiation pipeline";

  static py::exception<ens::Error> ens_error(m, "EnsError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ens::Error& e) {
      py::set_error(ens_error, (std::string(ens::error_code_name(e.code())) + ": " + e.what()).c_str());
    } catch (const nlohmann::json::exception& e) {
      py::set_error(ens_error, (std::string("SchemaError: ") + e.what()).c_str());
    }
  });

  m.def("render_tagged_target",
        [](const std::string& rationale_json, const std::string& response, int mask) {
          return ens::render_tagged_target(rationale_from_json(rationale_json), response, mask_of(mask)).text;
        },
        py::arg("rationale_json"), py::arg("response"), py::arg("mask") = 0);

  m.def("parse_tagged_target",
        [](const std::string& text, std::optional<int> mask) {
          std::optional<ens::AblationMask> expected;
          if (mask) expected = mask_of(*mask);
          auto parsed = ens::parse_tagged_target(text, expected);
          if (!parsed) throw ens::Error(parsed.error().code, parsed.error().describe());
          return py::make_tuple(fields_json(parsed.value().rationale), parsed.value().response);
        },
        py::arg("text"), py::arg("mask") = py::none());

  m.def("validate_dialogue",
        [](const std::string& dialogue_json) {
          const auto d = ens::dialogue_from_json(nlohmann::json::parse(dialogue_json));
          std::vector<std::string> out;
          for (const auto& v : ens::validate_dialogue(d).violations) {
            out.push_back(std::string(ens::error_code_name(v.code)) + ": " + v.message);
          }
          return out;
        },
        py::arg("dialogue_json"));

  m.def("dpo_pair_loss", &ens::training::dpo_pair_loss, py::arg("gap"), py::arg("beta"));
  m.def("softplus", &ens::training::softplus, py::arg("x"));

  m.def("select_preference_pairs",
        [](const std::vector<std::optional<double>>& similarities, double tau1, double tau2,
           std::size_t max_pairs) {
          std::vector<ens::training::ScoredCompletion> samples;
          for (std::size_t i = 0; i < similarities.size(); ++i) {
            samples.push_back({std::to_string(i), similarities[i]});
          }
          std::vector<std::pair<std::size_t, std::size_t>> out;
          for (const auto& p : ens::training::select_preference_pairs("ctx", "", samples, tau1, tau2, max_pairs)) {
            out.emplace_back(std::stoul(p.preferred), std::stoul(p.rejected));
          }
          return out;
        },
        py::arg("similarities"), py::arg("tau1"), py::arg("tau2"), py::arg("max_pairs") = 0,
        "Index pairs (preferred, rejected); None marks an unparseable sample.");

  m.def("bleu4", &ens::eval::bleu4, py::arg("candidates"), py::arg("references"));
  m.def("distinct3", &ens::eval::distinct3, py::arg("candidates"));
  m.def("welch_t_test",
        [](const std::vector<double>& a, const std::vector<double>& b) {
          const auto r = ens::eval::welch_t_test(a, b);
          return py::make_tuple(r.t, r.df, r.p);
        },
        py::arg("a"), py::arg("b"));
  m.def("fleiss_kappa",
        [](const std::vector<std::vector<int>>& ratings) {
          return ens::eval::fleiss_kappa({"", ratings});
        },
        py::arg("ratings"));
  m.def("split_sizes",
        [](std::size_t n, const std::array<double, 3>& ratios) {
          const auto s = ens::corpus::split_sizes(n, ratios);
          return py::make_tuple(s.train, s.dev, s.test);
        },
        py::arg("n"), py::arg("ratios"));

  m.def("run_cli",
        [](const std::vector<std::string>& args) {
          std::vector<std::string> argv{"ens"};
          argv.insert(argv.end(), args.begin(), args.end());
          std::ostringstream out, err;
          ens::app::CommandResult r;
          {
            py::gil_scoped_release release;
            r = ens::app::run(argv, out, err);
          }
          return py::make_tuple(r.exit_code, out.str(), err.str());
        },
        py::arg("args"), "Runs one ens subcommand in-process; returns (exit_code, stdout, stderr).");
}
