#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gptdetox/ensemble.hpp"
#include "gptdetox/evaluation.hpp"
#include "gptdetox/runner.hpp"

namespace py = pybind11;
using namespace gptdetox;

namespace {

ExampleSet make_example_set(const std::vector<std::pair<std::string, std::string>>& pairs) {
  ExampleSet set;
  set.strategy = SelectionStrategy{StrategyKind::kWmes, static_cast<int>(pairs.size()), 0};
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    SentencePair pair{std::to_string(i), pairs[i].first, pairs[i].second, "user"};
    set.examples.push_back(SelectedExample{std::move(pair), {}, 0.0, false});
  }
  return set;
}

}  // namespace

PYBIND11_MODULE(_gptdetox, m) {
  m.doc() = "Prompt-based text detoxification pipeline";

  py::class_<SentencePair>(m, "SentencePair")
      .def(py::init<>())
      .def_readwrite("id", &SentencePair::id)
      .def_readwrite("toxic", &SentencePair::toxic)
      .def_readwrite("neutral", &SentencePair::neutral)
      .def_readwrite("source", &SentencePair::source)
      .def("__repr__", [](const SentencePair& p) {
        return "SentencePair(id='" + p.id + "', toxic='" + p.toxic + "')";
      });

  py::class_<Corpus>(m, "Corpus")
      .def(py::init<>())
      .def_readonly("pairs", &Corpus::pairs)
      .def_readonly("split", &Corpus::split)
      .def("__len__", &Corpus::size);

  m.def("load_corpus",
        [](const std::string& path, const std::string& format, bool header) {
          return load_corpus(path, corpus_format_from_name(format), header);
        },
        py::arg("path"), py::arg("format") = "tsv", py::arg("header") = false);

  m.def("normalize", [](const std::string& text) { return normalize(text); });

  py::class_<TermMatch>(m, "TermMatch")
      .def_readonly("term", &TermMatch::term)
      .def_readonly("begin", &TermMatch::begin)
      .def_readonly("end", &TermMatch::end);

  py::class_<ToxicLexicon>(m, "ToxicLexicon")
      .def_static("from_file", &ToxicLexicon::from_file)
      .def_static("from_terms", &ToxicLexicon::from_terms)
      .def("__len__", &ToxicLexicon::size)
      .def("find_toxic_terms",
           [](const ToxicLexicon& lex, const std::string& sentence) {
             return lex.find_toxic_terms(sentence);
           });

  py::class_<Embedding>(m, "Embedding")
      .def_readonly("values", &Embedding::values)
      .def("dim", &Embedding::dim);

  m.def("cosine", &cosine);

  py::class_<HashedBagProvider>(m, "HashedBagProvider")
      .def(py::init<std::size_t>(), py::arg("dim"))
      .def("embed", [](HashedBagProvider& p, const std::string& text) {
        return p.embed(text);
      })
      .def("dim", &HashedBagProvider::dim)
      .def("id", &HashedBagProvider::id);

  m.def("render_zero_shot",
        [](const std::string& input) { return render_zero_shot(input); });
  m.def("render_few_shot",
        [](const std::vector<std::pair<std::string, std::string>>& examples,
           const std::string& input) {
          return render_few_shot(make_example_set(examples), input);
        },
        py::arg("examples"), py::arg("input"));

  py::class_<ScoreTriple>(m, "ScoreTriple")
      .def(py::init([](double sta, double sim, double fl) {
             return ScoreTriple{sta, sim, fl};
           }),
           py::arg("sta"), py::arg("sim"), py::arg("fl"))
      .def_readwrite("sta", &ScoreTriple::sta)
      .def_readwrite("sim", &ScoreTriple::sim)
      .def_readwrite("fl", &ScoreTriple::fl);

  m.def("j_score", &j_score);
  m.def("s_score", &s_score);

  m.def("eicl_select",
        [](const std::vector<std::tuple<std::string, double, double, double>>& scored,
           const std::string& scoring_fn) {
          std::vector<Candidate> candidates;
          for (const auto& [setting_id, sta, sim, fl] : scored) {
            Candidate c;
            c.setting_id = setting_id;
            c.scores = ScoreTriple{sta, sim, fl};
            candidates.push_back(std::move(c));
          }
          std::size_t best =
              eicl_select(candidates, scoring_function_from_name(scoring_fn));
          return candidates[best].setting_id;
        },
        py::arg("scored"), py::arg("scoring_fn") = "j",
        "Pick the argmax setting from (setting_id, sta, sim, fl) tuples.");

  py::class_<CorpusMetrics>(m, "CorpusMetrics")
      .def_readonly("setting_id", &CorpusMetrics::setting_id)
      .def_readonly("sta", &CorpusMetrics::sta)
      .def_readonly("sim", &CorpusMetrics::sim)
      .def_readonly("fl", &CorpusMetrics::fl)
      .def_readonly("j", &CorpusMetrics::j)
      .def_readonly("j_mean_per_sentence", &CorpusMetrics::j_mean_per_sentence)
      .def_readonly("n", &CorpusMetrics::n);

  m.def("evaluate_setting",
        [](const std::string& setting_id,
           const std::vector<std::tuple<double, double, double>>& triples,
           double threshold) {
          std::vector<ScoreTriple> records;
          for (const auto& [sta, sim, fl] : triples) {
            records.push_back(ScoreTriple{sta, sim, fl});
          }
          return evaluate_setting(setting_id, records, threshold);
        },
        py::arg("setting_id"), py::arg("triples"), py::arg("threshold") = 0.5);

  m.def("detoxify",
        [](const std::string& text, const std::string& train_path,
           const std::string& train_format, const std::string& lexicon_path,
           const std::string& scoring, std::uint64_t seed,
           const std::string& cache_dir) {
          RunConfig config;
          config.dataset.path = train_path;
          config.dataset.format = train_format;
          config.train_dataset = config.dataset;
          config.lexicon_path = lexicon_path;
          config.scoring = scoring;
          config.seed = seed;
          config.cache_dir = cache_dir;
          auto bundle = build_pipeline(config);
          EiclResult result = bundle.pipeline->run(text);
          const Candidate& best = result.candidates[result.best_index];
          py::dict out;
          out["output"] = best.output;
          out["setting"] = best.setting_id;
          out["sta"] = best.scores.sta;
          out["sim"] = best.scores.sim;
          out["fl"] = best.scores.fl;
          out["s"] = s_score(best.scores);
          out["j"] = j_score(best.scores);
          return out;
        },
        py::arg("text"), py::arg("train_path"), py::arg("train_format") = "tsv",
        py::arg("lexicon_path") = "", py::arg("scoring") = "j",
        py::arg("seed") = 0, py::arg("cache_dir") = ".detox-cache",
        "Detoxify one sentence with the offline mock backend and heuristic scorers.");
}
