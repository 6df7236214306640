#include "c3/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace c3 {

const CorpusSentence& Corpus::by_id(const std::string& id) const {
  for (const auto& s : sentences)
    if (s.id == id) return s;
  throw Error("corpus has no sentence '" + id + "'");
}

Corpus load_corpus(std::istream& in, const std::string& source_name) {
  Corpus corpus;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto fail = [&](const std::string& msg) -> Error {
      return Error(source_name + ":" + std::to_string(lineno) + ": " + msg);
    };
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);

    // tree= runs to the end of the line and may contain spaces.
    std::optional<std::string> tree;
    if (auto pos = line.find("tree="); pos != std::string::npos) {
      tree = line.substr(pos + 5);
      while (!tree->empty() && tree->back() == ' ') tree->pop_back();
      if (tree->empty()) throw fail("empty tree=");
      line.erase(pos);
    }

    std::istringstream ls(line);
    std::string word;
    if (!(ls >> word)) {
      if (tree) throw fail("tree= without a sentence");
      continue;
    }
    if (word != "sentence") throw fail("expected 'sentence', got '" + word + "'");

    CorpusSentence s;
    if (!(ls >> s.id)) throw fail("missing sentence id");
    if (!seen.insert(s.id).second) throw fail("duplicate sentence id '" + s.id + "'");

    while (ls >> word) {
      if (word.rfind("target=", 0) == 0) {
        s.target = parse_category(word.substr(7));
      } else if (word.rfind("morphemes=", 0) == 0) {
        std::istringstream ms(word.substr(10));
        std::string id;
        while (std::getline(ms, id, ','))
          if (!id.empty()) s.morphemes.push_back(id);
      } else {
        throw fail("unknown field '" + word + "'");
      }
    }
    if (!s.target) throw fail("sentence " + s.id + " has no target=");
    if (s.morphemes.empty()) throw fail("sentence " + s.id + " has no morphemes=");
    s.gold_tree = std::move(tree);
    corpus.sentences.push_back(std::move(s));
  }
  if (corpus.sentences.empty()) throw Error(source_name + ": empty corpus");
  return corpus;
}

Corpus load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open corpus file: " + path);
  return load_corpus(in, path);
}

std::vector<std::string> gold_phonemes(const CorpusSentence& s, const Lexicon& lex) {
  std::vector<std::string> out;
  for (const auto& id : s.morphemes) {
    const auto& surface = lex.entry(id).surface;
    out.insert(out.end(), surface.begin(), surface.end());
  }
  return out;
}

GoldPath gold_path(const CorpusSentence& s, const Lexicon& lex) {
  GoldPath path;
  int at = 0;
  for (const auto& id : s.morphemes) {
    int len = static_cast<int>(lex.entry(id).surface.size());
    path.push_back({id, at, at + len});
    at += len;
  }
  return path;
}

bool config_uses_suppression(ExperimentConfig c) {
  return c == ExperimentConfig::UASCB || c == ExperimentConfig::UASCP;
}

bool config_uses_lattice_input(ExperimentConfig c) {
  return c == ExperimentConfig::UAP || c == ExperimentConfig::UASCP;
}

std::string config_name(ExperimentConfig c) {
  switch (c) {
    case ExperimentConfig::UAB: return "UAB";
    case ExperimentConfig::UAP: return "UAP";
    case ExperimentConfig::UASCB: return "UA+SCB";
    case ExperimentConfig::UASCP: return "UA+SCP";
  }
  throw Error("unknown config");
}

ExperimentConfig config_from_name(const std::string& name) {
  if (name == "UAB") return ExperimentConfig::UAB;
  if (name == "UAP") return ExperimentConfig::UAP;
  if (name == "UA+SCB" || name == "UASCB") return ExperimentConfig::UASCB;
  if (name == "UA+SCP" || name == "UASCP") return ExperimentConfig::UASCP;
  throw Error("unknown config '" + name + "' (expected UAB, UAP, UA+SCB, or UA+SCP)");
}

bool score_parse(const TreePtr& parse, const CorpusSentence& s) {
  if (!parse) return false;
  if (tree_leaves(parse) != s.morphemes) return false;
  if (render(parse->category) != render(s.target)) return false;
  if (s.gold_tree && tree_text(parse) != *s.gold_tree) return false;
  return true;
}

Grammar corpus_grammar(const Corpus& corpus) {
  Grammar g;
  std::set<std::string> seen;
  for (const auto& s : corpus.sentences)
    if (seen.insert(render(s.target)).second) g.sentence_categories.push_back(s.target);
  return g;
}

namespace {

ConfigResult run_config(const Corpus& corpus, const Lexicon& ua, const Lexicon& uasc,
                        const Grammar& g, ExperimentConfig cfg, const RelaxationParams& rp,
                        const SimParams& sp, const ConfusionMatrix& cm) {
  const Lexicon& lex = config_uses_suppression(cfg) ? uasc : ua;
  const bool lattice_mode = config_uses_lattice_input(cfg);
  PhonemeTrie trie = build_trie(lex);

  ConfigResult res;
  res.config = cfg;
  res.seed = sp.seed;

  const int draws = lattice_mode ? sp.lattices_per_sentence : 1;
  for (const auto& s : corpus.sentences) {
    const std::vector<std::string> phonemes = gold_phonemes(s, lex);
    const GoldPath gold = gold_path(s, lex);
    for (int draw = 0; draw < draws; ++draw) {
      ++res.items;
      try {
        PhonemeLattice pl = lattice_mode ? generate_phoneme_lattice(phonemes, cm, sp, s.id, draw)
                                         : baseline_lattice(phonemes);
        MorphemeLattice decoded = decode_lattice(pl, trie);
        MorphemeLattice filtered = filter_lattice(decoded, lex.connectivity, lex);
        if (contains_path(filtered, gold)) ++res.morph_hits;
        if (filtered.edges.empty()) continue;  // the front end lost the sentence

        Chart chart = init_chart(filtered, lex, g);
        ParseForest forest = run_relaxation(chart, g, rp, s.target);
        if (auto best = best_parse(chart, forest); best && score_parse(*best, s)) ++res.syn_hits;
      } catch (const std::exception& e) {
        res.errors.push_back(s.id + " draw " + std::to_string(draw) + ": " + e.what());
      }
    }
  }
  return res;
}

}  // namespace

Report run_experiment(const Corpus& corpus, const Lexicon& ua, const Lexicon& uasc,
                      const Grammar& g, ExperimentConfig config, const RelaxationParams& rp,
                      const SimParams& sp, const ConfusionMatrix& cm) {
  return run_experiment(corpus, ua, uasc, g, std::vector<ExperimentConfig>{config}, rp, sp, cm);
}

Report run_experiment(const Corpus& corpus, const Lexicon& ua, const Lexicon& uasc,
                      const Grammar& g, const std::vector<ExperimentConfig>& configs,
                      const RelaxationParams& rp, const SimParams& sp,
                      const ConfusionMatrix& cm) {
  Report report;
  report.params = rp;
  report.sim = sp;
  auto t0 = std::chrono::steady_clock::now();
  for (ExperimentConfig cfg : configs)
    report.results.push_back(run_config(corpus, ua, uasc, g, cfg, rp, sp, cm));
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return report;
}

namespace {

std::string accuracy(int hits, int items) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6)
      << (items > 0 ? static_cast<double>(hits) / items : 0.0);
  return out.str();
}

}  // namespace

void write_report(std::ostream& out, const Report& report) {
  out << "config\tmorph_acc\tmorph_frac\tsyn_acc\tsyn_frac\titems\tseed\n";
  for (const auto& r : report.results) {
    out << config_name(r.config) << '\t' << accuracy(r.morph_hits, r.items) << '\t'
        << r.morph_hits << '/' << r.items << '\t' << accuracy(r.syn_hits, r.items) << '\t'
        << r.syn_hits << '/' << r.items << '\t' << r.items << '\t' << r.seed << '\n';
  }
}

std::string report_to_string(const Report& report) {
  std::ostringstream out;
  write_report(out, report);
  return out.str();
}

}  // namespace c3
