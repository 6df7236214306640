#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "c3/chart.hpp"
#include "c3/sim.hpp"

namespace c3 {

struct CorpusSentence {
  std::string id;
  std::vector<std::string> morphemes;  // gold entry ids, in order
  CatPtr target;
  std::optional<std::string> gold_tree;  // canonical tree text
};

struct Corpus {
  std::vector<CorpusSentence> sentences;
  const CorpusSentence& by_id(const std::string& id) const;
};

// Format: "sentence <id> target=<cat> morphemes=<id,id,...> [tree=<text>]"
// (tree= consumes the rest of the line). '#' comments.
Corpus load_corpus(std::istream& in, const std::string& source_name = "<corpus>");
Corpus load_corpus_file(const std::string& path);

// Phoneme sequence / tiling spans implied by the gold morphemes.
std::vector<std::string> gold_phonemes(const CorpusSentence& s, const Lexicon& lex);
GoldPath gold_path(const CorpusSentence& s, const Lexicon& lex);

// Grammar variant x input mode.
enum class ExperimentConfig { UAB, UAP, UASCB, UASCP };

bool config_uses_suppression(ExperimentConfig c);
bool config_uses_lattice_input(ExperimentConfig c);   // false = noise-free baseline
std::string config_name(ExperimentConfig c);          // UAB, UAP, UA+SCB, UA+SCP
ExperimentConfig config_from_name(const std::string& name);

// A parse counts as correct when its leaves equal the gold morpheme sequence,
// its root category equals the sentence target, and — when the corpus gives a
// gold tree — the canonical texts match.
bool score_parse(const TreePtr& parse, const CorpusSentence& s);

struct ConfigResult {
  ExperimentConfig config = ExperimentConfig::UAB;
  int items = 0;  // sentence-draw evaluations
  int morph_hits = 0;
  int syn_hits = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> errors;  // per-item failures, counted as misses
};

struct Report {
  std::vector<ConfigResult> results;
  RelaxationParams params;
  SimParams sim;
  double wall_seconds = 0.0;
};

// Sentence categories for relaxation taken from the corpus targets.
Grammar corpus_grammar(const Corpus& corpus);

// Per sentence (and per draw in lattice mode): build the input lattice
// (baseline = single-path gold, lattice = simulated), decode against the
// config's lexicon, filter, relax, extract the best parse. Morphological hit =
// the filtered lattice still contains the gold path; syntactic hit =
// score_parse on the best parse. Per-item exceptions are recorded in the
// result's errors and count as misses.
Report run_experiment(const Corpus& corpus, const Lexicon& ua, const Lexicon& uasc,
                      const Grammar& g, ExperimentConfig config, const RelaxationParams& rp,
                      const SimParams& sp, const ConfusionMatrix& cm);
Report run_experiment(const Corpus& corpus, const Lexicon& ua, const Lexicon& uasc,
                      const Grammar& g, const std::vector<ExperimentConfig>& configs,
                      const RelaxationParams& rp, const SimParams& sp,
                      const ConfusionMatrix& cm);

// TSV: header then one row per config:
//   config  morph_acc  morph_frac  syn_acc  syn_frac  items  seed
// Identical inputs serialize byte-identically (wall time stays out of it).
void write_report(std::ostream& out, const Report& report);
std::string report_to_string(const Report& report);

}  // namespace c3
