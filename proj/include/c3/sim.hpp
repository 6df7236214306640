#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "c3/lattice.hpp"

namespace c3 {

// Row-stochastic phoneme confusion table. Row order and per-row candidate
// order follow the file, so draws are reproducible.
struct ConfusionMatrix {
  struct Candidate {
    std::string phoneme;
    double p = 0.0;
  };
  std::vector<std::string> phonemes;                     // row order
  std::map<std::string, std::vector<Candidate>> rows;    // includes the diagonal

  double prob(const std::string& truth, const std::string& heard) const;
  double self_prob(const std::string& truth) const { return prob(truth, truth); }
};

// Format: "confusion <n>" header, then one "row <phoneme> <cand>:<p> ..."
// line per phoneme. Rows must sum to 1 (1e-9) and include the diagonal.
ConfusionMatrix load_confusion(std::istream& in, const std::string& source_name = "<confusion>");
ConfusionMatrix load_confusion_file(const std::string& path);

struct SimParams {
  double avg_candidates = 2.2;  // expected edges per position
  int lattices_per_sentence = 10;
  std::uint64_t seed = 1;
};

// Inclusion scale: candidate c != gold at a position with true phoneme r is
// included with probability min(1, lambda * cm(r, c)), with lambda chosen so
// the expected candidates per position, averaged over matrix rows, equals
// avg_candidates. Throws when the matrix cannot reach the target.
double calibrate_lambda(const ConfusionMatrix& cm, double avg_candidates);

// Position-synchronous lattice over vertices 0..|gold|: position t always
// carries the gold phoneme (score = its self-probability) plus confusable
// candidates drawn as above (score = cm(gold_t, c)). Deterministic given
// (seed, sentence_id, draw_index).
PhonemeLattice generate_phoneme_lattice(const std::vector<std::string>& gold_phonemes,
                                        const ConfusionMatrix& cm, const SimParams& sp,
                                        const std::string& sentence_id, int draw_index);

// The noise-free single-path lattice with unit scores (a perfect front end).
PhonemeLattice baseline_lattice(const std::vector<std::string>& gold_phonemes);

}  // namespace c3
