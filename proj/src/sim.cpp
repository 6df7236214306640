#include "c3/sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

namespace c3 {

double ConfusionMatrix::prob(const std::string& truth, const std::string& heard) const {
  auto it = rows.find(truth);
  if (it == rows.end()) throw Error("confusion matrix has no row for phoneme: " + truth);
  for (const auto& c : it->second)
    if (c.phoneme == heard) return c.p;
  return 0.0;
}

ConfusionMatrix load_confusion(std::istream& in, const std::string& source_name) {
  ConfusionMatrix cm;
  std::string raw;
  int lineno = 0;
  int declared = -1;
  auto fail = [&](const std::string& what) -> void {
    throw Error(source_name + ":" + std::to_string(lineno) + ": " + what);
  };

  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw.substr(0, raw.find('#'));
    std::stringstream ss(line);
    std::string word;
    if (!(ss >> word)) continue;
    if (word == "confusion") {
      if (!(ss >> declared)) fail("confusion needs a row count");
    } else if (word == "row") {
      if (declared < 0) fail("row before confusion header");
      std::string phoneme;
      if (!(ss >> phoneme)) fail("row needs a phoneme");
      if (cm.rows.count(phoneme)) fail("duplicate row: " + phoneme);
      std::vector<ConfusionMatrix::Candidate> cands;
      std::string field;
      double sum = 0.0;
      bool diagonal = false;
      while (ss >> field) {
        auto colon = field.rfind(':');
        if (colon == std::string::npos) fail("expected <phoneme>:<p>, got " + field);
        ConfusionMatrix::Candidate c;
        c.phoneme = field.substr(0, colon);
        try {
          c.p = std::stod(field.substr(colon + 1));
        } catch (const std::invalid_argument&) {
          fail("bad probability in " + field);
        }
        if (c.p < 0.0) fail("negative probability in " + field);
        if (c.phoneme == phoneme) diagonal = true;
        sum += c.p;
        cands.push_back(std::move(c));
      }
      if (!diagonal) fail("row " + phoneme + " is missing its diagonal entry");
      if (std::abs(sum - 1.0) > 1e-9) fail("row " + phoneme + " sums to " + std::to_string(sum));
      cm.phonemes.push_back(phoneme);
      cm.rows.emplace(phoneme, std::move(cands));
    } else {
      fail("unknown directive: " + word);
    }
  }
  if (declared < 0) throw Error(source_name + ": missing confusion header");
  if (static_cast<size_t>(declared) != cm.phonemes.size())
    throw Error(source_name + ": header declares " + std::to_string(declared) + " rows, found " +
                std::to_string(cm.phonemes.size()));
  if (cm.phonemes.empty()) throw Error(source_name + ": empty confusion matrix");
  return cm;
}

ConfusionMatrix load_confusion_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open confusion file: " + path);
  return load_confusion(in, path);
}

double calibrate_lambda(const ConfusionMatrix& cm, double avg_candidates) {
  if (avg_candidates < 1.0) throw Error("avg_candidates must be at least 1 (the gold edge)");
  double target = avg_candidates - 1.0;

  // Mean over rows of sum_{c != r} min(1, lambda * p); monotone in lambda.
  auto expected_extras = [&](double lambda) {
    double total = 0.0;
    for (const auto& r : cm.phonemes) {
      for (const auto& c : cm.rows.at(r))
        if (c.phoneme != r) total += std::min(1.0, lambda * c.p);
    }
    return total / static_cast<double>(cm.phonemes.size());
  };

  double hi = 1.0;
  while (expected_extras(hi) < target) {
    hi *= 2.0;
    if (hi > 1e12) throw Error("confusion matrix cannot reach avg_candidates=" +
                               std::to_string(avg_candidates));
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2.0;
    if (expected_extras(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return (lo + hi) / 2.0;
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// uniform_real_distribution is not pinned down by the standard; this is.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

PhonemeLattice generate_phoneme_lattice(const std::vector<std::string>& gold_phonemes,
                                        const ConfusionMatrix& cm, const SimParams& sp,
                                        const std::string& sentence_id, int draw_index) {
  if (gold_phonemes.empty()) throw Error("cannot generate a lattice for an empty sentence");
  double lambda = calibrate_lambda(cm, sp.avg_candidates);

  std::uint64_t seed_material =
      splitmix64(sp.seed) ^ splitmix64(fnv1a(sentence_id) + 0x51ed2701) ^
      splitmix64(static_cast<std::uint64_t>(draw_index) + 0xb5297a4d);
  std::mt19937_64 rng(seed_material);

  PhonemeLattice pl;
  pl.vertex_count = static_cast<int>(gold_phonemes.size()) + 1;
  for (size_t t = 0; t < gold_phonemes.size(); ++t) {
    const std::string& gold = gold_phonemes[t];
    auto row = cm.rows.find(gold);
    if (row == cm.rows.end()) throw Error("no confusion row for gold phoneme: " + gold);
    int from = static_cast<int>(t);
    pl.edges.push_back({from, from + 1, gold, cm.self_prob(gold)});
    for (const auto& c : row->second) {
      if (c.phoneme == gold) continue;
      double include_p = std::min(1.0, lambda * c.p);
      if (uniform01(rng) < include_p && c.p > 0.0)
        pl.edges.push_back({from, from + 1, c.phoneme, c.p});
    }
  }
  return pl;
}

PhonemeLattice baseline_lattice(const std::vector<std::string>& gold_phonemes) {
  PhonemeLattice pl;
  pl.vertex_count = static_cast<int>(gold_phonemes.size()) + 1;
  for (size_t t = 0; t < gold_phonemes.size(); ++t)
    pl.edges.push_back({static_cast<int>(t), static_cast<int>(t) + 1, gold_phonemes[t], 1.0});
  return pl;
}

}  // namespace c3
