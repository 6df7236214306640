// Command-line front end: decode phoneme lattices, filter and parse morpheme
// lattices, enumerate oracle forests, simulate noisy input, and run the
// four-configuration experiment.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "c3/experiment.hpp"
#include "c3/oracle.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNoParse = 1;
constexpr int kExitInputError = 2;

struct RelaxationFlags {
  std::optional<double> rho, rho_prime, decay, theta, phi;
  std::optional<int> max_cycles;
  std::optional<std::string> decay_mode;
};

void add_relaxation_flags(CLI::App* cmd, RelaxationFlags& f) {
  cmd->add_option("--rho", f.rho, "bottom-up spread rate");
  cmd->add_option("--rho-prime", f.rho_prime, "top-down spread rate");
  cmd->add_option("--decay", f.decay, "decay constant d");
  cmd->add_option("--theta", f.theta, "generation threshold");
  cmd->add_option("--phi", f.phi, "removal floor");
  cmd->add_option("--max-cycles", f.max_cycles, "relaxation cycle cap");
  cmd->add_option("--decay-mode", f.decay_mode, "retention|literal")
      ->check(CLI::IsMember({"retention", "literal"}));
}

c3::RelaxationParams apply_flags(c3::RelaxationParams p, const RelaxationFlags& f) {
  if (f.rho) p.rho = *f.rho;
  if (f.rho_prime) p.rho_prime = *f.rho_prime;
  if (f.decay) p.d = *f.decay;
  if (f.theta) p.theta = *f.theta;
  if (f.phi) p.phi = *f.phi;
  if (f.max_cycles) p.max_cycles = *f.max_cycles;
  if (f.decay_mode) p.decay_mode = (*f.decay_mode == "literal") ? c3::DecayMode::Literal
                                                                : c3::DecayMode::Retention;
  return p;
}

// The morpheme lattice a command should parse: decode first when the input
// file holds phonemes.
c3::MorphemeLattice to_morphemes(const c3::LatticeFile& lf, const c3::Lexicon& lex) {
  if (lf.phoneme) {
    c3::PhonemeTrie trie = c3::build_trie(lex);
    return c3::decode_lattice(*lf.phoneme, trie);
  }
  return *lf.morpheme;
}

int cmd_parse(const std::string& lexicon_path, const std::string& variant,
              const std::string& input_path, const std::string& target_text,
              const std::string& params_path, const RelaxationFlags& flags, bool trace) {
  c3::Lexicon lex = c3::load_lexicon_file(lexicon_path);
  c3::CatPtr target = c3::parse_category(target_text);
  c3::RelaxationParams params;
  if (!params_path.empty()) params = c3::load_params_file(params_path);
  params = apply_flags(params, flags);

  c3::LatticeFile lf = c3::load_lattice_file(input_path);
  c3::MorphemeLattice filtered = c3::filter_lattice(to_morphemes(lf, lex), lex.connectivity, lex);
  if (filtered.edges.empty()) {
    std::cout << "no parse (connectivity filter left no edges)\n";
    return kExitNoParse;
  }

  c3::Grammar g;
  g.sentence_categories.push_back(target);
  g.lexicon_ref = lexicon_path + " (" + variant + ")";

  c3::Chart chart = c3::init_chart(filtered, lex, g);
  for (const auto& d : chart.diagnostics) std::cerr << "warning: " << d << "\n";
  c3::ParseForest forest =
      c3::run_relaxation(chart, g, params, target, trace ? &std::cout : nullptr);
  auto best = c3::best_parse(chart, forest);
  if (!best) {
    std::cout << "no parse\n";
    return kExitNoParse;
  }
  std::cout << c3::tree_text(*best) << "\n";
  std::cout << "category " << c3::render((*best)->category) << "\n";
  std::cout << "roots " << forest.roots.size() << "\n";
  for (c3::NodeId r : forest.roots) {
    const auto& n = chart.node(r);
    std::cout << "  " << n.category_text << " activation " << n.activation << "\n";
  }
  return kExitOk;
}

int cmd_decode(const std::string& lexicon_path, const std::string& input_path) {
  c3::Lexicon lex = c3::load_lexicon_file(lexicon_path);
  c3::LatticeFile lf = c3::load_lattice_file(input_path);
  if (!lf.phoneme) throw c3::Error("decode expects a phoneme lattice");
  c3::PhonemeTrie trie = c3::build_trie(lex);
  c3::write_lattice(std::cout, c3::decode_lattice(*lf.phoneme, trie));
  return kExitOk;
}

int cmd_oracle(const std::string& lexicon_path, const std::string& input_path,
               const std::string& target_text) {
  c3::Lexicon lex = c3::load_lexicon_file(lexicon_path);
  c3::CatPtr target = target_text.empty() ? nullptr : c3::parse_category(target_text);
  c3::LatticeFile lf = c3::load_lattice_file(input_path);
  c3::MorphemeLattice filtered = c3::filter_lattice(to_morphemes(lf, lex), lex.connectivity, lex);

  c3::Grammar g;
  if (target) g.sentence_categories.push_back(target);
  c3::OracleForest forest = c3::exhaustive_parse(filtered, lex, g, target);
  for (const auto& t : forest.trees) std::cout << c3::tree_text(t) << "\n";
  std::cout << "parses " << forest.trees.size() << "\n";
  return forest.trees.empty() ? kExitNoParse : kExitOk;
}

int cmd_simulate(const std::string& lexicon_path, const std::string& confusion_path,
                 const std::string& corpus_path, const std::string& sentence_id,
                 std::uint64_t seed, double avg_candidates, int draws) {
  c3::Lexicon lex = c3::load_lexicon_file(lexicon_path);
  c3::ConfusionMatrix cm = c3::load_confusion_file(confusion_path);
  c3::Corpus corpus = c3::load_corpus_file(corpus_path);
  const c3::CorpusSentence& s = corpus.by_id(sentence_id);

  c3::SimParams sp;
  sp.seed = seed;
  sp.avg_candidates = avg_candidates;
  sp.lattices_per_sentence = draws;

  std::vector<std::string> phonemes = c3::gold_phonemes(s, lex);
  for (int draw = 0; draw < draws; ++draw) {
    std::cout << "# " << sentence_id << " draw " << draw << "\n";
    c3::write_lattice(std::cout, c3::generate_phoneme_lattice(phonemes, cm, sp, s.id, draw));
  }
  return kExitOk;
}

int cmd_experiment(const std::string& corpus_path, const std::string& ua_path,
                   const std::string& uasc_path, const std::string& confusion_path,
                   const std::string& configs_text, std::uint64_t seed,
                   const std::string& out_path, double avg_candidates, int draws,
                   const std::string& params_path, const RelaxationFlags& flags) {
  c3::Corpus corpus = c3::load_corpus_file(corpus_path);
  c3::Lexicon ua = c3::load_lexicon_file(ua_path);
  c3::Lexicon uasc = c3::load_lexicon_file(uasc_path);
  c3::ConfusionMatrix cm = c3::load_confusion_file(confusion_path);

  std::vector<c3::ExperimentConfig> configs;
  std::istringstream cs(configs_text);
  std::string name;
  while (std::getline(cs, name, ','))
    if (!name.empty()) configs.push_back(c3::config_from_name(name));
  if (configs.empty()) throw c3::Error("--configs named no configuration");

  c3::RelaxationParams rp;
  if (!params_path.empty()) rp = c3::load_params_file(params_path);
  rp = apply_flags(rp, flags);

  c3::SimParams sp;
  sp.seed = seed;
  sp.avg_candidates = avg_candidates;
  sp.lattices_per_sentence = draws;

  c3::Grammar g = c3::corpus_grammar(corpus);
  c3::Report report = c3::run_experiment(corpus, ua, uasc, g, configs, rp, sp, cm);

  for (const auto& r : report.results)
    for (const auto& e : r.errors)
      std::cerr << "warning: " << c3::config_name(r.config) << " " << e << "\n";

  if (out_path.empty() || out_path == "-") {
    c3::write_report(std::cout, report);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw c3::Error("cannot open output file: " + out_path);
    c3::write_report(out, report);
    std::cout << "wrote " << out_path << " (" << report.wall_seconds << "s)\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice decoding and categorial-grammar parsing toolkit"};
  app.require_subcommand(1);

  // parse
  auto* parse = app.add_subcommand("parse", "parse a lattice file to the best analysis");
  std::string p_lexicon, p_variant, p_input, p_target, p_params;
  bool p_trace = false;
  RelaxationFlags p_flags;
  parse->add_option("--lexicon", p_lexicon, "lexicon file")->required();
  parse->add_option("--grammar-variant", p_variant, "UA or UA+SC (which variant the lexicon encodes)")
      ->required()
      ->check(CLI::IsMember({"UA", "UA+SC"}));
  parse->add_option("--input", p_input, "phoneme or morpheme lattice file")->required();
  parse->add_option("--target", p_target, "target category")->required();
  parse->add_option("--params", p_params, "relaxation parameter file");
  parse->add_flag("--trace", p_trace, "print one line per relaxation cycle");
  add_relaxation_flags(parse, p_flags);

  // decode
  auto* decode = app.add_subcommand("decode", "decode a phoneme lattice to morphemes");
  std::string d_lexicon, d_input;
  decode->add_option("--lexicon", d_lexicon, "lexicon file")->required();
  decode->add_option("--input", d_input, "phoneme lattice file")->required();

  // oracle
  auto* oracle = app.add_subcommand("oracle", "enumerate every parse of a lattice");
  std::string o_lexicon, o_input, o_target;
  oracle->add_option("--lexicon", o_lexicon, "lexicon file")->required();
  oracle->add_option("--input", o_input, "phoneme or morpheme lattice file")->required();
  oracle->add_option("--target", o_target, "target category (default: any full-span analysis)");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "generate noisy phoneme lattices for a sentence");
  std::string s_lexicon, s_confusion, s_corpus, s_sentence;
  std::uint64_t s_seed = 1;
  double s_avg = 2.2;
  int s_draws = 1;
  simulate->add_option("--lexicon", s_lexicon, "lexicon file")->required();
  simulate->add_option("--confusion", s_confusion, "confusion matrix file")->required();
  simulate->add_option("--corpus", s_corpus, "corpus file defining the sentence")->required();
  simulate->add_option("--sentence", s_sentence, "sentence id")->required();
  simulate->add_option("--seed", s_seed, "random seed");
  simulate->add_option("--avg-candidates", s_avg, "target candidates per position");
  simulate->add_option("--draws", s_draws, "lattices to generate");

  // experiment
  auto* experiment = app.add_subcommand("experiment", "run configurations over a corpus");
  std::string e_corpus, e_ua, e_uasc, e_confusion, e_out, e_params;
  std::string e_configs = "UAB,UAP,UA+SCB,UA+SCP";
  std::uint64_t e_seed = 1;
  double e_avg = 2.2;
  int e_draws = 10;
  RelaxationFlags e_flags;
  experiment->add_option("--corpus", e_corpus, "corpus file")->required();
  experiment->add_option("--lexicon-ua", e_ua, "unordered-argument lexicon")->required();
  experiment->add_option("--lexicon-uasc", e_uasc, "suppressed-category lexicon")->required();
  experiment->add_option("--confusion", e_confusion, "confusion matrix file")->required();
  experiment->add_option("--configs", e_configs, "comma list of UAB,UAP,UA+SCB,UA+SCP");
  experiment->add_option("--seed", e_seed, "random seed");
  experiment->add_option("--out", e_out, "report file ('-' for stdout)");
  experiment->add_option("--avg-candidates", e_avg, "target candidates per position");
  experiment->add_option("--draws", e_draws, "lattices per sentence in lattice mode");
  experiment->add_option("--params", e_params, "relaxation parameter file");
  add_relaxation_flags(experiment, e_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (parse->parsed())
      return cmd_parse(p_lexicon, p_variant, p_input, p_target, p_params, p_flags, p_trace);
    if (decode->parsed()) return cmd_decode(d_lexicon, d_input);
    if (oracle->parsed()) return cmd_oracle(o_lexicon, o_input, o_target);
    if (simulate->parsed())
      return cmd_simulate(s_lexicon, s_confusion, s_corpus, s_sentence, s_seed, s_avg, s_draws);
    if (experiment->parsed())
      return cmd_experiment(e_corpus, e_ua, e_uasc, e_confusion, e_configs, e_seed, e_out, e_avg,
                            e_draws, e_params, e_flags);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
