//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "molevers/chemio/csv.hpp"
#include "molevers/chemio/smiles.hpp"
#include "molevers/chemio/xyz.hpp"
#include "molevers/diffcore/tape.hpp"
#include "molevers/evalbench/protocol.hpp"
#include "molevers/evalbench/synthetic.hpp"
#include "molevers/ranklab/ranklab.hpp"
#include "molevers/training/loops.hpp"
#include "molevers/util/io.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::cli {

namespace fs = std::filesystem;

namespace {

std::string lower_extension(const fs::path &p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::vector<chemio::Molecule> read_smiles_lines(const std::string &text) {
  std::vector<chemio::Molecule> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    if (line.empty() || line[0] == '#') {
      continue;
    }
    try {
      out.push_back(chemio::parse_smiles(line));
    } catch (const chemio::FormatError &e) {
      throw chemio::FormatError(e.kind(), e.detail(), lineno, e.column());
    }
  }
  if (out.empty()) {
    throw chemio::FormatError(chemio::FormatErrorKind::kEmptyInput, "no SMILES lines");
  }
  return out;
}

/// XYZ frames, SMILES lines (.smi, .txt) or the SMILES column of a CSV.
std::vector<chemio::Molecule> read_molecules(const fs::path &path) {
  const std::string text = read_text_file(path);
  const std::string ext = lower_extension(path);
  if (ext == ".xyz") {
    return chemio::read_xyz_frames(text);
  }
  if (ext == ".csv") {
    return chemio::load_property_csv(text).molecules;
  }
  return read_smiles_lines(text);
}

chemio::Molecule prepare(chemio::Molecule mol, const RunConfig &cfg) {
  if (cfg.strip_hydrogens) {
    mol = chemio::strip_hydrogens(std::move(mol));
  }
  if (!mol.has_coords()) {
    if (!cfg.synthesize_coords) {
      throw chemio::FormatError(chemio::FormatErrorKind::kParseError,
                                "molecule '" + mol.smiles
                                    + "' has no coordinates and synthesize_coords is off");
    }
    mol = chemio::with_synthesized_coords(std::move(mol));
  }
  return mol;
}

std::vector<chemio::Molecule> prepare_all(std::vector<chemio::Molecule> mols,
                                          const RunConfig &cfg) {
  for (auto &m: mols) {
    m = prepare(std::move(m), cfg);
  }
  return mols;
}

chemio::LabeledSet read_labeled(const fs::path &path, const RunConfig &cfg) {
  chemio::LabeledSet set =
      chemio::load_labeled_csv(read_text_file(path), path.stem().string());
  set.molecules = prepare_all(std::move(set.molecules), cfg);
  return set;
}

training::TrainConfig seeded(training::TrainConfig tc, const RunConfig &cfg) {
  if (cfg.seed) {
    tc.seed = *cfg.seed;
  }
  return tc;
}

training::Checkpoint read_matching_checkpoint(const fs::path &path,
                                              const RunConfig &cfg) {
  training::Checkpoint ckpt = training::read_checkpoint(path);
  if (!(ckpt.encoder == cfg.encoder)) {
    nlohmann::json a = ckpt.encoder;
    nlohmann::json b = cfg.encoder;
    throw diffcore::ShapeMismatch("checkpoint '" + path.string()
                                  + "' was written for encoder " + a.dump()
                                  + " but the config asks for " + b.dump());
  }
  return ckpt;
}

class MetricsLog {
public:
  training::MetricsSink sink() {
    return [this](const nlohmann::json &j) { text_ += j.dump() + "\n"; };
  }
  void write(const fs::path &model_path) const {
    write_text_file(model_path.string() + ".metrics.jsonl", text_);
  }

private:
  std::string text_;
};

std::string fixed(double v, int digits = 4) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

struct Options {
  fs::path config;
  fs::path out;
  fs::path init;
  fs::path labels;
  fs::path train;
  fs::path pairs;
  fs::path model;
  fs::path assays;
  fs::path data;
  fs::path file;
  std::string descriptor;
  double flip = 0.0;
  std::size_t cap = ranklab::kDefaultPairCap;
  std::size_t n_assays = 22;
  std::size_t per_assay = 50;
  std::size_t n_pretrain = 200;
  std::optional<std::uint64_t> seed;
  bool dry_run = false;
};

RunConfig load_config(const Options &o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) {
    cfg.seed = o.seed;
  }
  return cfg;
}

int cmd_parse(const Options &o, std::ostream &out) {
  const std::string text = read_text_file(o.file);
  const std::string ext = lower_extension(o.file);
  std::vector<chemio::Molecule> mols;
  if (ext == ".csv") {
    const auto head = text.substr(0, text.find('\n'));
    if (head.rfind("smiles1,", 0) == 0) {
      const auto records = chemio::load_pair_csv(text);
      out << "pairs: " << records.size() << "\n";
      return kOk;
    }
    const chemio::PropertyTable table = chemio::load_property_csv(text);
    out << "targets: " << table.targets() << "\n";
    mols = table.molecules;
  } else {
    mols = read_molecules(o.file);
  }
  std::array<std::size_t, chemio::kNumElements> counts{};
  std::size_t lo = static_cast<std::size_t>(-1);
  std::size_t hi = 0;
  std::size_t total = 0;
  std::size_t with_coords = 0;
  for (const auto &m: mols) {
    lo = std::min(lo, m.n_atoms());
    hi = std::max(hi, m.n_atoms());
    total += m.n_atoms();
    with_coords += m.has_coords() ? 1 : 0;
    const auto c = chemio::element_counts(m);
    for (int e = 0; e < chemio::kNumElements; ++e) {
      counts[e] += static_cast<std::size_t>(c[e]);
    }
  }
  out << "molecules: " << mols.size() << "\n";
  out << "atoms: min " << lo << " max " << hi << " mean "
      << fixed(static_cast<double>(total) / static_cast<double>(mols.size()), 2)
      << "\n";
  out << "with coordinates: " << with_coords << "\n";
  out << "elements:";
  for (int e = 0; e < chemio::kNumElements; ++e) {
    if (counts[e] > 0) {
      out << ' ' << chemio::element_symbol(static_cast<chemio::Element>(e)) << '='
          << counts[e];
    }
  }
  out << "\n";
  return kOk;
}

int cmd_pretrain1(const Options &o, std::ostream &out) {
  const RunConfig cfg = load_config(o);
  fs::path data = o.data;
  if (data.empty()) {
    if (!cfg.pretrain1.data) {
      throw std::invalid_argument("pretrain1 needs --data or pretrain1.data in the config");
    }
    data = *cfg.pretrain1.data;
  }
  const auto mols = prepare_all(read_molecules(data), cfg);
  const training::TrainConfig tc = seeded(cfg.pretrain1.train, cfg);
  out << "pretrain1: " << mols.size() << " molecules, " << tc.steps << " steps\n";
  if (o.dry_run) {
    out << "dry run: inputs valid\n";
    return kOk;
  }
  training::TrainState state = training::init_state(cfg.encoder, tc.seed);
  MetricsLog log;
  const training::Stage1Losses l = training::pretrain_stage1(state, mols, tc, log.sink());
  training::Checkpoint ckpt = training::to_checkpoint(state, "pretrain1");
  ckpt.meta["train"] = tc;
  const std::string bytes = training::serialize_checkpoint(ckpt);
  write_text_file(o.out, bytes);
  log.write(o.out);
  out << "L_MAP " << fixed(l.map) << " L_X " << fixed(l.x) << " L_P " << fixed(l.p)
      << " L_D " << fixed(l.d) << " map_accuracy " << fixed(l.map_accuracy) << "\n";
  out << "checkpoint " << o.out.string() << " fnv1a " << std::hex << fnv1a(bytes)
      << std::dec << "\n";
  return kOk;
}

int cmd_pretrain2(const Options &o, std::ostream &out) {
  const RunConfig cfg = load_config(o);
  const training::Checkpoint init = read_matching_checkpoint(o.init, cfg);
  chemio::PropertyTable table = chemio::load_property_csv(read_text_file(o.labels));
  if (table.targets() != cfg.encoder.aux_targets) {
    throw chemio::FormatError(chemio::FormatErrorKind::kMissingHeader,
                              "'" + o.labels.string() + "' has "
                                  + std::to_string(table.targets())
                                  + " label columns, expected "
                                  + std::to_string(cfg.encoder.aux_targets),
                              1);
  }
  const auto mols = prepare_all(std::move(table.molecules), cfg);
  const training::TrainConfig tc = seeded(cfg.pretrain2, cfg);
  out << "pretrain2: " << mols.size() << " molecules, " << table.targets()
      << " targets, " << tc.epochs << " epochs\n";
  if (o.dry_run) {
    out << "dry run: inputs valid\n";
    return kOk;
  }
  training::TrainState state = training::state_from_checkpoint(init);
  MetricsLog log;
  const std::vector<double> losses =
      training::pretrain_stage2(state, mols, table.values, tc, log.sink());
  training::Checkpoint ckpt = training::to_checkpoint(state, "pretrain2");
  ckpt.meta["train"] = tc;
  ckpt.meta["aux_columns"] = table.columns;
  write_checkpoint(o.out, ckpt);
  log.write(o.out);
  out << "final loss " << fixed(losses.empty() ? 0.0 : losses.back()) << "\n";
  return kOk;
}

int cmd_finetune(const Options &o, std::ostream &out) {
  const RunConfig cfg = load_config(o);
  const training::Checkpoint init = read_matching_checkpoint(o.init, cfg);
  training::FinetuneData data;
  const chemio::LabeledSet train = read_labeled(o.train, cfg);
  data.train = train.molecules;
  data.values = train.values;
  nlohmann::json gate_meta = { { "pairs", !o.pairs.empty() } };
  if (!o.pairs.empty()) {
    data.pairs = chemio::load_pair_csv(read_text_file(o.pairs));
    if (!cfg.finetune.use_pairs) {
      out << "pairs ignored (use_pairs=false)\n";
    } else if (cfg.finetune.gate) {
      ranklab::RankQuality q;
      try {
        q = ranklab::pairwise_tau(data.pairs, train);
      } catch (const ranklab::MissingTruth &e) {
        throw training::UnresolvablePairSmiles("pair SMILES '" + e.smiles()
                                               + "' is not in the training set");
      }
      data.use_pairs = ranklab::gate(q, cfg.finetune.gate_threshold);
      out << "gate=" << (data.use_pairs ? "open" : "closed") << " abs_tau "
          << fixed(q.abs_tau) << " threshold " << cfg.finetune.gate_threshold
          << " pairs " << q.n_pairs << "\n";
      gate_meta["abs_tau"] = q.abs_tau;
    } else {
      data.use_pairs = true;
      out << "gate=disabled\n";
    }
  }
  gate_meta["use_pairs"] = data.use_pairs;
  const training::TrainConfig tc = seeded(cfg.finetune.train, cfg);
  out << "finetune: " << data.train.size() << " molecules, " << tc.epochs << " epochs\n";
  if (o.dry_run) {
    out << "dry run: inputs valid\n";
    return kOk;
  }
  training::TrainState state = training::state_from_checkpoint(init);
  MetricsLog log;
  const auto epochs = training::finetune(state, data, tc, log.sink());
  training::Checkpoint ckpt = training::to_checkpoint(state, "finetune");
  ckpt.meta["train"] = tc;
  ckpt.meta["gate"] = gate_meta;
  write_checkpoint(o.out, ckpt);
  log.write(o.out);
  if (!epochs.empty()) {
    out << "final loss " << fixed(epochs.back().loss) << " reg " << fixed(epochs.back().reg_loss)
        << " rank " << fixed(epochs.back().rank_loss) << "\n";
  }
  return kOk;
}

int cmd_eval(const Options &o, std::ostream &out) {
  const RunConfig cfg = load_config(o);
  const training::Checkpoint model = read_matching_checkpoint(o.model, cfg);
  if (!fs::is_directory(o.assays)) {
    throw IoError("assay directory '" + o.assays.string() + "' does not exist");
  }
  std::vector<fs::path> files;
  for (const auto &entry: fs::directory_iterator(o.assays)) {
    if (entry.is_regular_file() && lower_extension(entry.path()) == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw IoError("no .csv files in '" + o.assays.string() + "'");
  }
  std::vector<chemio::LabeledSet> assays;
  for (const auto &f: files) {
    assays.push_back(read_labeled(f, cfg));
    if (assays.back().size() < 4) {
      throw evalbench::TooFewMolecules(assays.back().assay_id);
    }
  }
  evalbench::ProtocolConfig pc;
  pc.n_splits = cfg.eval.n_splits;
  pc.seed = cfg.seed.value_or(cfg.finetune.train.seed);
  out << "eval: " << assays.size() << " assays, " << pc.n_splits << " splits each\n";
  if (o.dry_run) {
    out << "dry run: inputs valid\n";
    return kOk;
  }
  const training::TrainState base = training::state_from_checkpoint(model);
  const evalbench::ModelFactory factory = [&](const evalbench::CellInput &in) {
    training::TrainState state = base;
    training::TrainConfig tc = cfg.finetune.train;
    tc.seed = in.seed;
    training::FinetuneData d;
    d.train = in.train.molecules;
    d.values = in.train.values;
    training::finetune(state, d, tc);
    return training::predict(state, in.test);
  };
  const evalbench::EvalReport report = evalbench::run_benchmark(assays, factory, pc);
  evalbench::emit_report(report, o.out);
  for (const auto &[name, b]: report.aggregates) {
    out << name << " median " << format_g6(b.median) << " q1 " << format_g6(b.q1)
        << " q3 " << format_g6(b.q3) << "\n";
  }
  return kOk;
}

int cmd_rankgen(const Options &o, std::ostream &out) {
  const ranklab::Descriptor desc = ranklab::descriptor(o.descriptor);
  if (!(o.flip >= 0.0 && o.flip <= 1.0)) {
    throw std::invalid_argument("--flip must lie in [0, 1]");
  }
  RunConfig cfg = load_config(o);
  const chemio::LabeledSet train = read_labeled(o.train, cfg);
  const std::uint64_t seed = cfg.seed.value_or(0);
  const auto pairs = ranklab::generate_all_pairs(train.molecules, o.cap, seed);
  out << "rankgen: " << train.size() << " molecules, " << pairs.size() << " pairs\n";
  if (o.dry_run) {
    out << "dry run: inputs valid\n";
    return kOk;
  }
  const ranklab::MockRankProvider provider(desc, o.flip,
                                           derive_seed(seed, { fnv1a("rankgen") }));
  const auto records = provider.label(train.molecules, pairs);
  write_text_file(o.out, chemio::serialize_pair_csv(records));
  const ranklab::RankQuality q = ranklab::pairwise_tau(records, train);
  out << "abs_tau vs labels " << fixed(q.abs_tau) << " accuracy " << fixed(q.accuracy)
      << "\n";
  return kOk;
}

int cmd_make_synthetic(const Options &o, std::ostream &out) {
  evalbench::SyntheticSuiteConfig sc;
  sc.n_assays = o.n_assays;
  sc.molecules_per_assay = o.per_assay;
  sc.seed = o.seed.value_or(0);
  if (o.dry_run) {
    out << "dry run: would write " << sc.n_assays << " assays\n";
    return kOk;
  }
  const auto suite = evalbench::synthetic_suite(sc);
  const fs::path assays = o.out / "assays";
  std::error_code ec;
  fs::create_directories(assays, ec);
  if (ec) {
    throw IoError("cannot create '" + assays.string() + "': " + ec.message());
  }
  for (const auto &set: suite) {
    write_text_file(assays / (set.assay_id + ".csv"), chemio::serialize_property_csv(set));
  }
  const auto corpus = evalbench::random_corpus(o.n_pretrain, sc.min_atoms, sc.max_atoms,
                                               derive_seed(sc.seed, { fnv1a("pretrain") }));
  std::string xyz;
  for (const auto &m: corpus) {
    xyz += chemio::write_xyz(m, m.smiles);
  }
  write_text_file(o.out / "pretrain.xyz", xyz);
  const auto aux = evalbench::synthetic_aux_targets(corpus);
  std::string csv = "smiles,property,hetero_count,mean_distance\n";
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    csv += corpus[i].smiles;
    for (std::size_t k = 0; k < 3; ++k) {
      csv += "," + format_g6(aux[3 * i + k]);
    }
    csv += "\n";
  }
  write_text_file(o.out / "aux.csv", csv);
  out << "wrote " << suite.size() << " assays, " << corpus.size()
      << " pretraining molecules to " << o.out.string() << "\n";
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out,
            std::ostream &err) {
  CLI::App app("Two-stage molecular property pretraining, finetuning and evaluation",
               "molevers");
  app.require_subcommand(1);
  Options o;
  std::uint64_t seed = 0;

  const auto common = [&](CLI::App *sub, bool with_config) {
    if (with_config) {
      sub->add_option("--config", o.config, "Run configuration (JSON)")->required();
    }
    sub->add_option("--seed", seed, "Override every seed in the config");
    sub->add_flag("--dry-run", o.dry_run, "Validate inputs without computing");
  };

  CLI::App *parse = app.add_subcommand("parse", "Validate SMILES/XYZ/CSV input");
  parse->add_option("file", o.file)->required();
  parse->add_flag("--dry-run", o.dry_run);

  CLI::App *p1 = app.add_subcommand("pretrain1", "Stage-1 denoising pretraining");
  common(p1, true);
  p1->add_option("--data", o.data, "Override pretrain1.data");
  p1->add_option("--out", o.out)->required();

  CLI::App *p2 = app.add_subcommand("pretrain2", "Stage-2 auxiliary-label pretraining");
  common(p2, true);
  p2->add_option("--init", o.init)->required();
  p2->add_option("--labels", o.labels)->required();
  p2->add_option("--out", o.out)->required();

  CLI::App *ft = app.add_subcommand("finetune", "Finetune on a labeled assay");
  common(ft, true);
  ft->add_option("--init", o.init)->required();
  ft->add_option("--train", o.train)->required();
  ft->add_option("--pairs", o.pairs);
  ft->add_option("--out", o.out)->required();

  CLI::App *ev = app.add_subcommand("eval", "Run the split protocol over an assay directory");
  common(ev, true);
  ev->add_option("--model", o.model)->required();
  ev->add_option("--assays", o.assays)->required();
  ev->add_option("--out", o.out)->required();

  CLI::App *rg = app.add_subcommand("rankgen", "Generate mock pairwise ranking labels");
  common(rg, false);
  rg->add_option("--config", o.config);
  rg->add_option("--train", o.train)->required();
  rg->add_option("--descriptor", o.descriptor)->required();
  rg->add_option("--flip", o.flip, "Label flip probability in [0, 1]");
  rg->add_option("--max-pairs", o.cap);
  rg->add_option("--out", o.out)->required();

  CLI::App *ms = app.add_subcommand("make-synthetic", "Write the synthetic assay suite");
  common(ms, false);
  ms->add_option("--assays", o.n_assays);
  ms->add_option("--per-assay", o.per_assay);
  ms->add_option("--pretrain", o.n_pretrain);
  ms->add_option("--out", o.out)->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  for (CLI::App *sub: app.get_subcommands()) {
    if (sub->get_option_no_throw("--seed") != nullptr
        && sub->get_option("--seed")->count() > 0) {
      o.seed = seed;
    }
  }

  const std::map<CLI::App *, std::function<int(const Options &, std::ostream &)>> commands = {
    { parse, cmd_parse },       { p1, cmd_pretrain1 }, { p2, cmd_pretrain2 },
    { ft, cmd_finetune },       { ev, cmd_eval },      { rg, cmd_rankgen },
    { ms, cmd_make_synthetic },
  };
  try {
    return commands.at(app.get_subcommands().front())(o, out);
  } catch (const chemio::FormatError &e) {
    err << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const IoError &e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const training::NonFiniteLoss &e) {
    err << "numeric abort: " << e.what() << "\n";
    return kNumeric;
  } catch (const diffcore::ShapeMismatch &e) {
    err << "shape mismatch: " << e.what() << "\n";
    return kShape;
  } catch (const evalbench::TooFewMolecules &e) {
    err << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const training::CheckpointFormatError &e) {
    err << "format error: " << e.what() << "\n";
    return kFormat;
  } catch (const std::invalid_argument &e) {
    err << "format error: " << e.what() << "\n";
    return kFormat;
  }
}

}  // namespace molevers::cli
