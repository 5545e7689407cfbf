//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#ifndef MOLEVERS_EVALBENCH_PROTOCOL_HPP_
#define MOLEVERS_EVALBENCH_PROTOCOL_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "molevers/chemio/molecule.hpp"
#include "molevers/evalbench/metrics.hpp"

namespace molevers::evalbench {

class TooFewMolecules: public std::invalid_argument {
public:
  explicit TooFewMolecules(const std::string &assay_id);

  const std::string &assay_id() const { return assay_id_; }

private:
  std::string assay_id_;
};

struct ProtocolConfig {
  std::size_t n_splits = 3;
  std::uint64_t seed = 0;
};

/// Everything a model sees for one (assay, split) cell. `seed` depends only
/// on (protocol seed, assay id, split id).
struct CellInput {
  std::string assay_id;
  std::size_t split_id = 0;
  chemio::LabeledSet train;
  std::vector<chemio::Molecule> test;
  std::uint64_t seed = 0;
};

/// Fits on `train` and returns one prediction per test molecule.
using ModelFactory = std::function<std::vector<double>(const CellInput &)>;

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Uniform shuffle keyed by (seed, fnv1a(assay_id), split_id). The train side
/// gets ceil(n / 2) molecules.
Split make_split(std::size_t n, const std::string &assay_id,
                 std::size_t split_id, std::uint64_t seed);

std::uint64_t cell_seed(std::uint64_t seed, const std::string &assay_id,
                        std::size_t split_id);

struct CellResult {
  std::string assay_id;
  std::size_t split_id = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double mae = 0.0;
  /// NaN when the test truth is constant.
  double r2 = 0.0;
  /// 0 when the predictions are all tied.
  double tau_b = 0.0;

  friend bool operator==(const CellResult &, const CellResult &) = default;
};

struct EvalReport {
  std::vector<CellResult> cells;
  /// Keyed by metric name: "mae", "r2", "tau_b". NaN cells are skipped.
  std::map<std::string, BoxStats> aggregates;
};

/// Cells are ordered by (assay order, split id); metric values are rounded
/// to 6 significant digits so the written report reloads exactly.
EvalReport run_benchmark(const std::vector<chemio::LabeledSet> &assays,
                         const ModelFactory &factory,
                         const ProtocolConfig &cfg);

std::map<std::string, BoxStats> aggregate(const std::vector<CellResult> &cells);

nlohmann::json report_to_json(const EvalReport &report);
EvalReport report_from_json(const nlohmann::json &j);

std::string summary_csv(const EvalReport &report);
std::string boxplot_csv(const EvalReport &report);

/// Per-assay ranking of named runs by mean test MAE over splits. Columns:
/// run,best,second. Ties go to the run name that sorts first.
std::string wins_csv(const std::map<std::string, EvalReport> &runs);

/// Writes results.json, summary.csv and boxplot.csv into `dir`, plus
/// wins.csv when `comparisons` is non-empty. `comparisons` should include
/// this report under some name if it is to take part in the counts.
void emit_report(const EvalReport &report, const std::filesystem::path &dir,
                 const std::map<std::string, EvalReport> &comparisons = {});

EvalReport load_report(const std::filesystem::path &results_json);

}  // namespace molevers::evalbench

#endif  // MOLEVERS_EVALBENCH_PROTOCOL_HPP_
