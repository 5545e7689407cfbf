//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/evalbench/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "molevers/util/io.hpp"
#include "molevers/util/rng.hpp"

namespace molevers::evalbench {

namespace {
const char *const kMetricNames[] = { "mae", "r2", "tau_b" };

double round_g6(double v) {
  return std::isfinite(v) ? std::stod(format_g6(v)) : v;
}

double metric(const CellResult &c, std::string_view name) {
  if (name == "mae") {
    return c.mae;
  }
  if (name == "r2") {
    return c.r2;
  }
  return c.tau_b;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

double number_from(const nlohmann::json &j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

std::string csv_number(double v) {
  return std::isfinite(v) ? format_g6(v) : std::string("nan");
}
}  // namespace

TooFewMolecules::TooFewMolecules(const std::string &assay_id)
    : std::invalid_argument("assay '" + assay_id
                            + "' has fewer than 4 molecules"),
      assay_id_(assay_id) { }

std::uint64_t cell_seed(std::uint64_t seed, const std::string &assay_id,
                        std::size_t split_id) {
  return derive_seed(seed, { fnv1a(assay_id), split_id });
}

Split make_split(std::size_t n, const std::string &assay_id,
                 std::size_t split_id, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cell_seed(seed, assay_id, split_id));
  for (std::size_t i = n; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(order[i - 1], order[pick(rng)]);
  }
  const std::size_t n_train = (n + 1) / 2;
  Split s;
  s.train.assign(order.begin(), order.begin() + static_cast<long>(n_train));
  s.test.assign(order.begin() + static_cast<long>(n_train), order.end());
  return s;
}

std::map<std::string, BoxStats> aggregate(const std::vector<CellResult> &cells) {
  std::map<std::string, BoxStats> out;
  for (const char *name: kMetricNames) {
    std::vector<double> values;
    for (const CellResult &c: cells) {
      const double v = metric(c, name);
      if (std::isfinite(v)) {
        values.push_back(v);
      }
    }
    if (!values.empty()) {
      BoxStats b = box_stats(std::move(values));
      b = { round_g6(b.median), round_g6(b.q1), round_g6(b.q3),
            round_g6(b.whisker_lo), round_g6(b.whisker_hi), round_g6(b.mean) };
      out.emplace(name, b);
    }
  }
  return out;
}

EvalReport run_benchmark(const std::vector<chemio::LabeledSet> &assays,
                         const ModelFactory &factory,
                         const ProtocolConfig &cfg) {
  for (const auto &assay: assays) {
    if (assay.molecules.size() < 4) {
      throw TooFewMolecules(assay.assay_id);
    }
    if (assay.values.size() != assay.molecules.size()) {
      throw LengthMismatch("assay '" + assay.assay_id
                           + "': value count differs from molecule count");
    }
  }
  EvalReport report;
  for (const auto &assay: assays) {
    for (std::size_t split_id = 0; split_id < cfg.n_splits; ++split_id) {
      const Split split = make_split(assay.molecules.size(), assay.assay_id,
                                     split_id, cfg.seed);
      CellInput in;
      in.assay_id = assay.assay_id;
      in.split_id = split_id;
      in.seed = cell_seed(cfg.seed, assay.assay_id, split_id);
      in.train.assay_id = assay.assay_id;
      for (std::size_t i: split.train) {
        in.train.molecules.push_back(assay.molecules[i]);
        in.train.values.push_back(assay.values[i]);
      }
      std::vector<double> truth;
      for (std::size_t i: split.test) {
        in.test.push_back(assay.molecules[i]);
        truth.push_back(assay.values[i]);
      }
      const std::vector<double> pred = factory(in);
      if (pred.size() != truth.size()) {
        throw LengthMismatch("model returned " + std::to_string(pred.size())
                             + " predictions for " + std::to_string(truth.size())
                             + " test molecules in assay '" + assay.assay_id + "'");
      }

      CellResult c;
      c.assay_id = assay.assay_id;
      c.split_id = split_id;
      c.n_train = split.train.size();
      c.n_test = split.test.size();
      c.mae = round_g6(mae(pred, truth));
      try {
        c.r2 = round_g6(r2(pred, truth));
      } catch (const ZeroVariance &) {
        c.r2 = std::numeric_limits<double>::quiet_NaN();
      }
      try {
        c.tau_b = round_g6(kendall_tau_b(pred, truth));
      } catch (const AllTied &) {
        c.tau_b = 0.0;
      }
      report.cells.push_back(std::move(c));
    }
  }
  report.aggregates = aggregate(report.cells);
  return report;
}

nlohmann::json report_to_json(const EvalReport &report) {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellResult &c: report.cells) {
    cells.push_back({ { "assay_id", c.assay_id },
                      { "split_id", c.split_id },
                      { "n_train", c.n_train },
                      { "n_test", c.n_test },
                      { "mae", number_or_null(c.mae) },
                      { "r2", number_or_null(c.r2) },
                      { "tau_b", number_or_null(c.tau_b) } });
  }
  nlohmann::json agg = nlohmann::json::object();
  for (const auto &[name, b]: report.aggregates) {
    agg[name] = { { "median", b.median },         { "q1", b.q1 },
                  { "q3", b.q3 },                 { "whisker_lo", b.whisker_lo },
                  { "whisker_hi", b.whisker_hi }, { "mean", b.mean } };
  }
  return { { "cells", cells }, { "aggregates", agg } };
}

EvalReport report_from_json(const nlohmann::json &j) {
  EvalReport report;
  for (const auto &c: j.at("cells")) {
    CellResult r;
    r.assay_id = c.at("assay_id").get<std::string>();
    r.split_id = c.at("split_id").get<std::size_t>();
    r.n_train = c.at("n_train").get<std::size_t>();
    r.n_test = c.at("n_test").get<std::size_t>();
    r.mae = number_from(c.at("mae"));
    r.r2 = number_from(c.at("r2"));
    r.tau_b = number_from(c.at("tau_b"));
    report.cells.push_back(std::move(r));
  }
  for (const auto &[name, b]: j.at("aggregates").items()) {
    report.aggregates.emplace(
        name, BoxStats{ b.at("median").get<double>(), b.at("q1").get<double>(),
                        b.at("q3").get<double>(), b.at("whisker_lo").get<double>(),
                        b.at("whisker_hi").get<double>(), b.at("mean").get<double>() });
  }
  return report;
}

std::string summary_csv(const EvalReport &report) {
  std::ostringstream out;
  out << "assay_id,split_id,n_train,n_test,mae,r2,tau_b\n";
  for (const CellResult &c: report.cells) {
    out << c.assay_id << ',' << c.split_id << ',' << c.n_train << ','
        << c.n_test << ',' << csv_number(c.mae) << ',' << csv_number(c.r2)
        << ',' << csv_number(c.tau_b) << '\n';
  }
  return out.str();
}

std::string boxplot_csv(const EvalReport &report) {
  std::ostringstream out;
  out << "metric,median,q1,q3,whisker_lo,whisker_hi,mean\n";
  for (const auto &[name, b]: report.aggregates) {
    out << name << ',' << format_g6(b.median) << ',' << format_g6(b.q1) << ','
        << format_g6(b.q3) << ',' << format_g6(b.whisker_lo) << ','
        << format_g6(b.whisker_hi) << ',' << format_g6(b.mean) << '\n';
  }
  return out.str();
}

std::string wins_csv(const std::map<std::string, EvalReport> &runs) {
  // assay -> run -> (sum, count)
  std::map<std::string, std::map<std::string, std::pair<double, std::size_t>>> per;
  for (const auto &[run, report]: runs) {
    for (const CellResult &c: report.cells) {
      auto &acc = per[c.assay_id][run];
      acc.first += c.mae;
      acc.second += 1;
    }
  }
  std::map<std::string, std::pair<std::size_t, std::size_t>> wins;
  for (const auto &[run, report]: runs) {
    wins[run] = { 0, 0 };
  }
  for (const auto &[assay, by_run]: per) {
    std::vector<std::pair<double, std::string>> ranked;
    for (const auto &[run, acc]: by_run) {
      ranked.emplace_back(acc.first / static_cast<double>(acc.second), run);
    }
    std::sort(ranked.begin(), ranked.end());
    if (!ranked.empty()) {
      ++wins[ranked[0].second].first;
    }
    if (ranked.size() > 1) {
      ++wins[ranked[1].second].second;
    }
  }
  std::ostringstream out;
  out << "run,best,second\n";
  for (const auto &[run, w]: wins) {
    out << run << ',' << w.first << ',' << w.second << '\n';
  }
  return out.str();
}

void emit_report(const EvalReport &report, const std::filesystem::path &dir,
                 const std::map<std::string, EvalReport> &comparisons) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  }
  write_text_file(dir / "results.json", report_to_json(report).dump(2) + "\n");
  write_text_file(dir / "summary.csv", summary_csv(report));
  write_text_file(dir / "boxplot.csv", boxplot_csv(report));
  if (!comparisons.empty()) {
    write_text_file(dir / "wins.csv", wins_csv(comparisons));
  }
}

EvalReport load_report(const std::filesystem::path &results_json) {
  const std::string text = read_text_file(results_json);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception &e) {
    throw std::invalid_argument("'" + results_json.string() + "': " + e.what());
  }
  return report_from_json(j);
}

}  // namespace molevers::evalbench
