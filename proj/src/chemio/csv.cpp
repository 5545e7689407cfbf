//
// MoleVers - Copyright 2026 The MoleVers Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "molevers/chemio/csv.hpp"

#include <cstdio>
#include <optional>
#include <string>
#include <utility>

#include "molevers/chemio/smiles.hpp"
#include "text_util.hpp"

namespace molevers::chemio {
namespace {
using internal::parse_double;
using internal::split_fields;
using internal::split_lines;
using internal::trim;

struct Row {
  std::size_t line;  // 1-based
  std::vector<std::string_view> fields;
};

std::vector<Row> data_rows(std::string_view text) {
  std::vector<Row> rows;
  const auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string_view line = trim(lines[i]);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    rows.push_back({ i + 1, split_fields(line, ',') });
  }
  return rows;
}

Molecule parse_row_smiles(std::string_view smiles, std::size_t line) {
  try {
    return parse_smiles(smiles);
  } catch (const FormatError &e) {
    throw FormatError(FormatErrorKind::kParseError,
                      "invalid SMILES '" + std::string(smiles)
                          + "': " + e.what(),
                      line, e.column());
  }
}
}  // namespace

std::vector<LabeledSet> PropertyTable::labeled_sets() const {
  std::vector<LabeledSet> sets(targets());
  for (std::size_t k = 0; k < targets(); ++k) {
    sets[k].assay_id = columns[k];
    sets[k].molecules = molecules;
    sets[k].values.reserve(rows());
    for (std::size_t r = 0; r < rows(); ++r) {
      sets[k].values.push_back(value(r, k));
    }
  }
  return sets;
}

PropertyTable load_property_csv(std::string_view text) {
  const auto rows = data_rows(text);
  if (rows.empty()) {
    throw FormatError(FormatErrorKind::kMissingHeader,
                      "expected header 'smiles,value[,...]'", 1);
  }
  const Row &header = rows.front();
  if (header.fields.size() < 2 || header.fields[0] != "smiles") {
    throw FormatError(FormatErrorKind::kMissingHeader,
                      "expected header 'smiles,value[,...]'", header.line);
  }

  PropertyTable table;
  for (std::size_t k = 1; k < header.fields.size(); ++k) {
    if (header.fields[k].empty()) {
      throw FormatError(FormatErrorKind::kMissingHeader, "empty column name",
                        header.line);
    }
    table.columns.emplace_back(header.fields[k]);
  }

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const Row &row = rows[r];
    if (row.fields.size() != header.fields.size()) {
      throw FormatError(FormatErrorKind::kParseError,
                        "expected " + std::to_string(header.fields.size())
                            + " fields, found "
                            + std::to_string(row.fields.size()),
                        row.line);
    }
    Molecule mol = parse_row_smiles(row.fields[0], row.line);
    for (std::size_t k = 1; k < row.fields.size(); ++k) {
      auto v = parse_double(row.fields[k]);
      if (!v) {
        throw FormatError(FormatErrorKind::kParseError,
                          "bad number '" + std::string(row.fields[k]) + "'",
                          row.line);
      }
      if (!std::isfinite(*v)) {
        throw FormatError(FormatErrorKind::kNonFiniteValue,
                          "value '" + std::string(row.fields[k])
                              + "' is not finite",
                          row.line);
      }
      table.values.push_back(*v);
    }
    table.molecules.push_back(std::move(mol));
  }
  return table;
}

LabeledSet load_labeled_csv(std::string_view text, std::string assay_id) {
  PropertyTable table = load_property_csv(text);
  if (table.targets() != 1) {
    throw FormatError(FormatErrorKind::kMissingHeader,
                      "expected exactly one value column, found "
                          + std::to_string(table.targets()),
                      1);
  }
  LabeledSet set;
  set.assay_id = std::move(assay_id);
  set.molecules = std::move(table.molecules);
  set.values = std::move(table.values);
  return set;
}

std::vector<PairRankRecord> load_pair_csv(std::string_view text) {
  auto rows = data_rows(text);
  std::vector<PairRankRecord> records;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const Row &row = rows[r];
    if (r == 0 && row.fields.size() == 3 && row.fields[0] == "smiles1"
        && row.fields[1] == "smiles2" && row.fields[2] == "prediction") {
      continue;
    }
    if (row.fields.size() != 3) {
      throw FormatError(FormatErrorKind::kParseError,
                        "expected 'smiles1,smiles2,prediction'", row.line);
    }
    if (row.fields[2] != "0" && row.fields[2] != "1") {
      throw FormatError(FormatErrorKind::kBadLabel,
                        "label must be 0 or 1, found '"
                            + std::string(row.fields[2]) + "'",
                        row.line);
    }
    parse_row_smiles(row.fields[0], row.line);
    parse_row_smiles(row.fields[1], row.line);
    records.push_back({ std::string(row.fields[0]), std::string(row.fields[1]),
                        row.fields[2] == "1" ? 1 : 0 });
  }
  return records;
}

std::string serialize_pair_csv(const std::vector<PairRankRecord> &records) {
  std::string out;
  for (const auto &r: records) {
    out += r.smiles1;
    out += ',';
    out += r.smiles2;
    out += r.label == 0 ? ",0\n" : ",1\n";
  }
  return out;
}

std::string serialize_property_csv(const LabeledSet &set) {
  std::string out = "smiles,value\n";
  char buf[64];
  for (std::size_t i = 0; i < set.size(); ++i) {
    std::snprintf(buf, sizeof(buf), ",%.17g\n", set.values[i]);
    out += set.molecules[i].smiles;
    out += buf;
  }
  return out;
}

}  // namespace molevers::chemio
