#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "smartbag/data/dataset.hpp"

namespace smartbag::data {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

std::string header_line() {
  std::string h;
  for (auto name : kFeatureNames) {
    h += name;
    h += ',';
  }
  return h + "label";
}

std::optional<double> parse_real(std::string_view s) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') return std::nullopt;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

Dataset load_csv(std::istream& in, const ClassVocabulary& vocabulary) {
  Dataset out(vocabulary, kFeatureCount);
  std::string line;
  std::size_t row = 0;
  bool have_header = false;

  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    if (!have_header) {
      if (line != header_line())
        throw DatasetError(DatasetError::Kind::BadHeader, row,
                           "row " + std::to_string(row) + ": unexpected header");
      have_header = true;
      continue;
    }

    auto fields = split_fields(line);
    if (fields.size() != kFeatureCount + 1)
      throw DatasetError(DatasetError::Kind::Arity, row,
                         "row " + std::to_string(row) + ": expected " +
                             std::to_string(kFeatureCount + 1) + " columns, got " +
                             std::to_string(fields.size()));

    LabeledExample ex{Eigen::VectorXd(kFeatureCount), 0};
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
      auto v = parse_real(fields[i]);
      if (!v)
        throw DatasetError(DatasetError::Kind::NonNumeric, row,
                           "row " + std::to_string(row) + ": column '" +
                               std::string(kFeatureNames[i]) + "' is not a number");
      ex.features[static_cast<Eigen::Index>(i)] = *v;
    }
    auto label = vocabulary.index_of(fields.back());
    if (!label)
      throw DatasetError(DatasetError::Kind::UnknownLabel, row,
                         "row " + std::to_string(row) + ": unknown label '" +
                             std::string(fields.back()) + "'");
    ex.label = *label;
    out.add(std::move(ex));
  }
  if (!have_header && row == 0) return out;
  if (!have_header)
    throw DatasetError(DatasetError::Kind::BadHeader, row, "missing header");
  return out;
}

void save_csv(const Dataset& dataset, std::ostream& out) {
  if (dataset.feature_count() != kFeatureCount)
    throw std::invalid_argument("save_csv: dataset is not 13-feature sensor data");
  out << header_line() << '\n';
  char buf[64];
  for (const auto& ex : dataset.examples()) {
    for (Eigen::Index i = 0; i < ex.features.size(); ++i) {
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, ex.features[i]);
      out.write(buf, end - buf);
      out.put(',');
    }
    out << dataset.vocabulary().name(ex.label) << '\n';
  }
}

Dataset load_csv_file(const std::string& path, const ClassVocabulary& vocabulary) {
  std::ifstream in(path);
  if (!in) throw DatasetError(DatasetError::Kind::Io, 0, "cannot open " + path);
  return load_csv(in, vocabulary);
}

void save_csv_file(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DatasetError(DatasetError::Kind::Io, 0, "cannot write " + path);
  save_csv(dataset, out);
  if (!out) throw DatasetError(DatasetError::Kind::Io, 0, "write failed: " + path);
}

}  // namespace smartbag::data
