#include "soprc/core.hpp"

#include "soprc/rng.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_map>

namespace soprc {

ParseError::ParseError(std::size_t row, const std::string& what)
    : Error("row " + std::to_string(row) + ": " + what), row_(row) {}

LabeledVector::LabeledVector(std::vector<double> f, Label l) : features(std::move(f)), label(l) {
  if (features.empty()) throw DomainError("feature vector is empty");
  for (double x : features)
    if (!std::isfinite(x)) throw DomainError("feature vector has a non-finite entry");
}

void FeatureMatrix::push_back(std::span<const double> row) {
  if (cols_ == 0) cols_ = row.size();
  if (row.size() != cols_)
    throw ShapeError("row has " + std::to_string(row.size()) + " features, expected " +
                     std::to_string(cols_));
  data_.insert(data_.end(), row.begin(), row.end());
}

Dataset::Dataset(FeatureMatrix positives, FeatureMatrix negatives)
    : positives_(std::move(positives)), negatives_(std::move(negatives)) {
  if (positives_.rows() == 0) throw EmptyClassError("dataset has no positive examples");
  if (negatives_.rows() == 0) throw EmptyClassError("dataset has no negative examples");
  if (positives_.cols() != negatives_.cols())
    throw ShapeError("positive and negative feature dimensions differ");
}

Dataset Dataset::from_vectors(std::span<const LabeledVector> rows) {
  if (rows.empty()) throw EmptyClassError("no rows");
  const std::size_t dim = rows.front().features.size();
  FeatureMatrix pos(dim), neg(dim);
  for (const auto& r : rows) (r.label == Label::positive ? pos : neg).push_back(r.features);
  return Dataset(std::move(pos), std::move(neg));
}

void ScoreRange::validate() const {
  if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi))
    throw SpecError("score range requires finite lo < hi");
}

void ScoreSet::validate(const ScoreRange* range) const {
  if (pos.empty()) throw EmptyClassError("no positive scores");
  if (neg.empty()) throw EmptyClassError("no negative scores");
  for (const auto* v : {&pos, &neg}) {
    for (double s : *v) {
      if (!std::isfinite(s)) throw DomainError("non-finite score");
      if (range && !range->contains(s)) throw RangeError("score outside declared range");
    }
  }
}

// ---------------------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t'))
    s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

double parse_number(std::string_view tok, std::size_t row) {
  tok = trim(tok);
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size())
    throw ParseError(row, "not a number: '" + std::string(tok) + "'");
  if (!std::isfinite(value)) throw ParseError(row, "non-finite value");
  return value;
}

Label parse_label(std::string_view tok, std::size_t row) {
  tok = trim(tok);
  if (tok == "1" || tok == "+1") return Label::positive;
  if (tok == "-1") return Label::negative;
  throw ParseError(row, "label must be +1 or -1, got '" + std::string(tok) + "'");
}

}  // namespace

Dataset parse_dataset(std::istream& in, bool has_header) {
  std::string line;
  std::size_t row = 0;
  if (has_header && std::getline(in, line)) ++row;

  FeatureMatrix pos, neg;
  std::vector<double> features;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++row;
    std::string_view view = trim(line);
    if (view.empty()) continue;

    std::size_t comma = view.find(',');
    if (comma == std::string_view::npos) throw ParseError(row, "expected label and features");
    const Label label = parse_label(view.substr(0, comma), row);

    features.clear();
    view.remove_prefix(comma + 1);
    while (true) {
      comma = view.find(',');
      features.push_back(parse_number(view.substr(0, comma), row));
      if (comma == std::string_view::npos) break;
      view.remove_prefix(comma + 1);
    }
    if (dim == 0) dim = features.size();
    if (features.size() != dim)
      throw ParseError(row, "expected " + std::to_string(dim) + " features, got " +
                                std::to_string(features.size()));
    (label == Label::positive ? pos : neg).push_back(features);
  }
  return Dataset(std::move(pos), std::move(neg));
}

Dataset load_dataset(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset file: " + path.string());
  return parse_dataset(in, has_header);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
  out << std::setprecision(17) << "label";
  for (std::size_t j = 0; j < dataset.dim(); ++j) out << ",f" << j + 1;
  out << '\n';
  auto emit = [&](const FeatureMatrix& m, const char* label) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
      out << label;
      for (double x : m.row(i)) out << ',' << x;
      out << '\n';
    }
  };
  emit(dataset.positives(), "1");
  emit(dataset.negatives(), "-1");
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw CapacityError("cannot draw " + std::to_string(k) + " of " + std::to_string(n));
  // Sparse Fisher-Yates: only displaced slots are stored, so cost is O(k).
  std::unordered_map<std::size_t, std::size_t> moved;
  moved.reserve(2 * k);
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.index(n - i));
    auto at = [&](std::size_t p) {
      auto it = moved.find(p);
      return it == moved.end() ? p : it->second;
    };
    const std::size_t vj = at(j);
    moved[j] = at(i);
    out[i] = vj;
  }
  return out;
}

Batch sample_batch(const Dataset& dataset, std::size_t n_pos, std::size_t n_neg, Rng& rng) {
  if (n_pos < 1 || n_neg < 1) throw CapacityError("batch needs at least one example per class");
  if (n_pos > dataset.num_pos())
    throw CapacityError("n_pos=" + std::to_string(n_pos) + " exceeds N+=" +
                        std::to_string(dataset.num_pos()));
  if (n_neg > dataset.num_neg())
    throw CapacityError("n_neg=" + std::to_string(n_neg) + " exceeds N-=" +
                        std::to_string(dataset.num_neg()));
  Batch b;
  b.pos_indices = sample_without_replacement(dataset.num_pos(), n_pos, rng);
  b.neg_indices = sample_without_replacement(dataset.num_neg(), n_neg, rng);
  return b;
}

Batch sample_batch(const Dataset& dataset, std::size_t n_pos, std::size_t n_neg,
                   const RngHandle& handle) {
  Rng rng = handle.stream();
  return sample_batch(dataset, n_pos, n_neg, rng);
}

}  // namespace soprc
