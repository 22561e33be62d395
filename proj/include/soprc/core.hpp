#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace soprc {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// A class (positives or negatives) has no members.
class EmptyClassError : public Error {
 public:
  using Error::Error;
};

/// A request exceeds what a dataset can supply (e.g. batch larger than class).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

class MonotonicityError : public DomainError {
 public:
  using DomainError::DomainError;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Value outside the declared score range [b, B].
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or configuration settings.
class SpecError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Data model
// ---------------------------------------------------------------------------

enum class Label : int { negative = -1, positive = 1 };

struct LabeledVector {
  std::vector<double> features;
  Label label;

  /// Throws DomainError on empty or non-finite features.
  LabeledVector(std::vector<double> features, Label label);
};

/// Row-major dense matrix of feature vectors.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::size_t cols) : cols_(cols) {}

  void push_back(std::span<const double> row);

  std::size_t rows() const noexcept { return cols_ == 0 ? 0 : data_.size() / cols_; }
  std::size_t cols() const noexcept { return cols_; }

  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Labeled data split by class. Immutable once constructed.
class Dataset {
 public:
  /// Throws EmptyClassError if either class is empty, ShapeError on a
  /// dimension mismatch.
  Dataset(FeatureMatrix positives, FeatureMatrix negatives);

  static Dataset from_vectors(std::span<const LabeledVector> rows);

  const FeatureMatrix& positives() const noexcept { return positives_; }
  const FeatureMatrix& negatives() const noexcept { return negatives_; }
  std::size_t dim() const noexcept { return positives_.cols(); }
  std::size_t num_pos() const noexcept { return positives_.rows(); }
  std::size_t num_neg() const noexcept { return negatives_.rows(); }
  std::size_t size() const noexcept { return num_pos() + num_neg(); }

  /// pi = N+ / (N+ + N-)
  double prior() const noexcept {
    return static_cast<double>(num_pos()) / static_cast<double>(size());
  }

 private:
  FeatureMatrix positives_;
  FeatureMatrix negatives_;
};

struct Batch {
  std::vector<std::size_t> pos_indices;
  std::vector<std::size_t> neg_indices;

  /// pi0 = n+ / (n+ + n-)
  double sampling_rate() const noexcept {
    return static_cast<double>(pos_indices.size()) /
           static_cast<double>(pos_indices.size() + neg_indices.size());
  }
};

/// Closed score interval [lo, hi].
struct ScoreRange {
  double lo = -1.0;
  double hi = 1.0;

  bool contains(double s) const noexcept { return s >= lo && s <= hi; }
  void validate() const;
};

struct ScoreSet {
  std::vector<double> pos;
  std::vector<double> neg;

  /// Throws EmptyClassError / DomainError / RangeError.
  void validate(const ScoreRange* range = nullptr) const;
  double prior() const noexcept {
    return static_cast<double>(pos.size()) / static_cast<double>(pos.size() + neg.size());
  }
};

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

/// Rows are `label,f1,f2,...`, label in {+1, 1, -1}. LF or CRLF line endings.
Dataset parse_dataset(std::istream& in, bool has_header);
Dataset load_dataset(const std::filesystem::path& path, bool has_header);
/// Header label,f1,...,fd then one row per point, positives first.
void write_dataset(std::ostream& out, const Dataset& dataset);

// ---------------------------------------------------------------------------
// Batching
// ---------------------------------------------------------------------------

class Rng;
struct RngHandle;

/// Uniform sampling without replacement within each class.
Batch sample_batch(const Dataset& dataset, std::size_t n_pos, std::size_t n_neg, Rng& rng);
Batch sample_batch(const Dataset& dataset, std::size_t n_pos, std::size_t n_neg,
                   const RngHandle& handle);

/// k distinct indices from [0, n) in random order (partial Fisher-Yates).
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

}  // namespace soprc
