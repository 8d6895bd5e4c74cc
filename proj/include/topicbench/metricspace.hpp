#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topicbench/embedding.hpp"
#include "topicbench/error.hpp"
#include "topicbench/text_io.hpp"

namespace topicbench {

enum class MetricId { EuclideanNormalized, Cosine };

inline std::string_view to_string(MetricId metric) {
  return metric == MetricId::Cosine ? "cosine" : "euclidean-normalized";
}

inline std::optional<MetricId> parse_metric(std::string_view text) {
  if (text == "cosine") return MetricId::Cosine;
  if (text == "euclidean-normalized" || text == "euclidean") return MetricId::EuclideanNormalized;
  return std::nullopt;
}

inline double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "euclidean distance of dims " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cosine of dims " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorCode::ZeroNorm, "cosine of a zero-norm vector");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

/// 1 - cosine similarity, in [0, 2].
inline double cosine_distance(std::span<const double> a, std::span<const double> b) {
  return 1.0 - cosine_similarity(a, b);
}

namespace detail {

/// Dense symmetric n x n matrix tagged with the metric it was built from.
class PairMatrix {
 public:
  PairMatrix() = default;
  PairMatrix(std::size_t n, MetricId metric, double fill = 0.0) : n_(n), metric_(metric), values_(n * n, fill) {}
  PairMatrix(std::size_t n, MetricId metric, std::vector<double> values)
      : n_(n), metric_(metric), values_(std::move(values)) {
    if (values_.size() != n_ * n_) throw Error(ErrorCode::DimensionMismatch, "matrix data is not n*n");
  }

  std::size_t size() const { return n_; }
  MetricId metric() const { return metric_; }
  double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return std::span(values_).subspan(i * n_, n_); }
  const std::vector<double>& values() const { return values_; }

  void set_pair(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }

  bool operator==(const PairMatrix&) const = default;

 private:
  std::size_t n_ = 0;
  MetricId metric_ = MetricId::EuclideanNormalized;
  std::vector<double> values_;
};

}  // namespace detail

/// Symmetric pairwise distances with a zero diagonal. Memory is n^2 doubles.
class DistanceMatrix : public detail::PairMatrix {
 public:
  using PairMatrix::PairMatrix;
};

/// s = 1 - d elementwise.
class SimilarityMatrix : public detail::PairMatrix {
 public:
  using PairMatrix::PairMatrix;
};

/// Euclidean entries are divided by the largest pairwise distance inside this chunk, so values are
/// chunk-relative and silhouettes from different chunks are not comparable.
inline DistanceMatrix build_distance_matrix(const EmbeddedChunk& chunk, MetricId metric) {
  const std::size_t n = chunk.rows();
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "distance matrix needs at least 2 rows");
  DistanceMatrix d(n, metric);
  if (metric == MetricId::EuclideanNormalized) {
    double max_raw = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double raw = euclidean_distance(chunk.row(i), chunk.row(j));
        d.set_pair(i, j, raw);
        max_raw = std::max(max_raw, raw);
      }
    }
    if (max_raw == 0.0) throw Error(ErrorCode::DegenerateChunk, "all points coincide; normalized euclidean undefined");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) d.set_pair(i, j, d(i, j) / max_raw);
    }
  } else {
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
      norms[i] = std::sqrt(squared_norm(chunk.row(i)));
      if (norms[i] == 0.0) throw Error(ErrorCode::ZeroNorm, "row " + std::to_string(i) + " has zero norm");
    }
    for (std::size_t i = 0; i < n; ++i) {
      auto a = chunk.row(i);
      for (std::size_t j = i + 1; j < n; ++j) {
        auto b = chunk.row(j);
        double dot = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) dot += a[k] * b[k];
        double sim = std::clamp(dot / (norms[i] * norms[j]), -1.0, 1.0);
        d.set_pair(i, j, 1.0 - sim);
      }
    }
  }
  return d;
}

inline SimilarityMatrix to_similarity(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  SimilarityMatrix s(n, d.metric(), 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s.set_pair(i, j, 1.0 - d(i, j));
  }
  return s;
}

/// Dump format: "n metric" then n lines of n values.
inline std::string format_matrix(const detail::PairMatrix& m) {
  std::string out = std::to_string(m.size()) + " " + std::string(to_string(m.metric())) + "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (j) out += ' ';
      out += io::format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

inline DistanceMatrix parse_distance_matrix(std::span<const std::string> lines) {
  if (lines.empty()) throw Error(ErrorCode::Parse, "empty matrix dump");
  auto header = io::split_ws(lines[0]);
  if (header.size() != 2) throw Error(ErrorCode::Parse, "matrix header must be 'n metric'");
  auto n = io::parse_int<std::size_t>(header[0]);
  auto metric = parse_metric(header[1]);
  if (!n || !metric) throw Error(ErrorCode::Parse, "bad matrix header '" + lines[0] + "'");
  if (lines.size() < *n + 1) throw Error(ErrorCode::RowCount, "matrix dump has fewer than n rows");
  std::vector<double> values;
  values.reserve(*n * *n);
  for (std::size_t i = 0; i < *n; ++i) {
    auto fields = io::split_ws(lines[i + 1]);
    if (fields.size() != *n) throw Error(ErrorCode::DimensionMismatch, "matrix row " + std::to_string(i));
    for (auto f : fields) {
      auto v = io::parse_double(f);
      if (!v) throw Error(ErrorCode::Parse, "matrix row " + std::to_string(i) + ": '" + std::string(f) + "'");
      values.push_back(*v);
    }
  }
  return DistanceMatrix(*n, *metric, std::move(values));
}

}  // namespace topicbench
