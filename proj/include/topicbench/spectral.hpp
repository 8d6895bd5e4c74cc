#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "topicbench/error.hpp"
#include "topicbench/kmeans.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"

namespace topicbench {

/// Eigendecomposition of the normalized affinity D^-1/2 A D^-1/2, eigenvalues in descending order.
/// The top-k eigenvectors of this matrix span the bottom-k eigenspace of the symmetric Laplacian.
struct SpectralDecomposition {
  Eigen::MatrixXd affinity;      // normalized affinity the pairs were computed from
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // column c pairs with eigenvalues(c)

  std::size_t size() const { return static_cast<std::size_t>(eigenvalues.size()); }
};

/// Affinity = similarity with the diagonal zeroed and negative entries clamped to 0.
inline Eigen::MatrixXd affinity_from_similarity(const SimilarityMatrix& s) {
  const auto n = static_cast<Eigen::Index>(s.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = i == j ? 0.0 : std::max(0.0, s(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
    }
  }
  return a;
}

/// Sign convention: the first component with magnitude above 1e-12 is made positive.
inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-12) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

inline SpectralDecomposition spectral_decompose(const SimilarityMatrix& s) {
  if (s.size() < 2) throw Error(ErrorCode::InvalidArgument, "spectral clustering needs at least 2 points");
  Eigen::MatrixXd a = affinity_from_similarity(s);
  const Eigen::Index n = a.rows();
  Eigen::VectorXd inv_sqrt_degree(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double degree = a.row(i).sum();
    if (!(degree > 0.0)) {
      throw Error(ErrorCode::DisconnectedPoint, "point " + std::to_string(i) + " has no positive affinity");
    }
    inv_sqrt_degree(i) = 1.0 / std::sqrt(degree);
  }
  Eigen::MatrixXd m = inv_sqrt_degree.asDiagonal() * a * inv_sqrt_degree.asDiagonal();
  m = 0.5 * (m + m.transpose());  // exact symmetry for the solver

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::InvalidArgument, "eigen-solver did not converge");

  SpectralDecomposition out;
  out.affinity = std::move(m);
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (Eigen::Index c = 0; c < n; ++c) fix_sign(out.eigenvectors.col(c));
  return out;
}

/// Largest ||M v - lambda v|| / ||v|| over the leading `count` eigenpairs.
inline double max_eigen_residual(const SpectralDecomposition& dec, std::size_t count) {
  double worst = 0.0;
  for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(count); ++c) {
    Eigen::VectorXd v = dec.eigenvectors.col(c);
    double r = (dec.affinity * v - dec.eigenvalues(c) * v).norm() / v.norm();
    worst = std::max(worst, r);
  }
  return worst;
}

/// k leading eigenvectors, rows scaled to unit length, clustered with k-means under the given seed.
inline ClusterLabeling spectral_cluster(const SpectralDecomposition& dec, std::size_t k, std::uint64_t seed) {
  const std::size_t n = dec.size();
  if (k < 2 || k > n) {
    throw Error(ErrorCode::InvalidArgument, "spectral needs 2 <= k <= n (k=" + std::to_string(k) + ", n=" +
                                                std::to_string(n) + ")");
  }
  std::vector<double> rows(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    double norm2 = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      double v = dec.eigenvectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c));
      rows[i * k + c] = v;
      norm2 += v * v;
    }
    if (norm2 > 0.0) {
      double inv = 1.0 / std::sqrt(norm2);
      for (std::size_t c = 0; c < k; ++c) rows[i * k + c] *= inv;
    }
  }
  auto labeling = kmeans(RowView(rows, n, k), MetricId::EuclideanNormalized, k, seed);
  labeling.method = ClustererId::Spectral;
  labeling.params = SpectralParams{k};
  return labeling;
}

inline ClusterLabeling spectral(const SimilarityMatrix& s, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > s.size()) {
    throw Error(ErrorCode::InvalidArgument, "spectral needs 2 <= k <= n");
  }
  return spectral_cluster(spectral_decompose(s), k, seed);
}

}  // namespace topicbench
