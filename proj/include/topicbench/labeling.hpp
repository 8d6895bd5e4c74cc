#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "topicbench/error.hpp"
#include "topicbench/text_io.hpp"

namespace topicbench {

enum class ClustererId { KMeans, Dbscan, Optics, Spectral, JarvisPatrick };

inline constexpr ClustererId kAllClusterers[] = {ClustererId::KMeans, ClustererId::Dbscan, ClustererId::Optics,
                                                 ClustererId::Spectral, ClustererId::JarvisPatrick};

inline std::string_view to_string(ClustererId id) {
  switch (id) {
    case ClustererId::KMeans: return "k-means";
    case ClustererId::Dbscan: return "DBSCAN";
    case ClustererId::Optics: return "OPTICS";
    case ClustererId::Spectral: return "spectral";
    case ClustererId::JarvisPatrick: return "Jarvis-Patrick";
  }
  return "k-means";
}

inline std::optional<ClustererId> parse_clusterer(std::string_view text) {
  std::string lower;
  for (char c : text) lower += static_cast<char>(c >= 'A' && c <= 'Z' ? c + 32 : c);
  if (lower == "k-means" || lower == "kmeans") return ClustererId::KMeans;
  if (lower == "dbscan") return ClustererId::Dbscan;
  if (lower == "optics") return ClustererId::Optics;
  if (lower == "spectral") return ClustererId::Spectral;
  if (lower == "jarvis-patrick" || lower == "jarvis_patrick" || lower == "jp") return ClustererId::JarvisPatrick;
  return std::nullopt;
}

struct KMeansParams {
  std::size_t k = 2;
  auto operator<=>(const KMeansParams&) const = default;
};

struct DbscanParams {
  double eps = 0.1;
  std::size_t min_pts = 2;
  auto operator<=>(const DbscanParams&) const = default;
};

struct OpticsParams {
  std::size_t min_pts = 2;
  auto operator<=>(const OpticsParams&) const = default;
};

struct SpectralParams {
  std::size_t k = 2;
  auto operator<=>(const SpectralParams&) const = default;
};

struct JarvisPatrickParams {
  std::size_t k = 10;
  std::size_t k_t = 1;
  auto operator<=>(const JarvisPatrickParams&) const = default;
};

/// Comparison orders parameters of the same method lexicographically, which is the tuning tie-break order.
using ClusterParams = std::variant<KMeansParams, DbscanParams, OpticsParams, SpectralParams, JarvisPatrickParams>;

inline ClustererId clusterer_of(const ClusterParams& p) { return static_cast<ClustererId>(p.index()); }

inline void validate(const ClusterParams& params) {
  std::visit(
      [](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DbscanParams>) {
          if (!(p.eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "DBSCAN eps must be > 0");
          if (p.min_pts < 2) throw Error(ErrorCode::InvalidArgument, "DBSCAN min_pts must be >= 2");
        } else if constexpr (std::is_same_v<P, OpticsParams>) {
          if (p.min_pts < 2) throw Error(ErrorCode::InvalidArgument, "OPTICS min_pts must be >= 2");
        } else if constexpr (std::is_same_v<P, JarvisPatrickParams>) {
          if (p.k_t < 1 || p.k_t > p.k) throw Error(ErrorCode::InvalidArgument, "Jarvis-Patrick needs 1 <= k_t <= k");
        } else {
          if (p.k < 1) throw Error(ErrorCode::InvalidArgument, "k must be >= 1");
        }
      },
      params);
}

/// "k=5", "eps=0.2;min_pts=4", "min_pts=3", "k=10;k_t=2".
inline std::string format_params(const ClusterParams& params) {
  return std::visit(
      [](const auto& p) -> std::string {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, DbscanParams>) {
          return "eps=" + io::format_double(p.eps) + ";min_pts=" + std::to_string(p.min_pts);
        } else if constexpr (std::is_same_v<P, OpticsParams>) {
          return "min_pts=" + std::to_string(p.min_pts);
        } else if constexpr (std::is_same_v<P, JarvisPatrickParams>) {
          return "k=" + std::to_string(p.k) + ";k_t=" + std::to_string(p.k_t);
        } else {
          return "k=" + std::to_string(p.k);
        }
      },
      params);
}

inline ClusterParams parse_params(ClustererId method, std::string_view text) {
  std::unordered_map<std::string, std::string> kv;
  for (auto part : io::split(text, ';')) {
    auto eq = part.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::Parse, "bad parameter '" + std::string(part) + "'");
    kv.emplace(std::string(part.substr(0, eq)), std::string(part.substr(eq + 1)));
  }
  auto count = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorCode::Parse, std::string("missing parameter ") + key + " in '" +
                                                          std::string(text) + "'");
    auto v = io::parse_int<std::size_t>(it->second);
    if (!v) throw Error(ErrorCode::Parse, std::string("bad integer for ") + key);
    return *v;
  };
  switch (method) {
    case ClustererId::KMeans: return KMeansParams{count("k")};
    case ClustererId::Spectral: return SpectralParams{count("k")};
    case ClustererId::Optics: return OpticsParams{count("min_pts")};
    case ClustererId::JarvisPatrick: return JarvisPatrickParams{count("k"), count("k_t")};
    case ClustererId::Dbscan: {
      auto it = kv.find("eps");
      auto eps = it == kv.end() ? std::nullopt : io::parse_double(it->second);
      if (!eps) throw Error(ErrorCode::Parse, "missing or bad eps in '" + std::string(text) + "'");
      return DbscanParams{*eps, count("min_pts")};
    }
  }
  throw Error(ErrorCode::Parse, "unknown method");
}

/// Name of the single tuned parameter, or nullopt for two-parameter methods.
inline std::optional<std::string_view> single_parameter_name(ClustererId id) {
  switch (id) {
    case ClustererId::KMeans:
    case ClustererId::Spectral: return "k";
    case ClustererId::Optics: return "min_pts";
    default: return std::nullopt;
  }
}

inline double single_parameter_value(const ClusterParams& params) {
  if (const auto* p = std::get_if<KMeansParams>(&params)) return static_cast<double>(p->k);
  if (const auto* p = std::get_if<SpectralParams>(&params)) return static_cast<double>(p->k);
  if (const auto* p = std::get_if<OpticsParams>(&params)) return static_cast<double>(p->min_pts);
  throw Error(ErrorCode::InvalidArgument, "parameters of " + std::string(to_string(clusterer_of(params))) +
                                              " are not single-valued");
}

inline constexpr int kNoise = -1;

struct ClusterLabeling {
  std::vector<int> labels;  // 0..k-1 or kNoise
  std::size_t k = 0;
  ClustererId method = ClustererId::KMeans;
  std::optional<ClusterParams> params;
  std::optional<std::uint64_t> seed;

  std::size_t size() const { return labels.size(); }
  std::size_t noise_count() const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kNoise)); }

  bool operator==(const ClusterLabeling&) const = default;
};

/// Relabels clusters 0,1,2,... in order of first appearance; noise stays noise.
inline std::vector<int> canonical_labels(std::span<const int> labels) {
  std::unordered_map<int, int> remap;
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kNoise) {
      out[i] = kNoise;
      continue;
    }
    auto [it, inserted] = remap.emplace(labels[i], static_cast<int>(remap.size()));
    out[i] = it->second;
  }
  return out;
}

/// Equal up to renaming of cluster ids.
inline bool same_partition(std::span<const int> a, std::span<const int> b) {
  return a.size() == b.size() && canonical_labels(a) == canonical_labels(b);
}

/// Number of distinct non-noise labels.
inline std::size_t count_clusters(std::span<const int> labels) {
  std::vector<int> seen;
  for (int l : labels) {
    if (l != kNoise) seen.push_back(l);
  }
  std::sort(seen.begin(), seen.end());
  return static_cast<std::size_t>(std::unique(seen.begin(), seen.end()) - seen.begin());
}

/// Header line "# method=<m>\tparams=<p>\tseed=<s|->" then "point-index cluster-id|NOISE" per point.
inline std::string format_labeling(const ClusterLabeling& l) {
  std::string out = "# method=" + std::string(to_string(l.method)) +
                    "\tparams=" + (l.params ? format_params(*l.params) : std::string("-")) +
                    "\tseed=" + (l.seed ? std::to_string(*l.seed) : std::string("-")) + "\n";
  for (std::size_t i = 0; i < l.labels.size(); ++i) {
    out += std::to_string(i) + " " + (l.labels[i] == kNoise ? std::string("NOISE") : std::to_string(l.labels[i])) + "\n";
  }
  return out;
}

inline ClusterLabeling parse_labeling(std::span<const std::string> lines) {
  if (lines.empty() || !lines[0].starts_with("# ")) throw Error(ErrorCode::Parse, "labeling header missing");
  ClusterLabeling l;
  std::string params_text;
  for (auto field : io::split(std::string_view(lines[0]).substr(2), '\t')) {
    auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    auto key = field.substr(0, eq);
    auto value = field.substr(eq + 1);
    if (key == "method") {
      auto m = parse_clusterer(value);
      if (!m) throw Error(ErrorCode::Parse, "unknown method '" + std::string(value) + "'");
      l.method = *m;
    } else if (key == "params") {
      params_text = std::string(value);
    } else if (key == "seed" && value != "-") {
      l.seed = io::parse_int<std::uint64_t>(value);
    }
  }
  if (!params_text.empty() && params_text != "-") l.params = parse_params(l.method, params_text);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    auto fields = io::split_ws(lines[i]);
    if (fields.empty()) continue;
    if (fields.size() != 2) throw Error(ErrorCode::Parse, "labeling line " + std::to_string(i + 1));
    auto idx = io::parse_int<std::size_t>(fields[0]);
    if (!idx || *idx != l.labels.size()) throw Error(ErrorCode::Parse, "labeling indices must be 0..n-1 in order");
    if (fields[1] == "NOISE") {
      l.labels.push_back(kNoise);
    } else {
      auto c = io::parse_int<int>(fields[1]);
      if (!c || *c < 0) throw Error(ErrorCode::Parse, "bad cluster id on line " + std::to_string(i + 1));
      l.labels.push_back(*c);
    }
  }
  l.k = count_clusters(l.labels);
  return l;
}

}  // namespace topicbench
