#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "topicbench/corpus.hpp"
#include "topicbench/harness.hpp"
#include "topicbench/reporting.hpp"
#include "topicbench/text_io.hpp"

namespace topicbench {

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;  // nothing is written without one
  bool resume = false;                           // reuse slice files whose fingerprint matches
  std::function<void(const std::string&)> log;
};

struct RunOutput {
  std::vector<ResultRecord> results;          // (embedder x metric x clusterer) order
  std::vector<ExperimentRecord> experiments;  // same order, grid order within a slice
  std::vector<std::string> retained_ids;
  std::size_t reused_slices = 0;
};

/// Hash of everything that determines a plan's experiment records.
inline std::uint64_t plan_fingerprint(const ExperimentPlan& plan) {
  std::string key = "topicbench-plan v1\n";
  key += "seed=" + std::to_string(plan.seed) + '\n';
  key += "noise=" + std::string(to_string(plan.noise_policy)) + '\n';
  key += "provenance=" + plan.provenance + '\n';
  for (const auto& e : plan.embedders) {
    const auto& s = e->spec();
    key += "embedder=" + s.id + ',' + s.name + ',' + std::string(to_string(s.kind)) + ',' + std::to_string(s.dim);
    if (const auto* syn = dynamic_cast<const SyntheticEmbedder*>(e.get())) key += ",seed=" + std::to_string(syn->seed());
    key += '\n';
  }
  const Chunk chunks[] = {plan.chunk};
  key += format_chunks(chunks);
  return io::fnv1a64(key);
}

inline std::uint64_t slice_fingerprint(std::uint64_t plan_hash, const ExperimentPlan& plan, std::size_t i,
                                       std::size_t j, ClustererId k) {
  std::string key = io::hex64(plan_hash) + '\t' + plan.embedders[i]->spec().id + '\t' +
                    std::string(to_string(plan.metrics[j])) + '\t' + std::string(to_string(k)) + '\n';
  for (const auto& p : plan.grid(k)) key += format_params(p) + '\n';
  return io::fnv1a64(key);
}

namespace detail {

inline std::optional<std::vector<ExperimentRecord>> load_slice(const std::filesystem::path& path,
                                                               std::uint64_t fingerprint, std::size_t expected) {
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  auto lines = io::read_lines(path);
  if (lines.empty() || lines.front() != "# fingerprint=" + io::hex64(fingerprint)) return std::nullopt;
  try {
    auto records = parse_experiments(lines);
    if (records.size() != expected) return std::nullopt;
    return records;
  } catch (const Error&) {
    return std::nullopt;  // a torn or foreign file is recomputed
  }
}

inline std::string slice_name(std::size_t index) {
  std::string digits = std::to_string(index);
  return "slice-" + std::string(digits.size() < 4 ? 4 - digits.size() : 0, '0') + digits + ".tsv";
}

inline std::string labeling_name(const ResultRecord& r) {
  std::string name = r.embedder + "__" + std::string(to_string(r.metric)) + "__" + std::string(to_string(r.clusterer));
  for (auto& ch : name) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' || ch == '.')) ch = '_';
  }
  return name + ".tsv";
}

}  // namespace detail

/// Runs every (embedder, metric, clusterer) slice of a plan. With an output directory, each finished
/// slice is written atomically under slices/, so an interrupted run can resume; merged tables, the
/// best labelings and a manifest are written at the end.
inline RunOutput run_plan(const ExperimentPlan& plan, const RunOptions& options = {}) {
  validate(plan);
  Workspace ws(plan);
  RunOutput out;
  const auto plan_hash = plan_fingerprint(plan);
  auto log = [&](const std::string& msg) {
    if (options.log) options.log(msg);
  };

  std::filesystem::path slices_dir;
  if (options.out_dir) slices_dir = *options.out_dir / "slices";

  std::size_t slice_index = 0;
  for (std::size_t i = 0; i < plan.embedders.size(); ++i) {
    for (std::size_t j = 0; j < plan.metrics.size(); ++j) {
      for (auto k : plan.clusterers) {
        const auto fp = slice_fingerprint(plan_hash, plan, i, j, k);
        const auto path = slices_dir / detail::slice_name(slice_index++);
        std::vector<ExperimentRecord> records;
        bool reused = false;
        if (options.out_dir && options.resume) {
          if (auto cached = detail::load_slice(path, fp, plan.grid(k).size())) {
            records = std::move(*cached);
            reused = true;
            ++out.reused_slices;
          }
        }
        if (!reused) {
          records = tune(ws, i, j, k).experiments;
          if (options.out_dir) {
            io::write_file_atomic(path, "# fingerprint=" + io::hex64(fp) + '\n' + format_experiments(records));
          }
        }
        auto best = best_of(records);
        log(std::string(reused ? "reused " : "ran ") + best.embedder + ' ' + std::string(to_string(best.metric)) + ' ' +
            std::string(to_string(best.clusterer)) + " best=" + io::format_double(best.score));
        out.results.push_back(std::move(best));
        out.experiments.insert(out.experiments.end(), records.begin(), records.end());
      }
    }
  }

  // Retained ids are identical across embedders by construction.
  out.retained_ids = ws.embedded(0).ids;

  if (options.out_dir) {
    const auto& dir = *options.out_dir;
    const auto results_text = format_results_table(out.results);
    io::write_file_atomic(dir / "results.tsv", results_text);
    io::write_file_atomic(dir / "experiments.tsv", format_experiments(out.experiments));
    const Chunk chunks[] = {plan.chunk};
    io::write_file_atomic(dir / "chunk.txt", format_chunks(chunks));
    std::string ids;
    for (const auto& id : out.retained_ids) ids += id + '\n';
    io::write_file_atomic(dir / "retained_ids.txt", ids);

    std::size_t failures = 0;
    for (const auto& e : out.experiments) failures += e.failed() ? 1 : 0;
    nlohmann::ordered_json manifest;
    manifest["format"] = "topicbench-run v1";
    manifest["fingerprint"] = io::hex64(plan_hash);
    manifest["seed"] = plan.seed;
    manifest["chunk_id"] = plan.chunk.chunk_id;
    manifest["chunk_tweets"] = plan.chunk.tweets.size();
    manifest["retained_tweets"] = out.retained_ids.size();
    manifest["noise_policy"] = to_string(plan.noise_policy);
    manifest["embedders"] = nlohmann::ordered_json::array();
    for (const auto& e : plan.embedders) {
      const auto& s = e->spec();
      manifest["embedders"].push_back({{"id", s.id}, {"name", s.name}, {"kind", to_string(s.kind)}, {"dim", s.dim}});
    }
    manifest["metrics"] = nlohmann::ordered_json::array();
    for (auto m : plan.metrics) manifest["metrics"].push_back(to_string(m));
    manifest["grid_sizes"] = nlohmann::ordered_json::object();
    for (auto k : plan.clusterers) manifest["grid_sizes"][std::string(to_string(k))] = plan.grid(k).size();
    manifest["experiments"] = out.experiments.size();
    manifest["failed_experiments"] = failures;
    manifest["results_hash"] = io::hex64(io::fnv1a64(results_text));
    io::write_file_atomic(dir / "manifest.json", manifest.dump(2) + '\n');

    for (std::size_t r = 0; r < out.results.size(); ++r) {
      const auto& res = out.results[r];
      if (!res.best_params) continue;
      const std::size_t i = r / (plan.metrics.size() * plan.clusterers.size());
      const std::size_t j = (r / plan.clusterers.size()) % plan.metrics.size();
      std::string text;
      try {
        text = format_labeling(cluster_once(ws, i, j, *res.best_params));
      } catch (const Error&) {
        continue;  // failed slices have no labeling
      }
      io::write_file_atomic(dir / "labelings" / detail::labeling_name(res), text);
    }
  }
  return out;
}

}  // namespace topicbench
