// topicbench command line: preprocess, synth, embed, run, tune, analyze, report.
// Exit status: 0 success, 1 usage error, 2 data or contract error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "topicbench/topicbench.hpp"

namespace fs = std::filesystem;
namespace tb = topicbench;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const std::string& text, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << text;
  } else {
    tb::io::write_file_atomic(out, text);
  }
}

tb::MetricId metric_arg(const std::string& text) {
  auto m = tb::parse_metric(text);
  if (!m) throw UsageError("unknown metric '" + text + "'");
  return *m;
}

tb::ClustererId clusterer_arg(const std::string& text) {
  auto c = tb::parse_clusterer(text);
  if (!c) throw UsageError("unknown clusterer '" + text + "'");
  return *c;
}

tb::Chunk pick_chunk(const std::string& path, std::size_t id) {
  for (auto& c : tb::read_chunks(path)) {
    if (c.chunk_id == id) return std::move(c);
  }
  throw tb::Error(tb::ErrorCode::InvalidArgument, path + " has no chunk " + std::to_string(id));
}

// --- subcommands -------------------------------------------------------------------------------------

struct PreprocessArgs {
  std::string in, out, stopwords, drops;
  std::string lang_policy = "metadata";
  std::size_t min_words = tb::kDefaultMinWords;
  std::size_t chunk_size = tb::kDefaultChunkSize;
};

void preprocess(const PreprocessArgs& a) {
  auto policy = tb::parse_language_policy(a.lang_policy);
  if (!policy) throw UsageError("unknown language policy '" + a.lang_policy + "'");
  auto stopwords = a.stopwords.empty() ? tb::default_stopwords() : tb::load_stopwords(a.stopwords);
  auto tweets = tb::read_tweets(a.in);
  auto result = tb::chunk_stream(tweets, stopwords, tb::ChunkOptions{a.chunk_size, a.min_words, *policy});
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  tb::io::write_file_atomic(a.out, tb::format_chunks(result.chunks));
  if (!a.drops.empty()) {
    std::string text = "id\treason\n";
    for (const auto& d : result.drops) text += tb::io::escape_field(d.id) + '\t' + std::string(tb::to_string(d.reason)) + '\n';
    tb::io::write_file_atomic(a.drops, text);
  }
  std::size_t kept = 0;
  for (const auto& c : result.chunks) kept += c.tweets.size();
  std::cerr << "kept " << kept << " tweets in " << result.chunks.size() << " chunks, dropped " << result.drops.size()
            << '\n';
}

struct EmbedArgs {
  std::string chunks, name, id, vectors, out;
  std::size_t chunk = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  bool no_dim_check = false;
};

void embed(const EmbedArgs& a) {
  nlohmann::json spec = {{"name", a.name}, {"check_published_dim", !a.no_dim_check}};
  if (!a.id.empty()) spec["id"] = a.id;
  if (!a.vectors.empty()) spec["path"] = fs::absolute(a.vectors).string();
  if (a.dim) spec["dim"] = a.dim;
  spec["seed"] = a.seed;
  std::string provenance;
  std::shared_ptr<const tb::Embedder> embedder;
  try {
    embedder = tb::load_plan_embedder(spec, fs::current_path(), provenance);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(e.what());
  }
  auto ec = tb::embed_chunk(pick_chunk(a.chunks, a.chunk), embedder);
  std::vector<tb::EmbeddingVector> rows;
  for (std::size_t i = 0; i < ec.rows(); ++i) rows.emplace_back(ec.row(i).begin(), ec.row(i).end());
  emit(tb::format_sentence_vectors(ec.ids, rows), a.out);
}

void run(const std::string& plan_path, const std::string& out, bool resume, bool quiet) {
  auto plan = tb::load_plan(fs::path(plan_path));
  tb::RunOptions opt;
  opt.out_dir = fs::path(out);
  opt.resume = resume;
  if (!quiet) opt.log = [](const std::string& msg) { std::cerr << msg << '\n'; };
  auto result = tb::run_plan(plan, opt);
  std::cerr << "wrote " << result.results.size() << " results, " << result.experiments.size() << " experiments";
  if (resume) std::cerr << " (" << result.reused_slices << " slices reused)";
  std::cerr << " to " << out << '\n';
}

std::size_t index_of_embedder(const tb::ExperimentPlan& plan, const std::string& id) {
  for (std::size_t i = 0; i < plan.embedders.size(); ++i) {
    if (plan.embedders[i]->spec().id == id) return i;
  }
  throw UsageError("plan has no embedder '" + id + "'");
}

void tune(const std::string& plan_path, const std::string& embedder, const std::string& metric,
          const std::string& clusterer, const std::string& out) {
  auto plan = tb::load_plan(fs::path(plan_path));
  const auto i = index_of_embedder(plan, embedder);
  const auto m = metric_arg(metric);
  plan.metrics = {m};
  tb::Workspace ws(plan);
  auto t = tb::tune(ws, i, 0, clusterer_arg(clusterer));
  emit(tb::format_experiments(t.experiments), out);
  const tb::ResultRecord best[] = {t.result};
  std::cerr << tb::format_results_table(best);
}

void analyze(const std::string& results_path, const std::string& out) {
  auto results = tb::read_results_table(results_path);
  auto marginals = tb::format_marginals(tb::compute_marginals(results));
  auto ranks = tb::format_embedding_ranks(tb::rank_embeddings(results));
  std::optional<tb::MetricDuel> duel;
  try {
    duel = tb::rank_metric_duel(results);
  } catch (const tb::Error& e) {
    if (e.code() != tb::ErrorCode::IncompleteGrid) throw;
    std::cerr << "note: " << e.what() << '\n';
  }
  if (out.empty()) {
    std::cout << "# marginals\n" << marginals << "\n# embedding ranks\n" << ranks;
    if (duel) std::cout << "\n# cosine rank against euclidean-normalized (cosine wins " << duel->cosine_wins() << ")\n"
                        << tb::format_metric_duel(*duel);
    return;
  }
  tb::io::write_file_atomic(fs::path(out) / "marginals.tsv", marginals);
  tb::io::write_file_atomic(fs::path(out) / "embedding_ranks.tsv", ranks);
  if (duel) tb::io::write_file_atomic(fs::path(out) / "metric_duel.tsv", tb::format_metric_duel(*duel));
}

struct ReportArgs {
  std::string kind = "table";
  std::string results, experiments, run_dir, embedder, metric, clusterer, out;
  std::size_t top = 10;
};

void report(const ReportArgs& a) {
  auto need = [](const std::string& value, const char* flag) {
    if (value.empty()) throw UsageError(std::string("--kind needs ") + flag);
  };
  if (a.kind == "table") {
    need(a.results, "--results");
    emit(tb::format_results_table(tb::read_results_table(a.results)), a.out);
  } else if (a.kind == "sweep") {
    need(a.experiments, "--experiments");
    need(a.embedder, "--embedder");
    need(a.metric, "--metric");
    need(a.clusterer, "--clusterer");
    auto c = clusterer_arg(a.clusterer);
    if (!tb::single_parameter_name(c)) throw UsageError("sweep needs a single-parameter clusterer; use heatgrid");
    emit(tb::emit_sweep(tb::read_experiments(a.experiments), a.embedder, metric_arg(a.metric), c), a.out);
  } else if (a.kind == "heatgrid") {
    need(a.experiments, "--experiments");
    need(a.embedder, "--embedder");
    need(a.metric, "--metric");
    emit(tb::emit_heatgrid(tb::read_experiments(a.experiments), a.embedder, metric_arg(a.metric)), a.out);
  } else if (a.kind == "topics") {
    need(a.run_dir, "--run");
    need(a.embedder, "--embedder");
    need(a.metric, "--metric");
    need(a.clusterer, "--clusterer");
    const fs::path dir(a.run_dir);
    auto chunks = tb::read_chunks(dir / "chunk.txt");
    if (chunks.size() != 1) throw tb::Error(tb::ErrorCode::Parse, "run chunk.txt must hold one chunk");
    std::vector<std::string> ids;
    for (auto& line : tb::io::read_lines(dir / "retained_ids.txt")) {
      if (!line.empty()) ids.push_back(std::move(line));
    }
    tb::ResultRecord key{a.embedder, metric_arg(a.metric), clusterer_arg(a.clusterer)};
    auto labeling = tb::parse_labeling(tb::io::read_lines(dir / "labelings" / tb::detail::labeling_name(key)));
    auto tweets = tb::tweets_by_id(chunks.front(), ids);
    emit(tb::format_topics(tb::extract_topics(tweets, labeling, a.top)), a.out);
  } else {
    throw UsageError("unknown report kind '" + a.kind + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering benchmark for short-text embeddings"};
  app.require_subcommand(1);

  PreprocessArgs pre;
  auto* cmd_pre = app.add_subcommand("preprocess", "Clean, filter and chunk a tweet stream");
  cmd_pre->add_option("--in", pre.in, "Tweet stream (id=..\\ttext=.. lines)")->required();
  cmd_pre->add_option("--out", pre.out, "Chunk file to write")->required();
  cmd_pre->add_option("--min-words", pre.min_words, "Minimum word tokens per tweet");
  cmd_pre->add_option("--chunk-size", pre.chunk_size, "Tweets per chunk");
  cmd_pre->add_option("--stopwords", pre.stopwords, "Stopword list, one word per line");
  cmd_pre->add_option("--lang-policy", pre.lang_policy, "metadata | heuristic | off");
  cmd_pre->add_option("--drops", pre.drops, "Write dropped ids and reasons here");

  tb::SyntheticCorpusOptions syn;
  std::string syn_out;
  auto* cmd_syn = app.add_subcommand("synth", "Generate a synthetic tweet stream");
  cmd_syn->add_option("--out", syn_out, "Tweet stream to write ('-' for stdout)")->required();
  cmd_syn->add_option("--tweets", syn.tweets);
  cmd_syn->add_option("--topics", syn.topics);
  cmd_syn->add_option("--vocabulary", syn.vocabulary);
  cmd_syn->add_option("--min-words", syn.min_words);
  cmd_syn->add_option("--max-words", syn.max_words);
  cmd_syn->add_option("--shared-rate", syn.shared_word_rate);
  cmd_syn->add_option("--decoration-rate", syn.decoration_rate);
  cmd_syn->add_option("--seed", syn.seed);

  EmbedArgs emb;
  auto* cmd_emb = app.add_subcommand("embed", "Embed one chunk and write its tweet vectors");
  cmd_emb->add_option("--chunks", emb.chunks, "Chunk file")->required();
  cmd_emb->add_option("--chunk", emb.chunk, "Chunk id");
  cmd_emb->add_option("--embedder", emb.name, "word2vec | glove | fasttext | bert | t5 | synthetic")->required();
  cmd_emb->add_option("--id", emb.id, "Embedder label (defaults to the name)");
  cmd_emb->add_option("--vectors", emb.vectors, "Word-vector or sentence-vector file");
  cmd_emb->add_option("--dim", emb.dim, "Dimension of a synthetic embedder");
  cmd_emb->add_option("--seed", emb.seed, "Seed of a synthetic embedder");
  cmd_emb->add_flag("--no-dim-check", emb.no_dim_check, "Accept vectors of a non-published dimension");
  cmd_emb->add_option("--out", emb.out, "Output file ('-' for stdout)");

  std::string plan_path, run_out;
  bool resume = false, quiet = false;
  auto* cmd_run = app.add_subcommand("run", "Run every (embedder, metric, clusterer) slice of a plan");
  cmd_run->add_option("--plan", plan_path, "JSON plan")->required();
  cmd_run->add_option("--out", run_out, "Output directory")->required();
  cmd_run->add_flag("--resume", resume, "Reuse finished slices with a matching fingerprint");
  cmd_run->add_flag("--quiet", quiet, "No per-slice progress");

  std::string t_embedder, t_metric, t_clusterer, t_out;
  auto* cmd_tune = app.add_subcommand("tune", "Sweep one clusterer's grid for one embedder and metric");
  cmd_tune->add_option("--plan", plan_path, "JSON plan")->required();
  cmd_tune->add_option("--embedder", t_embedder, "Embedder id")->required();
  cmd_tune->add_option("--metric", t_metric, "cosine | euclidean-normalized")->required();
  cmd_tune->add_option("--clusterer", t_clusterer, "k-means | dbscan | optics | spectral | jarvis-patrick")->required();
  cmd_tune->add_option("--out", t_out, "Experiment log to write (default stdout)");

  std::string results_path, analyze_out;
  auto* cmd_an = app.add_subcommand("analyze", "Factor marginals and rank tables of a results table");
  cmd_an->add_option("--results", results_path, "results.tsv")->required();
  cmd_an->add_option("--out", analyze_out, "Directory for marginals.tsv, embedding_ranks.tsv, metric_duel.tsv");

  ReportArgs rep;
  auto* cmd_rep = app.add_subcommand("report", "Render a results table, sweep, heat grid or topic list");
  cmd_rep->add_option("--kind", rep.kind, "table | sweep | heatgrid | topics");
  cmd_rep->add_option("--results", rep.results);
  cmd_rep->add_option("--experiments", rep.experiments);
  cmd_rep->add_option("--run", rep.run_dir, "Run output directory (topics)");
  cmd_rep->add_option("--embedder", rep.embedder);
  cmd_rep->add_option("--metric", rep.metric);
  cmd_rep->add_option("--clusterer", rep.clusterer);
  cmd_rep->add_option("--top", rep.top, "Words per topic");
  cmd_rep->add_option("--out", rep.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*cmd_pre) {
      preprocess(pre);
    } else if (*cmd_syn) {
      emit(tb::format_tweets(tb::generate_synthetic_tweets(syn)), syn_out);
    } else if (*cmd_emb) {
      embed(emb);
    } else if (*cmd_run) {
      run(plan_path, run_out, resume, quiet);
    } else if (*cmd_tune) {
      tune(plan_path, t_embedder, t_metric, t_clusterer, t_out);
    } else if (*cmd_an) {
      analyze(results_path, analyze_out);
    } else if (*cmd_rep) {
      report(rep);
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const tb::Error& e) {
    std::cerr << "error [" << tb::to_string(e.code()) << "]: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
