// Batch front-end: synthetic task generation, alignment runs, retrieval
// scoring. Exit codes: 0 success, 1 I/O error, 2 usage error,
// 3 numerical failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hyperot/io.hpp"

namespace {

using namespace hyperot;

struct CostNames {
  static std::optional<CostKind> parse(const std::string& name) {
    if (name == "sq_euclidean") return CostKind::sq_euclidean;
    if (name == "sq_hyperbolic") return CostKind::sq_hyperbolic;
    if (name == "neg_cosh") return CostKind::neg_cosh;
    if (name == "neg_log_one_plus_cosh") return CostKind::neg_log_one_plus_cosh;
    if (name == "log_cosh") return CostKind::log_cosh;
    if (name == "neg_log_cosh") return CostKind::neg_log_cosh;
    return std::nullopt;
  }
};

// Flags beat config-file entries: config values are injected as extra
// arguments only for flags absent from the command line.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args) {
  std::string config_path;
  for (size_t i = 0; i + 1 < args.size(); ++i)
    if (args[i] == "--config") config_path = args[i + 1];
  if (config_path.empty()) return args;

  std::vector<std::string> merged = args;
  for (const auto& [key, value] : read_kv_config(config_path)) {
    const std::string flag = "--" + key;
    if (std::find(merged.begin(), merged.end(), flag) != merged.end()) continue;
    merged.push_back(flag);
    merged.push_back(value);
  }
  return merged;
}

int run_synth(Index d, Index n, double noise, std::uint64_t seed, double s,
              const std::string& prefix) {
  const BallParams ball(s);
  const AlignmentTask task = make_synthetic_task(d, n, noise, seed, ball);

  EmbeddingData src, tgt;
  src.points = task.source.points;
  tgt.points = task.target.points;
  TokenPairs pairs;
  for (Index i = 0; i < n; ++i) {
    src.labels.push_back("s" + std::to_string(i));
    tgt.labels.push_back("t" + std::to_string(i));
  }
  for (const auto& [i, j] : task.matches)
    pairs.emplace_back(src.labels[i], tgt.labels[j]);

  write_embeddings(prefix + "_source.txt", src);
  write_embeddings(prefix + "_target.txt", tgt);
  write_matches(prefix + "_matches.tsv", pairs);
  std::cout << "wrote " << prefix << "_source.txt " << prefix << "_target.txt " << prefix
            << "_matches.tsv\n";
  return 0;
}

PointCloud load_cloud(const EmbeddingData& data, const BallParams& ball, bool hyperbolic,
                      const std::string& what) {
  if (hyperbolic) {
    for (Index i = 0; i < data.points.rows(); ++i)
      if (data.points.row(i).norm() >= ball.radius)
        throw IoError(what + ": row " + std::to_string(i) +
                      " lies outside the ball of radius " + format_double(ball.radius));
  }
  return make_uniform_cloud(data.points, ball);
}

int run_align(const std::string& method_name_arg, const std::string& source_path,
              const std::string& target_path, const std::string& matches_path, double s,
              double epsilon, double eta, double omega, const std::string& cost_name,
              const std::string& init_name, std::uint64_t seed, Index k,
              const std::string& out_prefix, bool svg) {
  const auto method = parse_method(method_name_arg);
  if (!method) throw UsageError("unknown method '" + method_name_arg + "'");
  const auto init = parse_init_strategy(init_name);
  if (!init) throw UsageError("unknown init strategy '" + init_name + "'");
  std::optional<CostKind> cost;
  if (!cost_name.empty()) {
    cost = CostNames::parse(cost_name);
    if (!cost) throw UsageError("unknown cost '" + cost_name + "'");
  }

  const auto start = std::chrono::steady_clock::now();
  const BallParams ball(s);
  const EmbeddingData src_data = read_embeddings(source_path);
  const EmbeddingData tgt_data = read_embeddings(target_path);
  const TokenPairs tokens = read_matches(matches_path);
  const MatchPairs matches = resolve_matches(tokens, src_data.labels, tgt_data.labels);
  if (matches.empty()) throw IoError("align: no matches resolved");

  const bool hyperbolic = !method_is_euclidean(*method);
  const PointCloud source = load_cloud(src_data, ball, hyperbolic, "source embeddings");
  const PointCloud target = load_cloud(tgt_data, ball, hyperbolic, "target embeddings");

  ProtocolConfig cfg;
  cfg.epsilon = epsilon;
  cfg.eta = eta;
  cfg.omega = omega;
  cfg.cost = cost;
  cfg.init = *init;
  cfg.seed = seed;

  const MethodOutput result = run_method(*method, source, target, matches, cfg, seed);

  EmbeddingData transported;
  transported.labels = src_data.labels;
  transported.points = result.transported;
  write_embeddings(out_prefix + "_transported.txt", transported);
  if (result.coupling.size() > 0) {
    write_coupling_csv(out_prefix + "_coupling.csv", result.coupling);
    write_coupling_triplets(out_prefix + "_coupling.txt", result.coupling);
  }

  AlignmentReport report;
  report.method = method_name(*method);
  report.k = k;
  report.folds = 1;
  report.hits_forward = hits_at_k(result.transported, target, matches, k);
  report.hits_backward = report.hits_forward;  // single-direction run
  report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.config_echo = {
      {"epsilon", format_double(epsilon)}, {"eta", format_double(eta)},
      {"omega", format_double(omega)},     {"init", init_name},
      {"seed", std::to_string(seed)},      {"s", format_double(s)},
      {"cost", cost_name.empty() ? "default" : cost_name},
  };
  write_report(out_prefix + "_report.txt", out_prefix + "_report.csv", report);

  if (svg) {
    if (source.dim() != 2)
      throw UsageError("--svg needs 2-d embeddings");
    write_svg_scatter(out_prefix + "_scatter.svg", source.points, result.transported,
                      target.points, s);
  }
  std::cout << "hits@" << k << " = " << format_double(report.hits_forward) << '\n';
  return 0;
}

int run_eval(const std::string& transported_path, const std::string& target_path,
             const std::string& matches_path, Index k, double s,
             const std::string& csv_path) {
  const BallParams ball(s);
  const EmbeddingData tr_data = read_embeddings(transported_path);
  const EmbeddingData tgt_data = read_embeddings(target_path);
  const TokenPairs tokens = read_matches(matches_path);
  const MatchPairs matches = resolve_matches(tokens, tr_data.labels, tgt_data.labels);
  if (matches.empty()) throw IoError("eval: no matches resolved");

  const PointCloud target = load_cloud(tgt_data, ball, true, "target embeddings");
  Matrix transported = tr_data.points;
  for (Index i = 0; i < transported.rows(); ++i) {
    const Vector row = transported.row(i).transpose();
    transported.row(i) = clamp_to_ball(row, ball).transpose();
  }
  const double hits = hits_at_k(transported, target, matches, k);
  const Index k_eff = std::min(k, target.size());
  std::cout << "hits@" << k_eff << " = " << format_double(hits) << '\n';
  std::cout << "k,hits\n" << k_eff << ',' << format_double(hits) << '\n';
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw IoError("cannot write " + csv_path);
    out << "k,hits\n" << k_eff << ',' << format_double(hits) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Alignment of Poincare-ball point clouds by optimal transport"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic alignment task");
  Index d = 5, n = 200;
  double noise = 0.05, s = 1.0;
  std::uint64_t seed = 0;
  std::string out_prefix = "task";
  synth->add_option("--d", d, "embedding dimension");
  synth->add_option("--n", n, "points per cloud");
  synth->add_option("--noise", noise, "wrapped noise scale");
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--s", s, "ball radius");
  synth->add_option("--out-prefix", out_prefix, "output file prefix");

  // align
  auto* align = app.add_subcommand("align", "fit a method and transport the source");
  std::string method, source_path, target_path, matches_path;
  std::string cost_name, init_name = "gyrobarycenter", config_path, align_out = "align";
  double epsilon = 0.01, eta = 1.0, omega = 1e-3, align_s = 1.0;
  std::uint64_t align_seed = 0;
  Index align_k = 10;
  bool svg = false;
  align->add_option("--method", method,
                    "wlinear|otda|me|ot_direct_w|ot_direct_sd|"
                    "euclid_linear|euclid_otda|euclid_me")
      ->required();
  align->add_option("--source", source_path, "source embedding file")->required();
  align->add_option("--target", target_path, "target embedding file")->required();
  align->add_option("--matches", matches_path, "match file (supervision)")->required();
  align->add_option("--s", align_s, "ball radius");
  align->add_option("--epsilon", epsilon, "entropic regularization");
  align->add_option("--eta", eta, "OT-term weight for me (inf drops the data term)");
  align->add_option("--omega", omega, "map regularization weight");
  align->add_option("--cost", cost_name, "cost kind (default per geometry)");
  align->add_option("--init", init_name, "init strategy for learned maps");
  align->add_option("--seed", align_seed, "RNG seed");
  align->add_option("--k", align_k, "k for the report's Hits@k");
  align->add_option("--out", align_out, "output file prefix");
  align->add_option("--config", config_path, "flat key=value config file");
  align->add_flag("--svg", svg, "also write a 2-d scatter");

  // eval
  auto* eval = app.add_subcommand("eval", "score transported embeddings");
  std::string tr_path, ev_target, ev_matches, ev_csv;
  Index ev_k = 10;
  double ev_s = 1.0;
  eval->add_option("--transported", tr_path, "transported embedding file")->required();
  eval->add_option("--target", ev_target, "target embedding file")->required();
  eval->add_option("--matches", ev_matches, "match file")->required();
  eval->add_option("--k", ev_k, "retrieval cutoff");
  eval->add_option("--s", ev_s, "ball radius");
  eval->add_option("--csv", ev_csv, "also write the CSV row here");

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    if (!args.empty() && args.front() == "align") args = merge_config_args(args);
  } catch (const IoError& e) {
    std::cerr << "io: " << e.what() << '\n';
    return 1;
  }
  std::vector<std::string> storage = {argv[0]};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> cargs;
  for (auto& a : storage) cargs.push_back(a.data());

  try {
    app.parse(int(cargs.size()), cargs.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 2;
  }

  try {
    if (synth->parsed()) return run_synth(d, n, noise, seed, s, out_prefix);
    if (align->parsed())
      return run_align(method, source_path, target_path, matches_path, align_s, epsilon,
                       eta, omega, cost_name, init_name, align_seed, align_k, align_out,
                       svg);
    if (eval->parsed()) return run_eval(tr_path, ev_target, ev_matches, ev_k, ev_s, ev_csv);
  } catch (const UsageError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io: " << e.what() << '\n';
    return 1;
  } catch (const DimensionError& e) {
    std::cerr << "usage: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
