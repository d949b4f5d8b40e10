// End-to-end checks of the command-line tool. Takes the binary path as
// argv[1]; exercises synth -> align -> eval round trips, exit codes and
// byte-determinism.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "hyperot/io.hpp"

using namespace hyperot;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void expect(bool ok, const std::string& what) {
  if (!ok) {
    ++failures;
    std::cerr << "FAILED: " << what << "\n";
  }
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " > cli_out.txt 2> cli_err.txt").c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-binary>\n";
    return 1;
  }
  const std::string bin = argv[1];
  const fs::path dir = fs::temp_directory_path() / "hyperot_cli_tests";
  fs::remove_all(dir);
  fs::create_directories(dir);
  const auto cwd = fs::current_path();
  fs::current_path(dir);

  // synth writes a parseable, invariant-satisfying task.
  expect(run(bin + " synth --d 3 --n 40 --noise 0 --seed 7 --out-prefix a") == 0,
         "synth exit code");
  const EmbeddingData src = read_embeddings("a_source.txt");
  const EmbeddingData tgt = read_embeddings("a_target.txt");
  const TokenPairs toks = read_matches("a_matches.tsv");
  expect(src.points.rows() == 40 && tgt.points.rows() == 40, "synth row counts");
  expect(toks.size() == 40, "synth match count");
  for (Index i = 0; i < 40; ++i) {
    expect(src.points.row(i).norm() < 1.0, "synth source inside ball");
    expect(tgt.points.row(i).norm() < 1.0, "synth target inside ball");
  }

  // Same seed twice gives byte-identical files.
  expect(run(bin + " synth --d 3 --n 40 --noise 0 --seed 7 --out-prefix b") == 0,
         "synth rerun exit code");
  expect(slurp("a_source.txt") == slurp("b_source.txt"), "synth determinism: source");
  expect(slurp("a_target.txt") == slurp("b_target.txt"), "synth determinism: target");
  expect(slurp("a_matches.tsv") == slurp("b_matches.tsv"), "synth determinism: matches");

  // Noiseless planted task aligns perfectly with the closed-form map.
  expect(run(bin + " align --method wlinear --source a_source.txt --target a_target.txt"
                   " --matches a_matches.tsv --out w") == 0,
         "align wlinear exit code");
  {
    const auto kv = read_kv_config("w_report.txt");
    expect(kv.at("hits_forward") == "100", "wlinear hits@10 = 100 on noiseless task");
  }

  // eval agrees with the report and clamps oversized k.
  expect(run(bin + " eval --transported w_transported.txt --target a_target.txt"
                   " --matches a_matches.tsv --k 10") == 0,
         "eval exit code");
  expect(slurp("cli_out.txt").find("hits@10 = 100") != std::string::npos,
         "eval stdout line");
  {
    EmbeddingData perfect;  // source labels carrying the matched target rows
    perfect.labels = src.labels;
    perfect.points = tgt.points;
    write_embeddings("perfect.txt", perfect);
  }
  expect(run(bin + " eval --transported perfect.txt --target a_target.txt"
                   " --matches a_matches.tsv --k 10000") == 0,
         "eval with oversized k");
  expect(slurp("cli_out.txt").find("= 100") != std::string::npos, "oversized k scores 100");

  // eval equals the library metric on the same data.
  {
    const EmbeddingData moved = read_embeddings("w_transported.txt");
    const PointCloud cloud = make_uniform_cloud(tgt.points, BallParams(1.0));
    const MatchPairs pairs = resolve_matches(toks, src.labels, tgt.labels);
    const double lib = hits_at_k(moved.points, cloud, pairs, 10);
    expect(run(bin + " eval --transported w_transported.txt --target a_target.txt"
                     " --matches a_matches.tsv --k 10 --csv eval.csv") == 0,
           "eval csv exit code");
    std::ostringstream want;
    want << "k,hits\n10," << format_double(lib) << "\n";
    expect(slurp("eval.csv") == want.str(), "eval csv matches the library metric");
  }

  // me with the OT term dominant reproduces the plain entropic coupling.
  expect(run(bin + " align --method me --source a_source.txt --target a_target.txt"
                   " --matches a_matches.tsv --eta inf --out inf") == 0,
         "align me eta=inf exit code");
  {
    const Matrix coupling = read_coupling_csv("inf_coupling.csv");
    const PointCloud sc = make_uniform_cloud(src.points, BallParams(1.0));
    const PointCloud tc = make_uniform_cloud(tgt.points, BallParams(1.0));
    CostMatrix C = build_cost_matrix(sc, tc, CostKind::sq_hyperbolic);
    C = apply_supervision(C, resolve_matches(toks, src.labels, tgt.labels));
    SinkhornConfig scfg;
    scfg.epsilon = 0.01;
    const SinkhornResult plain = sinkhorn(sc.weights, tc.weights, C, scfg);
    expect((coupling - plain.coupling.plan).cwiseAbs().maxCoeff() < 1e-9,
           "eta=inf coupling equals a plain sinkhorn run");
  }

  // Deterministic align runs: identical invocations, identical bytes.
  expect(run(bin + " align --method otda --source a_source.txt --target a_target.txt"
                   " --matches a_matches.tsv --seed 3 --out d1") == 0,
         "align otda run 1");
  expect(run(bin + " align --method otda --source a_source.txt --target a_target.txt"
                   " --matches a_matches.tsv --seed 3 --out d2") == 0,
         "align otda run 2");
  expect(slurp("d1_transported.txt") == slurp("d2_transported.txt"),
         "align determinism: transported");
  expect(slurp("d1_coupling.csv") == slurp("d2_coupling.csv"),
         "align determinism: coupling");

  // Config file entries are overridden by explicit flags.
  {
    std::ofstream cfg("run.cfg");
    cfg << "epsilon=0.05\nseed=9\n";
  }
  expect(run(bin + " align --method otda --source a_source.txt --target a_target.txt"
                   " --matches a_matches.tsv --config run.cfg --epsilon 0.01 --seed 3"
                   " --out c1") == 0,
         "align with config file");
  expect(slurp("c1_report.txt").find("epsilon=0.01") != std::string::npos,
         "flag overrides config epsilon");
  expect(slurp("c1_report.txt").find("seed=3") != std::string::npos,
         "flag overrides config seed");

  // 2-d runs can emit an SVG scatter.
  expect(run(bin + " synth --d 2 --n 30 --noise 0 --seed 1 --out-prefix p") == 0,
         "2-d synth");
  expect(run(bin + " align --method otda --source p_source.txt --target p_target.txt"
                   " --matches p_matches.tsv --svg --out p") == 0,
         "align with svg");
  expect(slurp("p_scatter.svg").find("<svg") != std::string::npos, "svg written");

  // Exit codes: 2 for usage errors, 1 for I/O errors.
  expect(run(bin + " align --method nonsense --source a_source.txt --target a_target.txt"
                   " --matches a_matches.tsv --out x") == 2,
         "unknown method exits 2");
  expect(slurp("cli_err.txt").find("unknown method") != std::string::npos,
         "unknown method diagnostic");
  expect(run(bin + " align --method wlinear --source missing.txt --target a_target.txt"
                   " --matches a_matches.tsv --out x") == 1,
         "missing file exits 1");
  expect(run(bin + " bogus-subcommand") == 2, "bad subcommand exits 2");

  fs::current_path(cwd);
  fs::remove_all(dir);
  if (failures == 0) std::cout << "cli_tests: all checks passed\n";
  return failures == 0 ? 0 : 1;
}
