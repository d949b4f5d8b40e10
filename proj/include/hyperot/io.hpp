#ifndef HYPEROT_IO_HPP
#define HYPEROT_IO_HPP

// File formats. Everything is plain ASCII with LF line endings and
// decimals written with 17 significant digits, so identical runs
// produce byte-identical files.
//
//   embeddings:  "n d\n" header, then one "label v1 ... vd" row per point
//   matches:     "source_token<TAB>target_token" lines
//   coupling:    dense CSV ("n_s,n_t" header then rows), or "i j value"
//                zero-based triplet lines
//   model:       text block with layer count, per-layer dims, row-major
//                weights and bias entries
//   gaussian:    "mu ..." line followed by one "sigma ..." line per row

#include <map>
#include <string>
#include <vector>

#include "hyperot/eval.hpp"
#include "hyperot/wrapped_gaussian.hpp"

namespace hyperot {

std::string format_double(double v);

struct EmbeddingData {
  std::vector<std::string> labels;
  Matrix points;
};

void write_embeddings(const std::string& path, const EmbeddingData& data);
EmbeddingData read_embeddings(const std::string& path);

using TokenPairs = std::vector<std::pair<std::string, std::string>>;
void write_matches(const std::string& path, const TokenPairs& pairs);
TokenPairs read_matches(const std::string& path);

// Token pairs to row indices. Throws on unresolvable tokens or
// duplicate source tokens.
MatchPairs resolve_matches(const TokenPairs& pairs,
                           const std::vector<std::string>& source_labels,
                           const std::vector<std::string>& target_labels);

void write_coupling_csv(const std::string& path, const Matrix& plan);
Matrix read_coupling_csv(const std::string& path);
void write_coupling_triplets(const std::string& path, const Matrix& plan);

void write_model(const std::string& path, const Model& model);
Model read_model(const std::string& path);

void write_wrapped_gaussian(const std::string& path, const WrappedGaussian& g);
WrappedGaussian read_wrapped_gaussian(const std::string& path, const BallParams& ball);

void write_loss_trace_csv(const std::string& path,
                          const std::vector<std::pair<int, double>>& trace);

// Flat key=value text plus a CSV row per direction.
void write_report(const std::string& txt_path, const std::string& csv_path,
                  const AlignmentReport& report);

// key=value lines; '#' starts a comment.
std::map<std::string, std::string> read_kv_config(const std::string& path);

// Static scatter of 2-d source/transported/target clouds with the ball
// boundary drawn.
void write_svg_scatter(const std::string& path, const Matrix& source,
                       const Matrix& transported, const Matrix& target, double radius);

}  // namespace hyperot

#endif  // HYPEROT_IO_HPP
