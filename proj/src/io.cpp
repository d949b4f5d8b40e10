#include "hyperot/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace hyperot {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
  if (!out) throw IoError("cannot write " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  return in;
}

double parse_double(const std::string& token, const std::string& path) {
  try {
    size_t pos = 0;
    const double v = std::stod(token, &pos);
    if (pos != token.size()) throw std::invalid_argument(token);
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": bad numeric value '" + token + "'");
  }
}

}  // namespace

void write_embeddings(const std::string& path, const EmbeddingData& data) {
  if (Index(data.labels.size()) != data.points.rows())
    throw DimensionError("write_embeddings: label count mismatch");
  auto out = open_out(path);
  out << data.points.rows() << ' ' << data.points.cols() << '\n';
  for (Index i = 0; i < data.points.rows(); ++i) {
    out << data.labels[i];
    for (Index j = 0; j < data.points.cols(); ++j)
      out << ' ' << format_double(data.points(i, j));
    out << '\n';
  }
}

EmbeddingData read_embeddings(const std::string& path) {
  auto in = open_in(path);
  Index n = 0, d = 0;
  {
    std::string header;
    if (!std::getline(in, header)) throw IoError(path + ": empty file");
    std::istringstream hs(header);
    if (!(hs >> n >> d) || n < 0 || d < 1) throw IoError(path + ": bad header");
  }
  EmbeddingData data;
  data.points.resize(n, d);
  data.labels.reserve(n);
  std::string line;
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": fewer rows than the header says");
    std::istringstream ls(line);
    std::string label;
    if (!(ls >> label)) throw IoError(path + ": missing label on row " + std::to_string(i));
    data.labels.push_back(label);
    std::string token;
    for (Index j = 0; j < d; ++j) {
      if (!(ls >> token))
        throw IoError(path + ": row " + std::to_string(i) + " has fewer than " +
                      std::to_string(d) + " values");
      data.points(i, j) = parse_double(token, path);
    }
    if (ls >> token) throw IoError(path + ": row " + std::to_string(i) + " has extra values");
  }
  if (std::getline(in, line) && !line.empty())
    throw IoError(path + ": more rows than the header says");
  if (!data.points.allFinite()) throw IoError(path + ": non-finite values");
  return data;
}

void write_matches(const std::string& path, const TokenPairs& pairs) {
  auto out = open_out(path);
  for (const auto& [s, t] : pairs) out << s << '\t' << t << '\n';
}

TokenPairs read_matches(const std::string& path) {
  auto in = open_in(path);
  TokenPairs pairs;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size())
      throw IoError(path + ": line " + std::to_string(lineno) +
                    " is not 'source<TAB>target'");
    pairs.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return pairs;
}

MatchPairs resolve_matches(const TokenPairs& pairs,
                           const std::vector<std::string>& source_labels,
                           const std::vector<std::string>& target_labels) {
  std::unordered_map<std::string, Index> src_index, tgt_index;
  for (size_t i = 0; i < source_labels.size(); ++i) src_index[source_labels[i]] = Index(i);
  for (size_t j = 0; j < target_labels.size(); ++j) tgt_index[target_labels[j]] = Index(j);

  std::unordered_set<std::string> seen;
  MatchPairs out;
  for (const auto& [s, t] : pairs) {
    if (!seen.insert(s).second) throw IoError("duplicate source token '" + s + "'");
    const auto si = src_index.find(s);
    if (si == src_index.end()) throw IoError("unresolvable source token '" + s + "'");
    const auto tj = tgt_index.find(t);
    if (tj == tgt_index.end()) throw IoError("unresolvable target token '" + t + "'");
    out.emplace_back(si->second, tj->second);
  }
  return out;
}

void write_coupling_csv(const std::string& path, const Matrix& plan) {
  auto out = open_out(path);
  out << plan.rows() << ',' << plan.cols() << '\n';
  for (Index i = 0; i < plan.rows(); ++i) {
    for (Index j = 0; j < plan.cols(); ++j) {
      if (j) out << ',';
      out << format_double(plan(i, j));
    }
    out << '\n';
  }
}

Matrix read_coupling_csv(const std::string& path) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  Index n = 0, m = 0;
  if (std::sscanf(line.c_str(), "%td,%td", &n, &m) != 2 || n < 1 || m < 1)
    throw IoError(path + ": bad header");
  Matrix plan(n, m);
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw IoError(path + ": missing row " + std::to_string(i));
    std::istringstream ls(line);
    std::string cell;
    for (Index j = 0; j < m; ++j) {
      if (!std::getline(ls, cell, ',')) throw IoError(path + ": short row");
      plan(i, j) = parse_double(cell, path);
    }
  }
  return plan;
}

void write_coupling_triplets(const std::string& path, const Matrix& plan) {
  auto out = open_out(path);
  for (Index i = 0; i < plan.rows(); ++i)
    for (Index j = 0; j < plan.cols(); ++j)
      if (plan(i, j) != 0.0)
        out << i << ' ' << j << ' ' << format_double(plan(i, j)) << '\n';
}

void write_model(const std::string& path, const Model& model) {
  auto out = open_out(path);
  out << "layers " << model.layers.size() << '\n';
  out << "nonlinearity "
      << (model.nonlinearity == Nonlinearity::relu
              ? "relu"
              : model.nonlinearity == Nonlinearity::tanh ? "tanh" : "none")
      << '\n';
  out << "use_bias " << (model.use_bias ? 1 : 0) << '\n';
  for (const auto& layer : model.layers) {
    out << "layer " << layer.W.rows() << ' ' << layer.W.cols() << '\n';
    out << "W";
    for (Index r = 0; r < layer.W.rows(); ++r)
      for (Index c = 0; c < layer.W.cols(); ++c) out << ' ' << format_double(layer.W(r, c));
    out << '\n';
    out << "b";
    for (Index k = 0; k < layer.b.size(); ++k) out << ' ' << format_double(layer.b[k]);
    out << '\n';
  }
}

Model read_model(const std::string& path) {
  auto in = open_in(path);
  Model model;
  std::string key;
  size_t n_layers = 0;
  if (!(in >> key >> n_layers) || key != "layers") throw IoError(path + ": bad model header");
  std::string nl;
  if (!(in >> key >> nl) || key != "nonlinearity")
    throw IoError(path + ": missing nonlinearity");
  if (nl == "relu")
    model.nonlinearity = Nonlinearity::relu;
  else if (nl == "tanh")
    model.nonlinearity = Nonlinearity::tanh;
  else if (nl == "none")
    model.nonlinearity = Nonlinearity::none;
  else
    throw IoError(path + ": unknown nonlinearity '" + nl + "'");
  int bias = 1;
  if (!(in >> key >> bias) || key != "use_bias") throw IoError(path + ": missing use_bias");
  model.use_bias = bias != 0;

  for (size_t l = 0; l < n_layers; ++l) {
    Index rows = 0, cols = 0;
    if (!(in >> key >> rows >> cols) || key != "layer" || rows < 1 || cols < 1)
      throw IoError(path + ": bad layer header");
    LinearLayer layer;
    layer.W.resize(rows, cols);
    if (!(in >> key) || key != "W") throw IoError(path + ": missing weights");
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c)
        if (!(in >> layer.W(r, c))) throw IoError(path + ": truncated weights");
    layer.b.resize(rows);
    if (!(in >> key) || key != "b") throw IoError(path + ": missing bias");
    for (Index k = 0; k < rows; ++k)
      if (!(in >> layer.b[k])) throw IoError(path + ": truncated bias");
    model.layers.push_back(std::move(layer));
  }
  validate_model(model);
  return model;
}

void write_wrapped_gaussian(const std::string& path, const WrappedGaussian& g) {
  auto out = open_out(path);
  out << "mu";
  for (Index k = 0; k < g.mu.size(); ++k) out << ' ' << format_double(g.mu[k]);
  out << '\n';
  for (Index r = 0; r < g.sigma.rows(); ++r) {
    out << "sigma";
    for (Index c = 0; c < g.sigma.cols(); ++c) out << ' ' << format_double(g.sigma(r, c));
    out << '\n';
  }
}

WrappedGaussian read_wrapped_gaussian(const std::string& path, const BallParams& ball) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw IoError(path + ": empty file");
  std::istringstream ms(line);
  std::string key;
  if (!(ms >> key) || key != "mu") throw IoError(path + ": expected a mu line");
  std::vector<double> mu;
  for (std::string tok; ms >> tok;) mu.push_back(parse_double(tok, path));
  if (mu.empty()) throw IoError(path + ": empty mu");

  const Index d = Index(mu.size());
  WrappedGaussian g;
  g.ball = ball;
  g.mu = Eigen::Map<Vector>(mu.data(), d);
  g.sigma.resize(d, d);
  for (Index r = 0; r < d; ++r) {
    if (!std::getline(in, line)) throw IoError(path + ": missing sigma row");
    std::istringstream ss(line);
    if (!(ss >> key) || key != "sigma") throw IoError(path + ": expected a sigma row");
    std::string tok;
    for (Index c = 0; c < d; ++c) {
      if (!(ss >> tok)) throw IoError(path + ": short sigma row");
      g.sigma(r, c) = parse_double(tok, path);
    }
  }
  return g;
}

void write_loss_trace_csv(const std::string& path,
                          const std::vector<std::pair<int, double>>& trace) {
  auto out = open_out(path);
  out << "iter,loss\n";
  for (const auto& [it, loss] : trace) out << it << ',' << format_double(loss) << '\n';
}

void write_report(const std::string& txt_path, const std::string& csv_path,
                  const AlignmentReport& report) {
  {
    auto out = open_out(txt_path);
    out << "method=" << report.method << '\n';
    out << "k=" << report.k << '\n';
    out << "folds=" << report.folds << '\n';
    out << "hits_forward=" << format_double(report.hits_forward) << '\n';
    out << "hits_backward=" << format_double(report.hits_backward) << '\n';
    out << "seconds=" << format_double(report.seconds) << '\n';
    for (const auto& [k, v] : report.config_echo) out << k << '=' << v << '\n';
  }
  {
    auto out = open_out(csv_path);
    out << "method,direction,k,folds,hits,seconds\n";
    out << report.method << ",forward," << report.k << ',' << report.folds << ','
        << format_double(report.hits_forward) << ',' << format_double(report.seconds)
        << '\n';
    out << report.method << ",backward," << report.k << ',' << report.folds << ','
        << format_double(report.hits_backward) << ',' << format_double(report.seconds)
        << '\n';
  }
}

std::map<std::string, std::string> read_kv_config(const std::string& path) {
  auto in = open_in(path);
  std::map<std::string, std::string> kv;
  std::string line;
  Index lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError(path + ": line " + std::to_string(lineno) + " is not key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

namespace {

void svg_points(std::ofstream& out, const Matrix& pts, double scale, const char* color) {
  for (Index i = 0; i < pts.rows(); ++i)
    out << "  <circle cx=\"" << 300.0 + scale * pts(i, 0) << "\" cy=\""
        << 300.0 - scale * pts(i, 1) << "\" r=\"3\" fill=\"" << color
        << "\" fill-opacity=\"0.7\"/>\n";
}

}  // namespace

void write_svg_scatter(const std::string& path, const Matrix& source,
                       const Matrix& transported, const Matrix& target, double radius) {
  if (source.cols() != 2 || target.cols() != 2)
    throw DimensionError("svg scatter: only 2-d clouds can be drawn");
  auto out = open_out(path);
  const double scale = 280.0 / radius;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"600\" height=\"600\">\n";
  out << "  <rect width=\"600\" height=\"600\" fill=\"white\"/>\n";
  out << "  <circle cx=\"300\" cy=\"300\" r=\"" << scale * radius
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
  svg_points(out, source, scale, "#1f77b4");
  svg_points(out, transported, scale, "#2ca02c");
  svg_points(out, target, scale, "#d62728");
  out << "  <text x=\"10\" y=\"20\" fill=\"#1f77b4\">source</text>\n";
  out << "  <text x=\"10\" y=\"40\" fill=\"#2ca02c\">transported</text>\n";
  out << "  <text x=\"10\" y=\"60\" fill=\"#d62728\">target</text>\n";
  out << "</svg>\n";
}

}  // namespace hyperot
