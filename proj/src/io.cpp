#include "steer/io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "steer/errors.hpp"

namespace steer {

namespace {

using nlohmann::json;

std::string fmt(double x) {
  if (!std::isfinite(x))
    throw NumericalError("refusing to serialize a non-finite value");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void append_matrix(std::string& out, const Eigen::MatrixXcd& m) {
  out += '[';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i > 0) out += ", ";
    out += '[';
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ", ";
      out += '[';
      out += fmt(m(i, j).real());
      out += ", ";
      out += fmt(m(i, j).imag());
      out += ']';
    }
    out += ']';
  }
  out += ']';
}

void append_blocks(std::string& out, const Assemblage& sigma,
                   const std::string& indent) {
  out += "[\n";
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    out += indent + "  [\n";
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      out += indent + "    ";
      append_matrix(out, sigma.block(n, r).mat());
      out += n + 1 < sigma.n_outcomes() ? ",\n" : "\n";
    }
    out += indent + (r + 1 < sigma.n_inputs() ? "  ],\n" : "  ]\n");
  }
  out += indent + "]";
}

json parse_or_throw(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

const json& field(const json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end())
    throw ParseError(std::string("missing field: ") + key);
  return *it;
}

int int_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer())
    throw ParseError(std::string("field is not an integer: ") + key);
  return v.get<int>();
}

long long long_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number_integer())
    throw ParseError(std::string("field is not an integer: ") + key);
  return v.get<long long>();
}

double number_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_number())
    throw ParseError(std::string("field is not a number: ") + key);
  return v.get<double>();
}

bool bool_field(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_boolean())
    throw ParseError(std::string("field is not a boolean: ") + key);
  return v.get<bool>();
}

void require_version(const json& j) {
  const json& v = field(j, "format_version");
  if (!v.is_string() || v.get<std::string>() != "1")
    throw ParseError("unsupported format_version, expected \"1\"");
}

Eigen::MatrixXcd read_matrix(const json& rows, int dim, const char* where) {
  if (!rows.is_array() || int(rows.size()) != dim)
    throw ParseError(std::string(where) + ": expected " +
                     std::to_string(dim) + " rows");
  Eigen::MatrixXcd m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = rows[i];
    if (!row.is_array() || int(row.size()) != dim)
      throw ParseError(std::string(where) + ": row " + std::to_string(i) +
                       " should hold " + std::to_string(dim) + " entries");
    for (int j = 0; j < dim; ++j) {
      const json& entry = row[j];
      if (!entry.is_array() || entry.size() != 2 ||
          !entry[0].is_number() || !entry[1].is_number())
        throw ParseError(std::string(where) +
                         ": entries must be [real, imaginary] pairs");
      m(i, j) = std::complex<double>(entry[0].get<double>(),
                                     entry[1].get<double>());
    }
  }
  return m;
}

HermitianOperator read_block(const json& rows, int dim, int outcome,
                             int input, double eps) {
  std::ostringstream where;
  where << "block (" << outcome << "|" << input << ")";
  const Eigen::MatrixXcd m = read_matrix(rows, dim, where.str().c_str());
  const double gap = (m - m.adjoint()).norm();
  if (gap > 10.0 * eps) {
    std::ostringstream msg;
    msg << where.str() << " is not Hermitian, asymmetry " << gap;
    throw ValidationError(msg.str());
  }
  return HermitianOperator::from_matrix(0.5 * (m + m.adjoint()), 1.0);
}

std::vector<HermitianOperator> read_grid(const json& blocks, int dim,
                                         int n_outcomes, int n_inputs,
                                         double eps) {
  if (!blocks.is_array() || int(blocks.size()) != n_inputs)
    throw ParseError("blocks: expected one array per input");
  std::vector<HermitianOperator> grid;
  grid.reserve(std::size_t(n_inputs) * n_outcomes);
  for (int r = 0; r < n_inputs; ++r) {
    const json& per_input = blocks[r];
    if (!per_input.is_array() || int(per_input.size()) != n_outcomes)
      throw ParseError("blocks: input " + std::to_string(r) +
                       " should hold " + std::to_string(n_outcomes) +
                       " outcome matrices");
    for (int n = 0; n < n_outcomes; ++n)
      grid.push_back(read_block(per_input[n], dim, n, r, eps));
  }
  return grid;
}

void check_shape(int dim, int n_outcomes, int n_inputs) {
  if (dim <= 0 || n_outcomes <= 0 || n_inputs <= 0)
    throw ParseError("dim, n_outcomes and n_inputs must be positive");
}

}  // namespace

std::string to_json(const Assemblage& sigma) {
  std::string out = "{\n";
  out += "  \"format_version\": \"1\",\n";
  out += "  \"dim\": " + std::to_string(sigma.dim()) + ",\n";
  out += "  \"n_outcomes\": " + std::to_string(sigma.n_outcomes()) + ",\n";
  out += "  \"n_inputs\": " + std::to_string(sigma.n_inputs()) + ",\n";
  out += "  \"blocks\": ";
  append_blocks(out, sigma, "  ");
  out += "\n}\n";
  return out;
}

std::string perturbation_to_json(const Perturbation& d) {
  std::string out = "{\n";
  out += "  \"format_version\": \"1\",\n";
  out += "  \"dim\": " + std::to_string(d.dim()) + ",\n";
  out += "  \"n_outcomes\": " + std::to_string(d.n_outcomes()) + ",\n";
  out += "  \"n_inputs\": " + std::to_string(d.n_inputs()) + ",\n";
  out += "  \"blocks\": [\n";
  for (int r = 0; r < d.n_inputs(); ++r) {
    out += "    [\n";
    for (int n = 0; n < d.n_outcomes(); ++n) {
      out += "      ";
      append_matrix(out, d.block(n, r).mat());
      out += n + 1 < d.n_outcomes() ? ",\n" : "\n";
    }
    out += r + 1 < d.n_inputs() ? "    ],\n" : "    ]\n";
  }
  out += "  ]\n}\n";
  return out;
}

Assemblage assemblage_from_json(const std::string& text, double eps) {
  const json j = parse_or_throw(text);
  if (!j.is_object()) throw ParseError("top level must be an object");
  require_version(j);
  const int dim = int_field(j, "dim");
  const int n_outcomes = int_field(j, "n_outcomes");
  const int n_inputs = int_field(j, "n_inputs");
  check_shape(dim, n_outcomes, n_inputs);
  return Assemblage(dim, n_outcomes, n_inputs,
                    read_grid(field(j, "blocks"), dim, n_outcomes, n_inputs,
                              eps));
}

std::string result_to_json(const Assemblage& input,
                           const DecompositionResult& result, double eps) {
  std::string out = "{\n";
  out += "  \"format_version\": \"1\",\n";
  out += "  \"input_hash\": \"" + content_hash(to_json(input)) + "\",\n";
  out += "  \"dim\": " + std::to_string(input.dim()) + ",\n";
  out += "  \"n_outcomes\": " + std::to_string(input.n_outcomes()) + ",\n";
  out += "  \"n_inputs\": " + std::to_string(input.n_inputs()) + ",\n";
  out += "  \"epsilon\": " + fmt(eps) + ",\n";
  out += "  \"truncated\": ";
  out += result.truncated ? "true" : "false";
  out += ",\n";
  out += "  \"reconstruction_residual\": " +
         fmt(result.reconstruction_residual) + ",\n";

  out += "  \"stats\": {\n";
  out += "    \"node_count\": " + std::to_string(result.stats.node_count) +
         ",\n";
  out += "    \"max_depth\": " + std::to_string(result.stats.max_depth) +
         ",\n";
  out += "    \"dedup_merges\": " +
         std::to_string(result.stats.dedup_merges) + ",\n";
  if (result.stats.first_split) {
    const FirstSplitInfo& fs = *result.stats.first_split;
    out += "    \"first_split\": {\n";
    out += "      \"p_plus\": " + fmt(fs.p_plus) + ",\n";
    out += "      \"p_minus\": " + fmt(fs.p_minus) + ",\n";
    out += "      \"branch_weight_plus\": " + fmt(fs.branch_weight_plus) +
           ",\n";
    out += "      \"branch_weight_minus\": " + fmt(fs.branch_weight_minus) +
           ",\n";
    out += "      \"marginal_plus\": ";
    append_matrix(out, fs.marginal_plus);
    out += ",\n      \"marginal_minus\": ";
    append_matrix(out, fs.marginal_minus);
    out += "\n    }\n";
  } else {
    out += "    \"first_split\": null\n";
  }
  out += "  },\n";

  out += "  \"leaves\": [\n";
  for (std::size_t i = 0; i < result.leaves.size(); ++i) {
    const Leaf& leaf = result.leaves[i];
    out += "    {\"weight\": " + fmt(leaf.weight) + ", \"blocks\": ";
    std::string blocks;
    blocks.reserve(256);
    blocks += '[';
    for (int r = 0; r < leaf.assemblage.n_inputs(); ++r) {
      if (r > 0) blocks += ", ";
      blocks += '[';
      for (int n = 0; n < leaf.assemblage.n_outcomes(); ++n) {
        if (n > 0) blocks += ", ";
        append_matrix(blocks, leaf.assemblage.block(n, r).mat());
      }
      blocks += ']';
    }
    blocks += ']';
    out += blocks;
    out += i + 1 < result.leaves.size() ? "},\n" : "}\n";
  }
  out += "  ]\n}\n";
  return out;
}

ResultFile result_from_json(const std::string& text, double eps) {
  const json j = parse_or_throw(text);
  if (!j.is_object()) throw ParseError("top level must be an object");
  require_version(j);

  ResultFile out;
  const json& hash = field(j, "input_hash");
  if (!hash.is_string()) throw ParseError("input_hash must be a string");
  out.input_hash = hash.get<std::string>();
  out.dim = int_field(j, "dim");
  out.n_outcomes = int_field(j, "n_outcomes");
  out.n_inputs = int_field(j, "n_inputs");
  check_shape(out.dim, out.n_outcomes, out.n_inputs);
  out.epsilon = number_field(j, "epsilon");
  out.truncated = bool_field(j, "truncated");
  out.reconstruction_residual = number_field(j, "reconstruction_residual");

  const json& stats = field(j, "stats");
  if (!stats.is_object()) throw ParseError("stats must be an object");
  out.stats.node_count = long_field(stats, "node_count");
  out.stats.max_depth = int_field(stats, "max_depth");
  out.stats.dedup_merges = long_field(stats, "dedup_merges");
  const json& fs = field(stats, "first_split");
  if (!fs.is_null()) {
    if (!fs.is_object())
      throw ParseError("first_split must be an object or null");
    FirstSplitInfo info;
    info.p_plus = number_field(fs, "p_plus");
    info.p_minus = number_field(fs, "p_minus");
    info.branch_weight_plus = number_field(fs, "branch_weight_plus");
    info.branch_weight_minus = number_field(fs, "branch_weight_minus");
    info.marginal_plus =
        read_matrix(field(fs, "marginal_plus"), out.dim, "marginal_plus");
    info.marginal_minus =
        read_matrix(field(fs, "marginal_minus"), out.dim, "marginal_minus");
    out.stats.first_split = std::move(info);
  }

  const json& leaves = field(j, "leaves");
  if (!leaves.is_array()) throw ParseError("leaves must be an array");
  out.leaves.reserve(leaves.size());
  for (const json& entry : leaves) {
    if (!entry.is_object()) throw ParseError("leaf entries must be objects");
    const double weight = number_field(entry, "weight");
    out.leaves.push_back(
        {weight,
         Assemblage(out.dim, out.n_outcomes, out.n_inputs,
                    read_grid(field(entry, "blocks"), out.dim,
                              out.n_outcomes, out.n_inputs, eps))});
  }
  return out;
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw ParseError("error while reading: " + path.string());
  return std::move(buffer).str();
}

void write_text_file(const std::filesystem::path& path,
                     std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out.write(content.data(), std::streamsize(content.size()));
  if (!out) throw Error("error while writing: " + path.string());
}

}  // namespace steer
