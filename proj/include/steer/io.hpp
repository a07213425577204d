#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "steer/assemblage.hpp"
#include "steer/decomposition.hpp"

namespace steer {

// Grid layout shared by assemblage files and result leaves:
// blocks[input][outcome][row][col] = [re, im]. Numbers are printed with
// 17 significant digits, so parse -> serialize -> parse is value
// identical and repeated runs produce byte-identical files.

std::string to_json(const Assemblage& sigma);

// Same file layout for a perturbation grid, used to dump witnesses.
std::string perturbation_to_json(const Perturbation& d);

// Strict reader. Malformed JSON or a wrong structure raises ParseError,
// with the byte offset filled in when the parser reports one. A block
// whose matrix fails Hermiticity by more than 10 * eps raises
// ValidationError. Positivity and no-signalling are not checked here;
// callers run validate() and decide what to do.
Assemblage assemblage_from_json(const std::string& text,
                                double eps = kDefaultEpsilon);

// Decomposition result with provenance: a hash of the canonical input
// serialization, the tolerance used, stats, and one entry per leaf.
std::string result_to_json(const Assemblage& input,
                           const DecompositionResult& result, double eps);

struct ResultFile {
  std::string input_hash;
  int dim = 0;
  int n_outcomes = 0;
  int n_inputs = 0;
  double epsilon = 0.0;
  bool truncated = false;
  double reconstruction_residual = 0.0;
  DecompositionStats stats;
  std::vector<Leaf> leaves;
};

ResultFile result_from_json(const std::string& text,
                            double eps = kDefaultEpsilon);

// 64-bit FNV-1a over the bytes, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace steer
