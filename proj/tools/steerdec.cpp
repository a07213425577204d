#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <optional>
#include <string>

#include "steer/extremality.hpp"
#include "steer/io.hpp"
#include "steer/scenarios.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitParse = 2;
constexpr int kExitTruncated = 3;
constexpr int kExitOracleMismatch = 4;
constexpr int kExitUsage = 64;

steer::Assemblage load(const std::string& path, double eps) {
  return steer::assemblage_from_json(steer::read_text_file(path), eps);
}

// Result JSON (or a generated assemblage) goes to the given path, or to
// stdout when none was requested. Human-facing chatter stays on stderr so
// a piped stdout holds nothing but the file content.
void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::fputs(content.c_str(), stdout);
  else
    steer::write_text_file(out_path, content);
}

void print_report(const steer::ValidationReport& r) {
  const auto line = [](const char* label, bool ok, const char* fmt,
                       auto... args) {
    std::fprintf(stderr, "  %-22s", label);
    std::fprintf(stderr, fmt, args...);
    std::fprintf(stderr, "  [%s]\n", ok ? "pass" : "FAIL");
  };
  line("block positivity:", r.min_block_eigenvalue >= -r.epsilon,
       "min eigenvalue %.9g (outcome %d, input %d)", r.min_block_eigenvalue,
       r.min_block_outcome, r.min_block_input);
  line("no-signalling:", r.max_marginal_gap <= r.epsilon,
       "largest marginal gap %.9g", r.max_marginal_gap);
  line("normalization:", r.marginal_trace_error <= r.epsilon,
       "|marginal trace - 1| = %.9g", r.marginal_trace_error);
  std::fprintf(stderr, "overall: %s (epsilon %.9g)\n",
               r.pass ? "pass" : "FAIL", r.epsilon);
}

int run_validate(const std::string& path, double eps) {
  const steer::Assemblage sigma = load(path, eps);
  const steer::ValidationReport report = steer::validate(sigma, eps);
  print_report(report);
  return report.pass ? kExitOk : kExitInvalid;
}

int run_check(const std::string& path, double eps, bool oracle) {
  const steer::Assemblage sigma = load(path, eps);
  const steer::ValidationReport report = steer::validate(sigma, eps);
  if (!report.pass) {
    print_report(report);
    return kExitInvalid;
  }

  const steer::ExtremalityReport staged = steer::is_extremal(sigma, eps);
  std::printf("verdict: %s\n", staged.extremal ? "extremal" : "not extremal");
  std::printf("stage: %s\n", staged.stage.c_str());
  if (staged.witness) {
    std::printf("witness:\n%s",
                steer::perturbation_to_json(*staged.witness).c_str());
  }

  if (oracle) {
    const steer::ExtremalityReport direct =
        steer::is_extremal_direct(sigma, eps);
    if (direct.extremal != staged.extremal) {
      std::fprintf(stderr,
                   "oracle DISAGREES: staged says %s, direct says %s\n",
                   staged.extremal ? "extremal" : "not extremal",
                   direct.extremal ? "extremal" : "not extremal");
      return kExitOracleMismatch;
    }
    std::printf("oracle: agrees\n");
  }
  return kExitOk;
}

int run_decompose(const std::string& path, double eps,
                  std::size_t max_leaves, int max_depth,
                  const std::string& out_path) {
  const steer::Assemblage sigma = load(path, eps);
  steer::DecompositionOptions options;
  options.epsilon = eps;
  options.max_leaves = max_leaves;
  options.max_depth = max_depth;
  const steer::DecompositionResult result = steer::decompose(sigma, options);

  double min_w = 1.0, max_w = 0.0;
  for (const auto& leaf : result.leaves) {
    min_w = std::min(min_w, leaf.weight);
    max_w = std::max(max_w, leaf.weight);
  }
  std::fprintf(stderr, "leaves: %zu\n", result.leaves.size());
  if (!result.leaves.empty())
    std::fprintf(stderr, "weights: min %.9g, max %.9g\n", min_w, max_w);
  std::fprintf(stderr, "reconstruction residual: %.9g\n",
               result.reconstruction_residual);
  std::fprintf(stderr, "nodes: %lld, depth: %d, merges: %lld\n",
               result.stats.node_count, result.stats.max_depth,
               result.stats.dedup_merges);
  std::fprintf(stderr, "truncated: %s\n", result.truncated ? "yes" : "no");

  emit(out_path, steer::result_to_json(sigma, result, eps));
  return result.truncated ? kExitTruncated : kExitOk;
}

int run_generate(const std::string& name, std::optional<double> noise,
                 const std::string& out_path) {
  emit(out_path, steer::to_json(steer::scenario_by_name(name, noise)));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"steerdec: validate, test and decompose steering assemblages"};
  app.require_subcommand(1);

  std::string path, out_path, scenario;
  double eps = steer::kDefaultEpsilon;
  double noise = 0.2;
  std::size_t max_leaves = 100000;
  int max_depth = 0;
  bool oracle = false;

  auto* validate = app.add_subcommand(
      "validate", "Check a file against positivity and no-signalling");
  validate->add_option("file", path, "assemblage JSON file")->required();
  validate->add_option("--epsilon", eps, "numerical tolerance")
      ->capture_default_str();

  auto* check = app.add_subcommand(
      "check", "Decide whether an assemblage is extremal");
  check->add_option("file", path, "assemblage JSON file")->required();
  check->add_option("--epsilon", eps, "numerical tolerance")
      ->capture_default_str();
  check->add_flag("--oracle", oracle,
                  "re-run the slower direct criterion and compare");

  auto* decompose = app.add_subcommand(
      "decompose", "Decompose into a mixture of extremal assemblages");
  decompose->add_option("file", path, "assemblage JSON file")->required();
  decompose->add_option("--epsilon", eps, "numerical tolerance")
      ->capture_default_str();
  decompose->add_option("--max-leaves", max_leaves,
                        "truncate after this many unique leaves, 0 = off")
      ->capture_default_str();
  decompose->add_option("--max-depth", max_depth,
                        "recursion depth cap, 0 picks one from the shape")
      ->capture_default_str();
  decompose->add_option("--out", out_path,
                        "write the result file here instead of stdout");

  auto* generate =
      app.add_subcommand("generate", "Write a built-in example assemblage");
  generate->add_option("name", scenario, "pentagon, xtetra, mub3 or povm-counterexample")
      ->required();
  auto* noise_opt =
      generate->add_option("--noise", noise, "white-noise weight, mub3 only")
          ->check(CLI::Range(0.0, 1.0));
  generate->add_option("--out", out_path,
                       "write the assemblage here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*validate) return run_validate(path, eps);
    if (*check) return run_check(path, eps, oracle);
    if (*decompose)
      return run_decompose(path, eps, max_leaves, max_depth, out_path);
    if (*generate)
      return run_generate(scenario,
                          noise_opt->count() > 0
                              ? std::optional<double>(noise)
                              : std::nullopt,
                          out_path);
  } catch (const steer::ParseError& e) {
    if (e.byte_offset > 0)
      std::fprintf(stderr, "parse error at byte %zu: %s\n", e.byte_offset,
                   e.what());
    else
      std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitParse;
  } catch (const steer::ValidationError& e) {
    std::fprintf(stderr, "validation error: %s\n", e.what());
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const steer::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInvalid;
  }
  return kExitOk;
}
