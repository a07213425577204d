#include "steer/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <utility>

namespace steer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Raw bytes of every block entry. Only used for ordering, so all it needs
// is to be total and deterministic for identical doubles.
std::string leaf_key(const Assemblage& a) {
  std::string key;
  key.reserve(static_cast<std::size_t>(a.n_inputs()) * a.n_outcomes() *
              a.dim() * a.dim() * 2 * sizeof(double));
  const auto push = [&key](double x) {
    char buf[sizeof(double)];
    std::memcpy(buf, &x, sizeof(double));
    key.append(buf, sizeof(double));
  };
  for (int r = 0; r < a.n_inputs(); ++r) {
    for (int n = 0; n < a.n_outcomes(); ++n) {
      const Eigen::MatrixXcd& m = a.block(n, r).mat();
      for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
          push(m(i, j).real());
          push(m(i, j).imag());
        }
      }
    }
  }
  return key;
}

bool blocks_close(const Assemblage& a, const Assemblage& b, double tol) {
  if (a.dim() != b.dim() || a.n_outcomes() != b.n_outcomes() ||
      a.n_inputs() != b.n_inputs())
    return false;
  for (int r = 0; r < a.n_inputs(); ++r)
    for (int n = 0; n < a.n_outcomes(); ++n)
      if ((a.block(n, r) - b.block(n, r)).frobenius_norm() > tol)
        return false;
  return true;
}

// Collects leaves while folding equivalent ones together on arrival, so
// the recursion never holds more than the set of distinct leaves. Lookup
// goes through the trace of the first block: two leaves within tol of
// each other can differ in that trace by at most sqrt(dim) * tol.
class LeafMerger {
 public:
  LeafMerger(double tol, int dim)
      : tol_(tol), window_((std::sqrt(static_cast<double>(dim)) + 1.0) * tol) {}

  void add(double weight, const Assemblage& a) {
    const double key = a.block(0, 0).trace();
    const auto lo = index_.lower_bound(key - window_);
    const auto hi = index_.upper_bound(key + window_);
    std::size_t best = entries_.size();
    for (auto it = lo; it != hi; ++it) {
      if (it->second < best &&
          blocks_close(entries_[it->second].assemblage, a, tol_))
        best = it->second;
    }
    if (best < entries_.size()) {
      entries_[best].weight += weight;
      ++merges_;
      return;
    }
    entries_.push_back({weight, a});
    index_.emplace(key, entries_.size() - 1);
  }

  std::size_t unique_count() const { return entries_.size(); }
  long long merges() const { return merges_; }

  std::vector<Leaf> finalize() && {
    std::vector<std::pair<std::string, std::size_t>> keys;
    keys.reserve(entries_.size());
    for (std::size_t i = 0; i < entries_.size(); ++i)
      keys.emplace_back(leaf_key(entries_[i].assemblage), i);
    std::sort(keys.begin(), keys.end());
    std::vector<Leaf> out;
    out.reserve(entries_.size());
    for (const auto& entry : keys) out.push_back(std::move(entries_[entry.second]));
    return out;
  }

 private:
  double tol_;
  double window_;
  std::vector<Leaf> entries_;
  std::multimap<double, std::size_t> index_;
  long long merges_ = 0;
};

HermitianOperator clipped(const HermitianOperator& h, double eps) {
  const EigenFrame frame = hermitian_eig(h);
  Eigen::VectorXd fixed = frame.eigenvalues;
  bool dirty = false;
  for (int i = 0; i < fixed.size(); ++i) {
    if (fixed[i] < -10.0 * eps)
      throw ValidationError("split child block fell below the clip budget");
    if (fixed[i] < 0.0) {
      fixed[i] = 0.0;
      dirty = true;
    }
  }
  if (!dirty) return h;
  return EigenFrame{fixed, frame.eigenvectors}.reconstruct(h.dim());
}

// Clip stray negative eigenvalues and average the per-input marginals
// back into exact agreement. Keeps recursion children valid without
// letting tolerances pile up with depth.
Assemblage sanitized(const Assemblage& a, double eps) {
  const int n_outcomes = a.n_outcomes();
  const int n_inputs = a.n_inputs();
  std::vector<HermitianOperator> blocks;
  blocks.reserve(static_cast<std::size_t>(n_outcomes) * n_inputs);
  for (int r = 0; r < n_inputs; ++r)
    for (int n = 0; n < n_outcomes; ++n)
      blocks.push_back(clipped(a.block(n, r), eps));

  std::vector<HermitianOperator> sums;
  HermitianOperator avg(a.dim());
  for (int r = 0; r < n_inputs; ++r) {
    HermitianOperator sum(a.dim());
    for (int n = 0; n < n_outcomes; ++n)
      sum = sum + blocks[static_cast<std::size_t>(r) * n_outcomes + n];
    avg = avg + sum;
    sums.push_back(std::move(sum));
  }
  avg = (1.0 / n_inputs) * avg;
  for (int r = 0; r < n_inputs; ++r) {
    const HermitianOperator fix =
        (1.0 / n_outcomes) * (avg - sums[r]);
    for (int n = 0; n < n_outcomes; ++n) {
      auto& slot = blocks[static_cast<std::size_t>(r) * n_outcomes + n];
      slot = slot + fix;
    }
  }
  return Assemblage(a.dim(), n_outcomes, n_inputs, std::move(blocks));
}

struct Engine {
  const DecompositionOptions& opts;
  int depth_limit;
  LeafMerger merger;
  DecompositionStats stats;
  bool truncated = false;
  double emitted = 0.0;
  bool first_split_seen = false;

  bool capped() const {
    return opts.max_leaves > 0 && merger.unique_count() >= opts.max_leaves;
  }

  void emit(const Assemblage& a, double p) {
    merger.add(p, a);
    emitted += p;
  }

  void recurse(const Assemblage& sigma, double p, int x, int depth) {
    ++stats.node_count;
    stats.max_depth = std::max(stats.max_depth, depth);

    // Directions that leave every marginal alone, one input at a time,
    // last input first. A split keeps working on the same input; once an
    // input's supports are independent they stay independent down the
    // whole subtree, so no revisiting.
    for (; x > 0; --x) {
      const auto witness = zero_marginal_witness(sigma, x - 1, opts.epsilon);
      if (!witness) continue;
      branch(sigma, p, *witness, x, depth);
      return;
    }

    // Marginal-changing directions from the system over every input.
    std::vector<int> all(sigma.n_inputs());
    std::iota(all.begin(), all.end(), 0);
    const ConstraintSystem full = cross_input_system(sigma, all, opts.epsilon);
    const auto ns = real_nullspace(full.matrix, opts.epsilon);
    if (ns.empty()) {
      emit(sigma, p);
      return;
    }
    branch(sigma, p,
           perturbation_from_coefficients(sigma, full.elements, ns.front()),
           0, depth);
  }

  void branch(const Assemblage& sigma, double p, const Perturbation& d,
              int x, int depth) {
    if (depth >= depth_limit || capped()) {
      truncated = true;
      emit(sigma, p);
      return;
    }
    const Split s = split(sigma, d, opts.epsilon);
    if (opts.on_split) opts.on_split(sigma, d, s.w_plus, s.w_minus);

    const bool is_first = !first_split_seen;
    first_split_seen = true;
    if (is_first) {
      FirstSplitInfo info;
      info.p_plus = s.p_plus;
      info.p_minus = s.p_minus;
      info.marginal_plus = marginal(s.plus).mat();
      info.marginal_minus = marginal(s.minus).mat();
      stats.first_split = std::move(info);
    }

    double before = emitted;
    recurse(s.plus, p * s.p_plus, x, depth + 1);
    if (is_first) stats.first_split->branch_weight_plus = emitted - before;
    before = emitted;
    recurse(s.minus, p * s.p_minus, x, depth + 1);
    if (is_first) stats.first_split->branch_weight_minus = emitted - before;
  }
};

}  // namespace

WeightPair max_weights(const Assemblage& sigma, const Perturbation& d,
                       double eps) {
  if (d.dim() != sigma.dim() || d.n_outcomes() != sigma.n_outcomes() ||
      d.n_inputs() != sigma.n_inputs())
    throw ShapeError("direction shape does not match the assemblage");

  double w_plus = kInf, w_minus = kInf;
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      const Eigen::MatrixXcd& dm = d.block(n, r).mat();
      const double dnorm = dm.norm();
      const EigenFrame frame = support_frame(sigma.block(n, r), eps);
      const int k = frame.size();
      if (k == 0) {
        if (dnorm > 10.0 * eps)
          throw ValidationError(
              "direction has weight on a zero block of the assemblage");
        continue;
      }
      const Eigen::MatrixXcd& v = frame.eigenvectors;
      const Eigen::MatrixXcd proj = v * v.adjoint();
      if ((dm - proj * dm * proj).norm() > 10.0 * eps * std::max(1.0, dnorm))
        throw ValidationError(
            "direction leaks outside a block support; the weight problem "
            "would be unbounded below");

      const Eigen::VectorXd inv_sqrt =
          frame.eigenvalues.cwiseSqrt().cwiseInverse();
      const Eigen::MatrixXcd t = inv_sqrt.asDiagonal() *
                                 (v.adjoint() * dm * v) *
                                 inv_sqrt.asDiagonal();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
          0.5 * (t + t.adjoint()), Eigen::EigenvaluesOnly);
      const double lam_min = es.eigenvalues().minCoeff();
      const double lam_max = es.eigenvalues().maxCoeff();
      if (lam_min < 0.0) w_plus = std::min(w_plus, -1.0 / lam_min);
      if (lam_max > 0.0) w_minus = std::min(w_minus, 1.0 / lam_max);
    }
  }
  if (!(w_plus < kInf) || !(w_minus < kInf))
    throw NumericalError(
        "direction admits an unbounded weight, so it cannot satisfy the "
        "traceless-marginal constraint");
  return {w_plus, w_minus};
}

Split split(const Assemblage& sigma, const Perturbation& d, double eps) {
  const WeightPair w = max_weights(sigma, d, eps);
  Assemblage plus = sanitized(apply_perturbation(sigma, d, w.plus, eps), eps);
  Assemblage minus =
      sanitized(apply_perturbation(sigma, d, -w.minus, eps), eps);
  const double total = w.plus + w.minus;
  return {std::move(plus), std::move(minus), w.minus / total,
          w.plus / total, w.plus, w.minus};
}

DecompositionResult decompose(const Assemblage& sigma,
                              const DecompositionOptions& options) {
  require_valid(sigma, options.epsilon);
  const int depth_limit =
      options.max_depth > 0
          ? options.max_depth
          : 4 * sigma.n_outcomes() * sigma.n_inputs() * sigma.dim();

  Engine engine{options, depth_limit,
                LeafMerger(options.dedup_tol, sigma.dim()), {}};
  engine.recurse(sigma, 1.0, sigma.n_inputs(), 0);

  DecompositionResult result;
  result.stats = std::move(engine.stats);
  result.stats.dedup_merges = engine.merger.merges();
  result.truncated = engine.truncated;
  result.leaves = std::move(engine.merger).finalize();
  result.reconstruction_residual =
      reconstruction_residual(sigma, result.leaves);
  return result;
}

std::vector<Leaf> merge_equivalent(const std::vector<Leaf>& leaves,
                                   double tol) {
  if (leaves.empty()) return {};
  LeafMerger merger(tol, leaves.front().assemblage.dim());
  for (const auto& leaf : leaves) merger.add(leaf.weight, leaf.assemblage);
  return std::move(merger).finalize();
}

double reconstruction_residual(const Assemblage& sigma,
                               const std::vector<Leaf>& leaves) {
  double worst = 0.0;
  for (int r = 0; r < sigma.n_inputs(); ++r) {
    for (int n = 0; n < sigma.n_outcomes(); ++n) {
      HermitianOperator sum(sigma.dim());
      for (const auto& leaf : leaves)
        sum = sum + leaf.weight * leaf.assemblage.block(n, r);
      worst = std::max(worst, (sum - sigma.block(n, r)).frobenius_norm());
    }
  }
  return worst;
}

}  // namespace steer
