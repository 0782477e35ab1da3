#include <cmath>
#include <cstdlib>

#include "fdcim/adc.hpp"

namespace fdcim::adc {

int SearchTree::build(std::uint32_t lo, std::uint32_t hi, const std::vector<std::vector<std::uint32_t>>& split) {
  const int idx = static_cast<int>(nodes_.size());
  nodes_.push_back(Node{lo, hi, 0, -1, -1});
  if (lo == hi) return idx;
  const std::uint32_t t = split[lo][hi];
  if (t <= lo || t > hi) throw ParameterError("SearchTree: split outside its interval");
  const int l = build(lo, t - 1, split);
  const int r = build(t, hi, split);
  nodes_[static_cast<std::size_t>(idx)].threshold = t;
  nodes_[static_cast<std::size_t>(idx)].left = l;
  nodes_[static_cast<std::size_t>(idx)].right = r;
  return idx;
}

SearchTree SearchTree::from_splits(int bits, const std::vector<std::vector<std::uint32_t>>& split) {
  if (bits < 1 || bits > 8) throw ParameterError("SearchTree: bits must be in 1..8");
  SearchTree t;
  t.bits_ = bits;
  t.nodes_.reserve(2 * t.num_codes());
  t.root_ = t.build(0, static_cast<std::uint32_t>(t.num_codes() - 1), split);
  return t;
}

SearchTree SearchTree::balanced(int bits) {
  if (bits < 1 || bits > 8) throw ParameterError("SearchTree: bits must be in 1..8");
  const std::size_t n = std::size_t{1} << bits;
  std::vector<std::vector<std::uint32_t>> split(n, std::vector<std::uint32_t>(n, 0));
  for (std::size_t lo = 0; lo < n; ++lo) {
    for (std::size_t hi = lo + 1; hi < n; ++hi) split[lo][hi] = static_cast<std::uint32_t>((lo + hi + 1) / 2);
  }
  return from_splits(bits, split);
}

int SearchTree::depth(std::uint32_t code) const {
  if (code >= num_codes()) throw ShapeError("SearchTree: code out of range");
  int n = root_;
  int d = 0;
  while (!node(n).is_leaf()) {
    n = code >= node(n).threshold ? node(n).right : node(n).left;
    ++d;
  }
  return d;
}

std::vector<int> SearchTree::depths() const {
  std::vector<int> out(num_codes());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = depth(static_cast<std::uint32_t>(c));
  return out;
}

namespace {

void render(const SearchTree& t, int n, std::string& out) {
  const auto& node = t.node(n);
  if (node.is_leaf()) {
    out += std::to_string(node.lo);
    return;
  }
  out += '(';
  render(t, node.left, out);
  out += " <" + std::to_string(node.threshold) + "> ";
  render(t, node.right, out);
  out += ')';
}

}  // namespace

std::string SearchTree::to_parenthesized() const {
  std::string out;
  render(*this, root_, out);
  return out;
}

AsymmetricTreeResult build_asymmetric_tree(const MavPmf& pmf) {
  pmf.validate();
  const std::size_t n = pmf.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + pmf.p[i];

  // cost[lo][hi]: minimum expected comparisons (unnormalised) to resolve [lo, hi]
  std::vector<std::vector<double>> cost(n, std::vector<double>(n, 0.0));
  std::vector<std::vector<std::uint32_t>> split(n, std::vector<std::uint32_t>(n, 0));
  for (std::size_t len = 2; len <= n; ++len) {
    for (std::size_t lo = 0; lo + len <= n; ++lo) {
      const std::size_t hi = lo + len - 1;
      const double mid2 = static_cast<double>(lo + hi + 1);  // 2 * balanced split point
      std::size_t best_t = lo + 1;
      double best = cost[lo][lo] + cost[lo + 1][hi];
      for (std::size_t t = lo + 2; t <= hi; ++t) {
        const double c = cost[lo][t - 1] + cost[t][hi];
        const double tie = 1e-12 * (1.0 + std::abs(best));
        if (c < best - tie) {
          best = c;
          best_t = t;
        } else if (c <= best + tie &&
                   std::abs(2.0 * static_cast<double>(t) - mid2) < std::abs(2.0 * static_cast<double>(best_t) - mid2)) {
          best = std::min(best, c);
          best_t = t;  // among equal costs prefer the most balanced split
        }
      }
      cost[lo][hi] = best + (prefix[hi + 1] - prefix[lo]);
      split[lo][hi] = static_cast<std::uint32_t>(best_t);
    }
  }
  return {SearchTree::from_splits(pmf.bits, split), cost[0][n - 1]};
}

double expected_comparisons(const SearchTree& tree, const MavPmf& pmf) {
  if (pmf.size() != tree.num_codes()) throw ShapeError("expected_comparisons: pmf and tree sizes differ");
  const auto d = tree.depths();
  double e = 0.0;
  for (std::size_t c = 0; c < d.size(); ++c) e += pmf.p[c] * d[c];
  return e;
}

}  // namespace fdcim::adc
