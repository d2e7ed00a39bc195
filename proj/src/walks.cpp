#include "rmtlab/walks.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "rmtlab/errors.hpp"

namespace rmt {
namespace {

struct Enumerator {
  int k;
  std::vector<int> w;
  std::vector<std::uint64_t> counts;

  void finish() {
    std::map<std::pair<int, int>, int> edges;
    for (int m = 0; m < k; ++m) {
      const int a = w[m], b = w[(m + 1) % k];
      ++edges[{std::min(a, b), std::max(a, b)}];
    }
    for (const auto& [e, c] : edges)
      if (c < 2) return;
    const int p = *std::max_element(w.begin(), w.end()) + 1;
    ++counts[p];
  }

  void extend(int pos, int used) {
    if (pos == k) {
      finish();
      return;
    }
    for (int v = 0; v <= used; ++v) {
      w[pos] = v;
      extend(pos + 1, std::max(used, v + 1));
    }
  }
};

double binom(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  double b = 1;
  for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
  return std::round(b);
}

}  // namespace

std::vector<std::uint64_t> count_ordered_walks(int k) {
  if (k < 1 || k > 12) throw PreconditionViolation("walk enumeration supports 1 <= k <= 12");
  Enumerator e{k, std::vector<int>(k, 0), std::vector<std::uint64_t>(k + 1, 0)};
  e.w[0] = 0;
  e.extend(1, 1);
  return e.counts;
}

double walk_bound(int k, int p) {
  if (p < 1) return 0.0;
  const int free_edges = k - 2 * p + 2;
  if (free_edges < 0) return 0.0;
  return binom(k, 2 * p - 2) * std::pow(static_cast<double>(p), 2.0 * free_edges) * std::pow(2.0, 2 * p - 2);
}

double walk_weight(int k, int p, double n, double delta) {
  return walk_bound(k, p) * std::pow(n, 1 + (-0.5 + delta) * (k - 2 * (p - 1)));
}

std::uint64_t catalan(int m) {
  std::uint64_t c = 1;
  for (int i = 0; i < m; ++i) c = c * 2 * (2 * i + 1) / (i + 2);
  return c;
}

}  // namespace rmt
