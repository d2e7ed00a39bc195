#pragma once

#include <cstdint>
#include <vector>

namespace rmt {

// Ordered closed walks of length k (k edges, the last one closing back to
// w_1): vertices appear in increasing order of first visit, all p vertices
// are visited, and every undirected edge (self-loops included) is used at
// least twice.  Returns W(k, p) for p = 0..k (index p).
std::vector<std::uint64_t> count_ordered_walks(int k);

// binom(k, 2p-2) p^(2(k-2p+2)) 2^(2p-2)
double walk_bound(int k, int p);
// walk_bound(k, p) N^(1 + (-1/2 + delta)(k - 2(p-1)))
double walk_weight(int k, int p, double n, double delta);

std::uint64_t catalan(int m);

}  // namespace rmt
