#include <algorithm>
#include <bit>
#include <cstdint>

#include "qsched/error.hpp"
#include "qsched/ilp.hpp"

namespace qsched::ilp {
namespace {

class Bitset {
 public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  void reset(std::size_t i) { words_[i / 64] &= ~(std::uint64_t{1} << (i % 64)); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  bool none() const {
    return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
  }
  // Index of the lowest set bit; size() * 64 when empty.
  std::size_t first() const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] != 0) return k * 64 + static_cast<std::size_t>(std::countr_zero(words_[k]));
    return words_.size() * 64;
  }
  std::size_t next(std::size_t i) const {
    ++i;
    std::size_t k = i / 64;
    if (k >= words_.size()) return words_.size() * 64;
    std::uint64_t w = words_[k] & (~std::uint64_t{0} << (i % 64));
    while (true) {
      if (w != 0) return k * 64 + static_cast<std::size_t>(std::countr_zero(w));
      if (++k >= words_.size()) return words_.size() * 64;
      w = words_[k];
    }
  }
  Bitset without(const Bitset& other) const {
    Bitset out = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) out.words_[k] &= ~other.words_[k];
    return out;
  }
  // True iff every bit of this set is also in other.
  bool subset_of(const Bitset& other) const {
    for (std::size_t k = 0; k < words_.size(); ++k)
      if (words_[k] & ~other.words_[k]) return false;
    return true;
  }

 private:
  std::vector<std::uint64_t> words_;
};

class Search {
 public:
  Search(const std::vector<double>& w, std::vector<Bitset> closed_nbr, std::vector<Bitset> nbr)
      : w_(w), closed_(std::move(closed_nbr)), nbr_(std::move(nbr)) {}

  void run(const Bitset& candidates) {
    std::vector<int> chosen;
    expand(candidates, 0.0, chosen);
  }

  double best_weight() const { return best_; }
  const std::vector<int>& best_set() const { return best_set_; }

 private:
  // Greedy clique cover: each vertex joins the first clique it is fully
  // adjacent to; the bound is the sum of clique maxima.
  double clique_cover_bound(const Bitset& p) const {
    std::vector<Bitset> cliques;
    std::vector<double> top;
    for (std::size_t v = p.first(); v < w_.size(); v = p.next(v)) {
      bool placed = false;
      for (std::size_t c = 0; c < cliques.size(); ++c) {
        if (cliques[c].subset_of(nbr_[v])) {
          cliques[c].set(v);
          top[c] = std::max(top[c], w_[v]);
          placed = true;
          break;
        }
      }
      if (!placed) {
        Bitset b(w_.size());
        b.set(v);
        cliques.push_back(std::move(b));
        top.push_back(w_[v]);
      }
    }
    double sum = 0.0;
    for (double t : top) sum += t;
    return sum;
  }

  void expand(const Bitset& p, double weight, std::vector<int>& chosen) {
    const std::size_t v = p.first();
    if (v >= w_.size()) {
      if (weight > best_) {
        best_ = weight;
        best_set_ = chosen;
      }
      return;
    }
    if (weight + clique_cover_bound(p) <= best_) return;

    chosen.push_back(static_cast<int>(v));
    expand(p.without(closed_[v]), weight + w_[v], chosen);
    chosen.pop_back();

    Bitset rest = p;
    rest.reset(v);
    expand(rest, weight, chosen);
  }

  const std::vector<double>& w_;
  std::vector<Bitset> closed_;
  std::vector<Bitset> nbr_;
  double best_ = 0.0;
  std::vector<int> best_set_;
};

}  // namespace

IndependentSet mwis_exact(const std::vector<double>& vertex_weights,
                          const std::vector<std::pair<int, int>>& edges, int vertex_limit) {
  const std::size_t n = vertex_weights.size();
  if (static_cast<long long>(n) > vertex_limit)
    throw SizeError("ilpcore", "independent set instance has " + std::to_string(n) +
                                   " vertices, limit is " + std::to_string(vertex_limit));
  std::vector<Bitset> nbr(n, Bitset(n));
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
      throw StructuralError("ilpcore", "edge references unknown vertex");
    if (a == b) continue;
    nbr[static_cast<std::size_t>(a)].set(static_cast<std::size_t>(b));
    nbr[static_cast<std::size_t>(b)].set(static_cast<std::size_t>(a));
  }
  std::vector<Bitset> closed = nbr;
  Bitset candidates(n);
  for (std::size_t v = 0; v < n; ++v) {
    closed[v].set(v);
    if (vertex_weights[v] > 0.0) candidates.set(v);
  }

  Search search(vertex_weights, std::move(closed), std::move(nbr));
  search.run(candidates);
  IndependentSet out;
  out.vertices = search.best_set();
  out.total = search.best_weight();
  return out;
}

}  // namespace qsched::ilp
