#pragma once

// Compositions, strictly increasing index tuples, multiset permutations and
// pair partitions: the index machinery behind the Kronecker multinomial
// expansion and the Gaussian pair-partition moment formula.
//
// Symbols of a multiset permutation word are 1-based ({1..u}); positions
// are 0-based.

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "radwalk/matrix_core.hpp"

namespace radwalk {

struct Composition {
  std::vector<unsigned> parts;

  unsigned weight() const noexcept;
  std::size_t length() const noexcept { return parts.size(); }
  bool strict() const noexcept;

  friend auto operator<=>(const Composition&, const Composition&) = default;
};

/// All u-compositions of k in lexicographic order. allow_zero selects
/// C_0(k,u); otherwise every part is >= 1.
std::vector<Composition> compositions(unsigned k, unsigned u, bool allow_zero);

/// k! / (lambda_1! ... lambda_u!).
std::uint64_t multinomial(const Composition& lambda);

std::uint64_t binomial(unsigned n, unsigned k);

struct MultisetPermutation {
  std::vector<unsigned> word;  // symbols 1..u
  Composition lambda;

  std::size_t order() const noexcept { return word.size(); }
  /// 0-based positions holding `symbol`, ascending.
  std::vector<std::size_t> positions(unsigned symbol) const;
};

/// Lazy, lexicographically ordered enumeration of S(lambda). Zero parts are
/// allowed: the corresponding symbol simply never occurs.
class MultisetPermutations {
 public:
  explicit MultisetPermutations(Composition lambda);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = MultisetPermutation;
    using difference_type = std::ptrdiff_t;
    using pointer = const MultisetPermutation*;
    using reference = const MultisetPermutation&;

    iterator() = default;
    reference operator*() const { return *current_; }
    pointer operator->() const { return &*current_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) {
      return a.current_.has_value() == b.current_.has_value();
    }

   private:
    friend class MultisetPermutations;
    explicit iterator(MultisetPermutation first) : current_(std::move(first)) {}
    std::optional<MultisetPermutation> current_;
  };

  iterator begin() const;
  iterator end() const { return {}; }

  std::uint64_t count() const { return multinomial(lambda_); }

 private:
  Composition lambda_;
};

inline MultisetPermutations multiset_perms(Composition lambda) {
  return MultisetPermutations(std::move(lambda));
}

/// Lazy lexicographic enumeration of W(n,u): strictly increasing u-tuples
/// drawn from {1..n}.
class OrderedTuples {
 public:
  OrderedTuples(unsigned n, unsigned u);

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = std::vector<unsigned>;
    using difference_type = std::ptrdiff_t;
    using pointer = const std::vector<unsigned>*;
    using reference = const std::vector<unsigned>&;

    iterator() = default;
    reference operator*() const { return tuple_; }
    pointer operator->() const { return &tuple_; }
    iterator& operator++();
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_; }

   private:
    friend class OrderedTuples;
    iterator(unsigned n, std::vector<unsigned> first) : n_(n), tuple_(std::move(first)), done_(false) {}
    unsigned n_ = 0;
    std::vector<unsigned> tuple_;
    bool done_ = true;
  };

  iterator begin() const;
  iterator end() const { return {}; }
  std::uint64_t count() const { return binomial(n_, u_); }

 private:
  unsigned n_;
  unsigned u_;
};

/// Throws BadArity if u > n.
inline OrderedTuples ordered_tuples(unsigned n, unsigned u) { return OrderedTuples(n, u); }

/// m_{pi_1} (x) ... (x) m_{pi_k}.
Mat apply_perm_kron(const MultisetPermutation& pi, std::span<const Mat> ms);

/// Right-hand side of the Kronecker multinomial theorem: the quadruple sum
/// over u, lambda in C(k,u), mu in W(n,u), pi in S(lambda) of
/// pi(x_{mu_1}, ..., x_{mu_u}). Equals kron_power(sum of xs, k).
Mat kron_multinomial_expand(std::span<const Mat> xs, unsigned k);

/// Number of summands of the expansion above: sum_u binom(n,u) sum_lambda |S(lambda)|.
std::uint64_t kron_multinomial_term_count(unsigned n, unsigned k);

/// The two positions of each block of a word with lambda = (2,...,2).
using PairPartitionAssignment = std::vector<std::pair<std::size_t, std::size_t>>;
PairPartitionAssignment pair_blocks(const MultisetPermutation& pi);

/// Distinct pair partitions of {0..k-1}, obtained from S((2,...,2)) by
/// deduplicating on the induced set partition. k must be even.
std::vector<PairPartitionAssignment> pair_partitions(unsigned k);

}  // namespace radwalk
