#include "radwalk/combinatorics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "radwalk/errors.hpp"
#include "radwalk/kron_algebra.hpp"

namespace radwalk {

unsigned Composition::weight() const noexcept {
  return std::accumulate(parts.begin(), parts.end(), 0u);
}

bool Composition::strict() const noexcept {
  return std::ranges::all_of(parts, [](unsigned p) { return p >= 1; });
}

namespace {

void compose_rec(unsigned remaining, unsigned slots, unsigned min_part, std::vector<unsigned>& cur,
                 std::vector<Composition>& out) {
  if (slots == 1) {
    if (remaining >= min_part) {
      cur.push_back(remaining);
      out.push_back(Composition{cur});
      cur.pop_back();
    }
    return;
  }
  // leave at least min_part for each of the remaining slots
  const unsigned reserve = min_part * (slots - 1);
  if (remaining < reserve) return;
  for (unsigned first = min_part; first + reserve <= remaining; ++first) {
    cur.push_back(first);
    compose_rec(remaining - first, slots - 1, min_part, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::vector<Composition> compositions(unsigned k, unsigned u, bool allow_zero) {
  std::vector<Composition> out;
  if (u == 0) return out;
  std::vector<unsigned> cur;
  compose_rec(k, u, allow_zero ? 0u : 1u, cur, out);
  return out;
}

std::uint64_t binomial(unsigned n, unsigned k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::uint64_t multinomial(const Composition& lambda) {
  std::uint64_t r = 1;
  unsigned total = 0;
  for (unsigned part : lambda.parts) {
    total += part;
    r *= binomial(total, part);
  }
  return r;
}

std::vector<std::size_t> MultisetPermutation::positions(unsigned symbol) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < word.size(); ++i)
    if (word[i] == symbol) out.push_back(i);
  return out;
}

MultisetPermutations::MultisetPermutations(Composition lambda) : lambda_(std::move(lambda)) {}

MultisetPermutations::iterator MultisetPermutations::begin() const {
  MultisetPermutation first{{}, lambda_};
  for (std::size_t i = 0; i < lambda_.parts.size(); ++i)
    first.word.insert(first.word.end(), lambda_.parts[i], static_cast<unsigned>(i + 1));
  return iterator(std::move(first));
}

MultisetPermutations::iterator& MultisetPermutations::iterator::operator++() {
  if (current_ && !std::next_permutation(current_->word.begin(), current_->word.end())) {
    current_.reset();
  }
  return *this;
}

OrderedTuples::OrderedTuples(unsigned n, unsigned u) : n_(n), u_(u) {
  if (u > n) {
    throw BadArity("ordered_tuples: u=" + std::to_string(u) + " exceeds n=" + std::to_string(n));
  }
}

OrderedTuples::iterator OrderedTuples::begin() const {
  std::vector<unsigned> first(u_);
  std::iota(first.begin(), first.end(), 1u);
  return iterator(n_, std::move(first));
}

OrderedTuples::iterator& OrderedTuples::iterator::operator++() {
  if (done_) return *this;
  const std::size_t u = tuple_.size();
  std::size_t i = u;
  // rightmost slot that can still be incremented
  while (i > 0 && tuple_[i - 1] == n_ - (u - i)) --i;
  if (i == 0) {
    done_ = true;
    tuple_.clear();
    return *this;
  }
  ++tuple_[i - 1];
  for (std::size_t j = i; j < u; ++j) tuple_[j] = tuple_[j - 1] + 1;
  return *this;
}

Mat apply_perm_kron(const MultisetPermutation& pi, std::span<const Mat> ms) {
  if (pi.word.empty()) throw BadArity("apply_perm_kron: empty word");
  for (unsigned s : pi.word) {
    if (s < 1 || s > ms.size()) {
      throw BadArity("apply_perm_kron: symbol " + std::to_string(s) + " outside 1.." +
                     std::to_string(ms.size()));
    }
  }
  Mat out = ms[pi.word[0] - 1];
  for (std::size_t i = 1; i < pi.word.size(); ++i) out = kron(out, ms[pi.word[i] - 1]);
  return out;
}

Mat kron_multinomial_expand(std::span<const Mat> xs, unsigned k) {
  if (xs.empty()) throw BadArity("kron_multinomial_expand: no summands");
  if (k == 0) throw BadArity("kron_multinomial_expand: k must be positive");
  const auto n = static_cast<unsigned>(xs.size());
  std::size_t rows = 1, cols = 1;
  for (unsigned i = 0; i < k; ++i) {
    rows *= xs[0].rows();
    cols *= xs[0].cols();
  }
  if (rows * cols > kron_entry_cap()) throw Overflow("kron_multinomial_expand: result exceeds entry cap");

  Mat total(rows, cols);
  std::vector<Mat> chosen;
  for (unsigned u = 1; u <= std::min(k, n); ++u) {
    for (const Composition& lambda : compositions(k, u, false)) {
      for (const auto& mu : ordered_tuples(n, u)) {
        chosen.clear();
        for (unsigned idx : mu) chosen.push_back(xs[idx - 1]);
        for (const MultisetPermutation& pi : multiset_perms(lambda)) {
          total += apply_perm_kron(pi, chosen);
        }
      }
    }
  }
  return total;
}

std::uint64_t kron_multinomial_term_count(unsigned n, unsigned k) {
  std::uint64_t total = 0;
  for (unsigned u = 1; u <= std::min(k, n); ++u) {
    std::uint64_t per_mu = 0;
    for (const Composition& lambda : compositions(k, u, false)) per_mu += multinomial(lambda);
    total += binomial(n, u) * per_mu;
  }
  return total;
}

PairPartitionAssignment pair_blocks(const MultisetPermutation& pi) {
  const std::size_t u = pi.lambda.parts.size();
  if (!std::ranges::all_of(pi.lambda.parts, [](unsigned p) { return p == 2; })) {
    throw BadArity("pair_blocks: lambda must be (2,...,2)");
  }
  PairPartitionAssignment blocks(u, {SIZE_MAX, SIZE_MAX});
  for (std::size_t pos = 0; pos < pi.word.size(); ++pos) {
    auto& b = blocks[pi.word[pos] - 1];
    (b.first == SIZE_MAX ? b.first : b.second) = pos;
  }
  return blocks;
}

std::vector<PairPartitionAssignment> pair_partitions(unsigned k) {
  if (k % 2 != 0) throw BadArity("pair_partitions: k must be even");
  if (k == 0) return {PairPartitionAssignment{}};
  const unsigned u = k / 2;
  std::set<PairPartitionAssignment> seen;
  std::vector<PairPartitionAssignment> out;
  for (const MultisetPermutation& pi : multiset_perms(Composition{std::vector<unsigned>(u, 2)})) {
    PairPartitionAssignment blocks = pair_blocks(pi);
    std::ranges::sort(blocks);
    if (seen.insert(blocks).second) out.push_back(std::move(blocks));
  }
  return out;
}

}  // namespace radwalk
