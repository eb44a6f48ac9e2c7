#pragma once

// Free groups under the profinite topology, with basic open sets given by
// explicit homomorphisms into finite symmetric groups.
//
// A FiniteQuotient q : F_n -> S_m is fixed by the images of the generators.
// Its cosets {w : q(w) = t} are the basic open sets; kernels are the basic
// neighbourhoods of 1. The constructions here produce free tuples inside
// prescribed cosets.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "libredense/freeword.hpp"
#include "libredense/perm.hpp"
#include "libredense/rng.hpp"

namespace libredense {

  class FiniteQuotient {
   public:
    // Throws InvalidArgument on rank 0 or images of the wrong degree.
    FiniteQuotient(std::uint32_t rank, std::uint32_t degree, std::vector<FinPerm> images);

    // Every generator maps to the identity of S_1.
    static FiniteQuotient trivial(std::uint32_t rank);

    std::uint32_t rank() const noexcept {
      return rank_;
    }

    std::uint32_t degree() const noexcept {
      return degree_;
    }

    std::span<FinPerm const> images() const noexcept {
      return images_;
    }

    // Same images on the first generators, identity on the new ones.
    FiniteQuotient lifted(std::uint32_t rank) const;

    friend bool operator==(FiniteQuotient const&, FiniteQuotient const&) = default;

   private:
    std::uint32_t        rank_;
    std::uint32_t        degree_;
    std::vector<FinPerm> images_;
  };

  // q(w). A word may have any declared rank but must only use generators
  // below q.rank(); otherwise throws RankMismatch.
  FinPerm quotient_apply(FiniteQuotient const& q, Word const& w);

  // "rank n degree m" on the first line, then n one-line image lists.
  FiniteQuotient parse_quotient(std::string_view text);
  FiniteQuotient load_quotient(std::string const& path);
  std::string    to_text(FiniteQuotient const& q);

  class CosetNeighborhood {
   public:
    // Finds the shortest word (first in enumeration order) mapping to the
    // target by breadth-first search over the image group, with words up to
    // 2 * degree^2 letters. Throws EmptyNeighborhood if the target is not in
    // the image, SearchExhausted if the bound or a size cap is hit first,
    // and DegreeMismatch on a target of the wrong degree.
    CosetNeighborhood(FiniteQuotient quotient, FinPerm target);

    // The kernel of q.
    static CosetNeighborhood kernel(FiniteQuotient quotient);

    // The coset of q containing w.
    static CosetNeighborhood around(FiniteQuotient quotient, Word const& w);

    FiniteQuotient const& quotient() const noexcept {
      return quotient_;
    }

    FinPerm const& target() const noexcept {
      return target_;
    }

    // Shortest member, first in enumeration order.
    Word const& representative() const noexcept {
      return representative_;
    }

    bool contains(Word const& w) const;

   private:
    FiniteQuotient quotient_;
    FinPerm        target_;
    Word           representative_;
  };

  // The product quotient into S_(m1 + ... + mk) acting block-diagonally; its
  // kernel is the intersection of the kernels. Throws InvalidArgument on an
  // empty list and RankMismatch on differing ranks.
  FiniteQuotient intersect_neighborhoods(std::span<CosetNeighborhood const> neighborhoods);

  // Image under intersect_neighborhoods of any word lying in every
  // neighbourhood at once: the block-diagonal sum of the targets.
  FinPerm intersected_target(std::span<CosetNeighborhood const> neighborhoods);

  // First nontrivial word of q's kernel in enumeration order, up to max_length.
  std::optional<Word> shortest_kernel_word(FiniteQuotient const& q, std::size_t max_length);

  // r w^k r^-1 with r, w random reduced words of length <= max_length and k
  // the order of q(w); always in the kernel, never trivial unless w is.
  Word random_kernel_word(FiniteQuotient const& q, std::size_t max_length, Rng& rng);

  // Sampled check that N^(m-j) g N^j lies in U for 0 <= j <= m, where N is
  // the kernel of the intersected quotient and g is in U: `samples` random
  // choices of kernel factors per j.
  bool check_prod_neigh(std::span<CosetNeighborhood const> neighborhoods,
                        std::span<Word const>              members,
                        std::size_t                        m,
                        std::size_t                        samples,
                        std::uint64_t                      seed);

  struct KernelPair {
    Word y;
    Word z;
  };

  // Kernel words (nontrivial, enumeration order, length <= max_length) are
  // listed as they appear; the first pair (y before z) that does not commute
  // is returned, pairs ordered by z then y. Throws InvalidArgument if rank
  // is below 2 and SearchExhausted if no pair exists within the bound.
  KernelPair find_free_pair_in_kernel(FiniteQuotient const& q, std::size_t max_length);

  struct FinCaseTarget {
    Word              g;
    CosetNeighborhood neighborhood;
  };

  struct FinCaseResult {
    std::size_t       m = 0;  // exceeds 2 L(g_i) + 2n + 2 for every i
    FiniteQuotient    quotient;
    KernelPair        pair;
    std::vector<Word> h1;  // over rank 2, a = y and b = z
    std::vector<Word> h2;
    std::vector<Word> f;
  };

  inline constexpr std::size_t default_kernel_search_length = 12;

  // f_i = z^-i y (h_i1 g_i h_i2) y z^i with the middle reduced, nonempty,
  // and meeting z^-i y and y z^i without cancellation. Every f_i lies in the
  // coset of g_i and the f_i form a free basis, which is re-verified; if the
  // first kernel pair does not verify, later pairs are tried. Throws
  // InvalidArgument if some g_i is outside its neighbourhood or the rank is
  // below 2, and SearchExhausted when the kernel or h searches run out.
  FinCaseResult fin_case_perturb(std::vector<FinCaseTarget> const& targets,
                                 std::size_t                       h_search_length,
                                 std::size_t kernel_search_length = default_kernel_search_length);

  // A tuple of total_rank words of rank total_rank whose i-th entry lies in
  // the i-th constraint and which is a free basis of the subgroup it
  // generates. Constraints are neighbourhoods in F_rank.
  std::vector<Word> density_witness_free_group(std::uint32_t                        rank,
                                               std::vector<CosetNeighborhood> const& constraints,
                                               std::uint32_t                        total_rank,
                                               std::size_t h_search_length = 8);

  // (g_1..g_n, H_1..H_k) with H_j = f2_embed(j) under a -> g_(n+1),
  // b -> g_(n+2). Throws NotFreeBasis unless the input is a free basis of
  // at least three words.
  std::vector<Word> countable_extension(std::span<Word const> free_tuple, std::uint32_t k);

}  // namespace libredense
