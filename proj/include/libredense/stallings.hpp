#pragma once

// Folded subgroup graphs (Stallings graphs) of finitely generated subgroups
// of free groups. Deciding whether a tuple of words is a free basis of the
// subgroup it generates is exact here: the folded core graph of <w1..wn> has
// E - V + 1 equal to the rank of the subgroup, and n generators of a rank-n
// free group form a basis.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "libredense/freeword.hpp"

namespace libredense {

  class SubgroupGraph {
   public:
    static constexpr std::int32_t none = -1;

    std::uint32_t rank() const noexcept {
      return rank_;
    }

    std::size_t vertex_count() const noexcept {
      return next_.size() / (2 * rank_);
    }

    std::size_t edge_count() const noexcept;

    // Vertex 0 is the base vertex.
    static constexpr std::size_t base() noexcept {
      return 0;
    }

    // Target of the edge leaving v labelled by `letter` (an inverse letter
    // follows a positively labelled edge backwards), or none.
    std::int32_t follow(std::size_t v, Letter letter) const noexcept {
      return next_[v * 2 * rank_ + letter.key()];
    }

    // Adjacency in canonical vertex numbering; equal tables mean isomorphic
    // based graphs.
    std::span<std::int32_t const> table() const noexcept {
      return next_;
    }

    friend bool operator==(SubgroupGraph const&, SubgroupGraph const&) = default;

   private:
    friend class GraphBuilder;

    std::uint32_t             rank_ = 1;
    std::vector<std::int32_t> next_;
  };

  // Order in which pending identifications are processed while folding. The
  // default is first-in first-out; a seed shuffles the attachment order of
  // the words and picks pending merges at random.
  struct FoldSchedule {
    std::optional<std::uint64_t> shuffle_seed;
  };

  // Wedge of loops spelling each word at the base, folded to a fixed point and
  // trimmed to its core. Throws RankMismatch if a word has a different rank.
  SubgroupGraph build_graph(std::span<Word const> words,
                            std::uint32_t         rank,
                            FoldSchedule          schedule = {});

  // E - V + 1
  std::size_t graph_rank(SubgroupGraph const& g);

  // True iff w spells a closed path at the base vertex, i.e. w lies in the
  // subgroup.
  bool contains(SubgroupGraph const& g, Word const& w);

  // False on any trivial or repeated word; otherwise compares graph_rank with
  // the number of words.
  bool is_free_basis(std::span<Word const> words, std::uint32_t rank);

  inline bool is_free_basis(std::span<Word const> words) {
    return words.empty() ? true : is_free_basis(words, words.front().rank());
  }

}  // namespace libredense
