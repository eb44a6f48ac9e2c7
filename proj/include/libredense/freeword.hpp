#pragma once

// Elements of finitely generated free groups as freely reduced words.
//
// Generators are numbered from 0; a letter is a generator index together with
// a sign. Letters are totally ordered by (index, sign) with the positive
// letter first, so x0 < x0^-1 < x1 < x1^-1 < ... This order drives every
// enumeration in the library (length first, then lexicographic), which keeps
// planted constructions and reports reproducible.
//
// Text format: whitespace separated signed 1-based integers, "1 -2 1" is
// x1 x2^-1 x1; the empty word is "e".

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "libredense/errors.hpp"

namespace libredense {

  class Letter {
   public:
    constexpr Letter() = default;

    // sign must be +1 or -1
    static Letter make(std::uint32_t index, int sign);

    static constexpr Letter from_key(std::uint32_t key) noexcept {
      Letter l;
      l.key_ = key;
      return l;
    }

    constexpr std::uint32_t index() const noexcept {
      return key_ >> 1;
    }

    constexpr int sign() const noexcept {
      return (key_ & 1U) != 0 ? -1 : 1;
    }

    // Position in the letter order: 2 * index + (sign < 0).
    constexpr std::uint32_t key() const noexcept {
      return key_;
    }

    constexpr Letter inverse() const noexcept {
      return from_key(key_ ^ 1U);
    }

    constexpr bool cancels(Letter other) const noexcept {
      return (key_ ^ 1U) == other.key_;
    }

    friend constexpr bool operator==(Letter, Letter) = default;
    friend constexpr auto operator<=>(Letter, Letter) = default;

   private:
    std::uint32_t key_ = 0;
  };

  class Word {
   public:
    using const_iterator = std::vector<Letter>::const_iterator;

    // The empty word of rank 1.
    Word() = default;

    static Word identity(std::uint32_t rank);
    static Word generator(std::uint32_t index, std::uint32_t rank);

    std::uint32_t rank() const noexcept {
      return rank_;
    }

    // L(w) in the usual notation: the number of letters of the reduced word.
    std::size_t length() const noexcept {
      return letters_.size();
    }

    bool empty() const noexcept {
      return letters_.empty();
    }

    std::span<Letter const> letters() const noexcept {
      return letters_;
    }

    Letter operator[](std::size_t i) const noexcept {
      return letters_[i];
    }

    Letter front() const {
      return letters_.front();
    }

    Letter back() const {
      return letters_.back();
    }

    const_iterator begin() const noexcept {
      return letters_.begin();
    }

    const_iterator end() const noexcept {
      return letters_.end();
    }

    std::uint64_t hash() const noexcept;

    friend bool operator==(Word const&, Word const&) = default;

    // Enumeration order: length, then lexicographic on letter keys. Only
    // meaningful between words of equal rank.
    friend bool operator<(Word const& a, Word const& b);

   private:
    friend Word reduce(std::span<Letter const>, std::uint32_t);
    friend Word concat(Word const&, Word const&);
    friend Word invert(Word const&);
    friend struct WordAccess;

    Word(std::uint32_t rank, std::vector<Letter> letters)
        : rank_(rank), letters_(std::move(letters)) {}

    std::uint32_t      rank_ = 1;
    std::vector<Letter> letters_;
  };

  // Free reduction of an arbitrary letter sequence (stack based, one pass).
  // Throws IndexOutOfRange if a letter's index is not below rank, and
  // InvalidArgument if rank is 0.
  Word reduce(std::span<Letter const> raw, std::uint32_t rank);

  Word concat(Word const& a, Word const& b);
  Word invert(Word const& w);
  Word power(Word const& w, std::int64_t exponent);

  inline Word operator*(Word const& a, Word const& b) {
    return concat(a, b);
  }

  // Same letters, larger (or equal) ambient rank.
  Word lift(Word const& w, std::uint32_t rank);

  struct CyclicDecomposition {
    Word conjugator;  // u
    Word core;        // c, cyclically reduced, w = u c u^-1
  };

  CyclicDecomposition cyclic_reduce(Word const& w);

  bool is_cyclically_reduced(Word const& w) noexcept;

  struct PrimitiveRoot {
    Word          root;
    std::uint64_t exponent = 1;
  };

  // w = root^exponent with exponent maximal. Throws InvalidArgument on the
  // empty word.
  PrimitiveRoot primitive_root(Word const& w);

  // Two elements of a free group commute iff one is trivial or they are
  // powers of a common element; decided through primitive roots.
  bool commute(Word const& a, Word const& b);

  enum class EnumerationMode {
    all_reduced,
    // One representative per orbit of cyclically reduced words under cyclic
    // rotation and inversion; the representative is the orbit's least word
    // in enumeration order. The empty word is its own class and is yielded.
    cyclic_classes
  };

  // Number of reduced words of exactly the given length: 2r(2r-1)^(len-1).
  std::uint64_t count_reduced_words(std::uint32_t rank, std::size_t length);

  // 1-based position of w in the all_reduced enumeration (the empty word is 1).
  std::uint64_t word_index(Word const& w);

  // Inverse of word_index.
  Word word_at(std::uint32_t rank, std::uint64_t index);

  // True when w is the chosen representative of its cyclic class.
  bool is_class_representative(Word const& w);

  namespace detail {
    // Depth-first visit of reduced words of exactly `length` letters in
    // lexicographic order. `visit` receives the letter buffer and returns
    // false to stop. Returns false if stopped.
    bool visit_reduced_of_length(std::uint32_t                                rank,
                                 std::size_t                                  length,
                                 std::function<bool(std::span<Letter const>)> const& visit);
  }  // namespace detail

  // Streams words in enumeration order to `visit` until it returns false.
  void for_each_word(std::uint32_t                         rank,
                     std::size_t                           max_length,
                     EnumerationMode                       mode,
                     std::function<bool(Word const&)> const& visit);

  std::vector<Word> enumerate_words(std::uint32_t   rank,
                                    std::size_t     max_length,
                                    EnumerationMode mode);

  // h_i = a^-i b a^i over rank 2 (a = generator 0, b = generator 1).
  Word f2_embed(std::uint32_t i);

  // Substitutes images[i] for generator i (a homomorphism F_r -> F_s).
  Word substitute(Word const& w, std::span<Word const> images);

  // Given relations satisfied by the G-components and the H-components of a
  // tuple of pairs, produce one nontrivial relation satisfied by the pairs.
  // Throws SearchExhausted if the auxiliary word search (only needed when the
  // inputs commute in rank >= 2) finds nothing up to aux_search_length.
  Word combine_product_relation(Word const& relation_g,
                                Word const& relation_h,
                                std::size_t aux_search_length = 4);

  // Appends the single-letter words of the generators (below total_rank) not
  // occurring in any input word, in index order. With target_size, stops once
  // the tuple has that many entries and throws InvalidArgument if there are
  // not enough unused generators.
  std::vector<Word> extend_with_fresh(std::span<Word const>      words,
                                      std::uint32_t              total_rank,
                                      std::optional<std::size_t> target_size = {});

  std::string to_string(Word const& w);

  // Throws ParseError on malformed text and IndexOutOfRange if a generator
  // exceeds rank.
  Word parse_word(std::string_view text, std::uint32_t rank);

  // Rank inferred as the largest generator mentioned (at least 1).
  Word parse_word(std::string_view text);

  // Comma separated words; all share the given rank, or the largest generator
  // mentioned anywhere when rank is 0.
  std::vector<Word> parse_word_list(std::string_view text, std::uint32_t rank = 0);

  std::string to_string(std::span<Word const> words);

  // Words as elements of the free group, for the generic oracle.
  struct WordCarrier {
    using element_type = Word;

    std::uint32_t rank = 1;

    Word identity() const {
      return Word::identity(rank);
    }
    Word compose(Word const& a, Word const& b) const {
      return concat(a, b);
    }
    Word invert(Word const& a) const {
      return libredense::invert(a);
    }
    bool equal(Word const& a, Word const& b) const {
      return a == b;
    }
    std::uint64_t hash(Word const& a) const {
      return a.hash();
    }
  };

  struct WordHash {
    std::size_t operator()(Word const& w) const noexcept {
      return static_cast<std::size_t>(w.hash());
    }
  };

}  // namespace libredense
