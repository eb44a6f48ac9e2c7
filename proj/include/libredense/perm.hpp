#pragma once

// Permutations and the function topology on Sym(Z+).
//
// Composition convention, used everywhere in the library:
//
//     compose(f, g) = f o g,   (f o g)(x) = f(g(x)).
//
// Words are evaluated left to right under this convention, so the word
// x1 x2 evaluates to compose(f1, f2). Points are 1-based in every public
// interface and text format.

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "libredense/errors.hpp"
#include "libredense/rng.hpp"

namespace libredense {

  // A permutation of {1..m}.
  class FinPerm {
   public:
    FinPerm() : FinPerm(1) {}

    // identity of degree m
    explicit FinPerm(std::uint32_t degree);

    // One-line 1-based images; throws InvalidArgument unless a bijection.
    static FinPerm from_images(std::vector<std::uint32_t> images);

    static FinPerm from_cycles(std::uint32_t                              degree,
                               std::vector<std::vector<std::uint32_t>> const& cycles);

    std::uint32_t degree() const noexcept {
      return static_cast<std::uint32_t>(images_.size());
    }

    // f(p) for 1 <= p <= degree
    std::uint32_t operator()(std::uint32_t p) const noexcept {
      return images_[p - 1] + 1;
    }

    // 0-based image table
    std::span<std::uint32_t const> zero_based() const noexcept {
      return images_;
    }

    bool is_identity() const noexcept;

    std::uint64_t hash() const noexcept;

    // Copy acting on {1..degree} with the extra points fixed.
    FinPerm extended(std::uint32_t degree) const;

    friend bool operator==(FinPerm const&, FinPerm const&) = default;
    friend bool operator<(FinPerm const& a, FinPerm const& b) {
      return a.images_ < b.images_;
    }

   private:
    friend FinPerm compose(FinPerm const&, FinPerm const&);
    friend FinPerm invert(FinPerm const&);

    std::vector<std::uint32_t> images_;  // 0-based
  };

  // Throws DegreeMismatch on differing degrees.
  FinPerm compose(FinPerm const& f, FinPerm const& g);
  FinPerm invert(FinPerm const& f);

  // Position of f in the lexicographic order of one-line notations of S_m,
  // 0-based, and its inverse.
  std::uint64_t lex_rank(FinPerm const& f);
  FinPerm       lex_unrank(std::uint32_t degree, std::uint64_t rank);
  std::uint64_t factorial(std::uint32_t n);

  FinPerm random_fin_perm(std::uint32_t degree, Rng& rng);

  std::string to_string(FinPerm const& f);                // "2 1 3"
  FinPerm     parse_fin_perm(std::string_view text);       // one-line
  std::string to_cycle_string(FinPerm const& f);          // "(1 2)"

  // A finitely supported permutation of the positive integers. Fixed points
  // are never stored, so equality is structural.
  class SuppPerm {
   public:
    using map_type = std::map<std::uint64_t, std::uint64_t>;

    SuppPerm() = default;

    // Throws InvalidArgument unless the pairs describe a permutation of their
    // points (points equal images as sets). Fixed pairs are dropped.
    static SuppPerm from_pairs(std::vector<std::pair<std::uint64_t, std::uint64_t>> const& pairs);

    static SuppPerm from_cycles(std::vector<std::vector<std::uint64_t>> const& cycles);

    static SuppPerm from_fin_perm(FinPerm const& f, std::uint64_t offset = 0);

    std::uint64_t operator()(std::uint64_t p) const noexcept {
      auto it = map_.find(p);
      return it == map_.end() ? p : it->second;
    }

    map_type const& support_map() const noexcept {
      return map_;
    }

    bool is_identity() const noexcept {
      return map_.empty();
    }

    std::uint64_t max_point() const noexcept {
      return map_.empty() ? 0 : map_.rbegin()->first;
    }

    std::uint64_t hash() const noexcept;

    // Restriction to {1..degree}; throws InvalidArgument if the support leaves
    // that range.
    FinPerm to_fin_perm(std::uint32_t degree) const;

    friend bool operator==(SuppPerm const&, SuppPerm const&) = default;

   private:
    friend SuppPerm compose(SuppPerm const&, SuppPerm const&);
    friend SuppPerm invert(SuppPerm const&);

    map_type map_;
  };

  SuppPerm compose(SuppPerm const& f, SuppPerm const& g);
  SuppPerm invert(SuppPerm const& f);

  std::string to_string(SuppPerm const& f);  // "(1 2)(3 4 5)", identity "()"
  SuppPerm    parse_supp_perm(std::string_view text);

  // Comma separated list of cycle-notation permutations: "(1 2),(1 3)".
  std::vector<SuppPerm> parse_supp_perm_list(std::string_view text);

  // Finite intersection of subbasic sets {f : f(alpha) = beta}.
  class OpenBox {
   public:
    OpenBox() = default;

    // Throws InvalidArgument unless the constraints are injective in both
    // coordinates and use positive points.
    explicit OpenBox(std::vector<std::pair<std::uint64_t, std::uint64_t>> constraints);

    std::map<std::uint64_t, std::uint64_t> const& constraints() const noexcept {
      return forward_;
    }

    bool empty() const noexcept {
      return forward_.empty();
    }

   private:
    std::map<std::uint64_t, std::uint64_t> forward_;
  };

  bool box_member(SuppPerm const& f, OpenBox const& box);

  struct CompletionPolicy {
    enum class Kind { minimal_support, random };

    Kind kind = Kind::minimal_support;
    // random: uniform over permutations of {1..support_bound} satisfying the
    // box; the bound is raised to the largest constrained point if smaller.
    std::uint64_t seed          = 0;
    std::uint64_t support_bound = 0;

    static CompletionPolicy minimal() {
      return {};
    }
    static CompletionPolicy random(std::uint64_t seed, std::uint64_t support_bound) {
      return {Kind::random, seed, support_bound};
    }
  };

  // Every box is completable. Minimal support closes each maximal constraint
  // chain a1 -> a2 -> ... -> ak into a cycle by sending ak to a1.
  SuppPerm complete_box(OpenBox const& box, CompletionPolicy const& policy = {});

  // Uniform random permutation of {1..support_bound} meeting the box.
  SuppPerm complete_box_random(OpenBox const& box, std::uint64_t support_bound, Rng& rng);

  // d(f, g) as 2^-exponent; zero when f = g.
  struct Dyadic {
    bool          zero     = true;
    std::uint64_t exponent = 0;

    double value() const;

    friend bool operator==(Dyadic const&, Dyadic const&) = default;
  };

  bool operator<(Dyadic const& a, Dyadic const& b);
  bool operator<=(Dyadic const& a, Dyadic const& b);

  // Exact comparison a <= b + c, for the triangle inequality.
  bool dyadic_le_sum(Dyadic const& a, Dyadic const& b, Dyadic const& c);

  // 0 if f = g, else 2^-n with n least such that f(n) != g(n) or
  // f^-1(n) != g^-1(n).
  Dyadic metric_d(SuppPerm const& f, SuppPerm const& g);

  struct FinPermCarrier {
    using element_type = FinPerm;

    std::uint32_t degree = 1;

    FinPerm identity() const {
      return FinPerm(degree);
    }
    FinPerm compose(FinPerm const& a, FinPerm const& b) const {
      return libredense::compose(a, b);
    }
    FinPerm invert(FinPerm const& a) const {
      return libredense::invert(a);
    }
    bool equal(FinPerm const& a, FinPerm const& b) const {
      return a == b;
    }
    std::uint64_t hash(FinPerm const& a) const {
      return a.hash();
    }
  };

  struct SuppPermCarrier {
    using element_type = SuppPerm;

    SuppPerm identity() const {
      return {};
    }
    SuppPerm compose(SuppPerm const& a, SuppPerm const& b) const {
      return libredense::compose(a, b);
    }
    SuppPerm invert(SuppPerm const& a) const {
      return libredense::invert(a);
    }
    bool equal(SuppPerm const& a, SuppPerm const& b) const {
      return a == b;
    }
    std::uint64_t hash(SuppPerm const& a) const {
      return a.hash();
    }
  };

}  // namespace libredense
