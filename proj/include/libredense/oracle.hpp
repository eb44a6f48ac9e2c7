#pragma once

// Bounded freeness testing in any group with a carrier.
//
// A tuple (g1..gn) is L-free when no nontrivial reduced word of length at
// most L evaluates to the identity on it. l_free_check decides this by a
// meet-in-the-middle pass (two distinct words of length <= L/2 with equal
// values give a relation of length <= L, and every relation splits that
// way), then, only if a relation exists, locates the first witness in
// enumeration order among cyclic class representatives. l_free_naive walks
// every reduced word and is kept as an independent check.

#include <algorithm>
#include <chrono>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "libredense/errors.hpp"
#include "libredense/freeword.hpp"

namespace libredense {

  template <class C>
  concept GroupCarrier = requires(C const& c, typename C::element_type const& a) {
    { c.identity() } -> std::convertible_to<typename C::element_type>;
    { c.compose(a, a) } -> std::convertible_to<typename C::element_type>;
    { c.invert(a) } -> std::convertible_to<typename C::element_type>;
    { c.equal(a, a) } -> std::convertible_to<bool>;
    { c.hash(a) } -> std::convertible_to<std::uint64_t>;
  };

  struct FreenessVerdict {
    std::size_t         bound = 1;
    std::optional<Word> witness;  // empty means FreeUpTo(bound)

    bool free() const noexcept {
      return !witness.has_value();
    }

    friend bool operator==(FreenessVerdict const&, FreenessVerdict const&) = default;
  };

  inline void to_json(nlohmann::json& j, FreenessVerdict const& v) {
    j = nlohmann::json{{"bound", v.bound}, {"free", v.free()}};
    j["witness"] = v.witness ? nlohmann::json(to_string(*v.witness)) : nlohmann::json(nullptr);
  }

  struct SearchLimits {
    std::optional<std::chrono::steady_clock::time_point> deadline;

    static SearchLimits none() {
      return {};
    }

    static SearchLimits within(std::chrono::milliseconds budget) {
      return {std::chrono::steady_clock::now() + budget};
    }

    // Throws SearchTimeout once the deadline has passed.
    void check() const {
      if (deadline && std::chrono::steady_clock::now() > *deadline) {
        throw SearchTimeout("freeness search exceeded its time budget");
      }
    }
  };

  // Substitutes tuple[i] for generator i and composes left to right.
  // Throws InvalidArgument if the tuple has no entry for some letter.
  template <GroupCarrier C>
  typename C::element_type evaluate_word(Word const&                                 w,
                                         std::span<typename C::element_type const> tuple,
                                         C const&                                    carrier) {
    using E = typename C::element_type;
    E result = carrier.identity();
    for (Letter l : w) {
      if (l.index() >= tuple.size()) {
        throw InvalidArgument("word uses generator " + std::to_string(l.index() + 1)
                              + " but the tuple has " + std::to_string(tuple.size())
                              + " entries");
      }
      E const& g = tuple[l.index()];
      result     = carrier.compose(result, l.sign() > 0 ? g : carrier.invert(g));
    }
    return result;
  }

  namespace detail {

    template <GroupCarrier C>
    std::vector<typename C::element_type> letter_images(
        std::span<typename C::element_type const> tuple, C const& carrier) {
      std::vector<typename C::element_type> out;
      out.reserve(2 * tuple.size());
      for (auto const& g : tuple) {
        out.push_back(g);
        out.push_back(carrier.invert(g));
      }
      return out;
    }

    inline void check_oracle_args(std::size_t tuple_size, std::size_t bound) {
      if (tuple_size == 0) {
        throw InvalidArgument("freeness check needs a nonempty tuple");
      }
      if (bound == 0) {
        throw InvalidArgument("freeness bound must be at least 1");
      }
    }

    // First word of exactly `length` letters, in enumeration order, that
    // evaluates to the identity. With `classes`, only cyclically reduced
    // words whose first letter is least in their orbit are visited and the
    // hit must be a class representative.
    template <GroupCarrier C>
    std::optional<Word> first_identity_of_length(
        std::vector<typename C::element_type> const& letters,
        C const&                                     carrier,
        std::size_t                                  length,
        bool                                         classes,
        SearchLimits const&                          limits) {
      using E                       = typename C::element_type;
      auto const          rank      = static_cast<std::uint32_t>(letters.size() / 2);
      std::uint32_t const alphabet  = 2 * rank;
      std::vector<Letter>        buf(length);
      std::vector<std::uint32_t> next(length, 0);
      std::vector<E>             prefix;  // prefix[d] = value of buf[0..d]
      prefix.reserve(length);
      E const       id    = carrier.identity();
      std::size_t   depth = 0;
      std::uint64_t nodes = 0;
      while (true) {
        if (next[depth] >= alphabet) {
          if (depth == 0) {
            return std::nullopt;
          }
          next[depth] = 0;
          --depth;
          prefix.pop_back();
          continue;
        }
        if ((++nodes & 0xFFFU) == 0) {
          limits.check();
        }
        Letter const c = Letter::from_key(next[depth]++);
        if (depth > 0) {
          if (c.cancels(buf[depth - 1])) {
            continue;
          }
          if (classes) {
            std::uint32_t const first = buf[0].key();
            if (c.key() < first || c.inverse().key() < first) {
              continue;
            }
          }
        }
        buf[depth] = c;
        if (depth + 1 == length) {
          if (length > 1 && c.cancels(buf[0])) {
            continue;
          }
          E const value = depth == 0 ? letters[c.key()]
                                     : carrier.compose(prefix.back(), letters[c.key()]);
          if (carrier.equal(value, id)) {
            Word w = reduce(buf, rank);
            if (!classes || is_class_representative(w)) {
              return w;
            }
          }
        } else {
          prefix.push_back(depth == 0 ? letters[c.key()]
                                      : carrier.compose(prefix.back(), letters[c.key()]));
          ++depth;
        }
      }
    }

    // Length of a shortest cyclically reduced relation certified by the
    // meet-in-the-middle pass, or nullopt if the tuple is L-free.
    template <GroupCarrier C>
    std::optional<std::size_t> relation_length_bound(
        std::vector<typename C::element_type> const& letters,
        C const&                                     carrier,
        std::size_t                                  bound,
        SearchLimits const&                          limits) {
      using E                      = typename C::element_type;
      auto const          rank     = static_cast<std::uint32_t>(letters.size() / 2);
      constexpr std::uint32_t none = UINT32_MAX;

      struct Node {
        std::uint32_t parent;
        std::uint32_t key;
      };
      std::vector<E>    values{carrier.identity()};
      std::vector<Node> nodes{{none, none}};

      auto spell = [&](std::uint32_t i) {
        std::vector<Letter> out;
        for (; nodes[i].parent != none; i = nodes[i].parent) {
          out.push_back(Letter::from_key(nodes[i].key));
        }
        std::reverse(out.begin(), out.end());
        return reduce(out, rank);
      };

      std::size_t const half  = bound / 2;
      std::size_t       begin = 0;
      std::uint64_t     total = 0;
      for (std::size_t len = 0; len <= half; ++len) {
        total += count_reduced_words(rank, len);
      }
      values.reserve(total);
      nodes.reserve(total);
      for (std::size_t len = 1; len <= half; ++len) {
        std::size_t const end = values.size();
        for (std::size_t i = begin; i < end; ++i) {
          limits.check();
          for (std::uint32_t k = 0; k < 2 * rank; ++k) {
            if (nodes[i].key != none && Letter::from_key(k).cancels(Letter::from_key(nodes[i].key))) {
              continue;
            }
            values.push_back(carrier.compose(values[i], letters[k]));
            nodes.push_back({static_cast<std::uint32_t>(i), k});
          }
        }
        begin = end;
      }

      std::vector<std::pair<std::uint64_t, std::uint32_t>> table;
      table.reserve(values.size());
      for (std::size_t i = 0; i < values.size(); ++i) {
        table.emplace_back(carrier.hash(values[i]), static_cast<std::uint32_t>(i));
      }
      std::sort(table.begin(), table.end());

      std::optional<std::size_t> best;
      auto note = [&](Word const& a, Word const& b) {
        std::size_t const len = cyclic_reduce(concat(a, invert(b))).core.length();
        if (!best || len < *best) {
          best = len;
        }
      };

      for (std::size_t i = 0; i < table.size();) {
        std::size_t j = i + 1;
        while (j < table.size() && table[j].first == table[i].first) {
          ++j;
        }
        for (std::size_t a = i; a < j; ++a) {
          for (std::size_t b = a + 1; b < j; ++b) {
            if (carrier.equal(values[table[a].second], values[table[b].second])) {
              note(spell(table[a].second), spell(table[b].second));
            }
          }
        }
        i = j;
      }

      if (bound % 2 == 1) {
        // Words one letter longer than the table, matched against it.
        std::size_t const end = values.size();
        for (std::size_t i = begin; i < end; ++i) {
          limits.check();
          for (std::uint32_t k = 0; k < 2 * rank; ++k) {
            if (nodes[i].key != none && Letter::from_key(k).cancels(Letter::from_key(nodes[i].key))) {
              continue;
            }
            E const     v = carrier.compose(values[i], letters[k]);
            auto        h = carrier.hash(v);
            auto        it = std::lower_bound(table.begin(), table.end(),
                                              std::pair<std::uint64_t, std::uint32_t>{h, 0});
            for (; it != table.end() && it->first == h; ++it) {
              if (carrier.equal(v, values[it->second])) {
                Word const          prefix = spell(static_cast<std::uint32_t>(i));
                std::vector<Letter> spelled(prefix.begin(), prefix.end());
                spelled.push_back(Letter::from_key(k));
                note(reduce(spelled, rank), spell(it->second));
              }
            }
          }
        }
      }
      return best;
    }

  }  // namespace detail

  // Returns the first witness in enumeration order among cyclic class
  // representatives of length <= bound, or FreeUpTo(bound). Throws
  // SearchTimeout when the limits expire.
  template <GroupCarrier C>
  FreenessVerdict l_free_check(std::span<typename C::element_type const> tuple,
                               std::size_t                               bound,
                               C const&                                  carrier,
                               SearchLimits const&                       limits = {}) {
    detail::check_oracle_args(tuple.size(), bound);
    auto const letters = detail::letter_images(tuple, carrier);
    auto const longest = detail::relation_length_bound(letters, carrier, bound, limits);
    if (!longest) {
      return {bound, std::nullopt};
    }
    for (std::size_t len = 1; len <= *longest; ++len) {
      if (auto w = detail::first_identity_of_length(letters, carrier, len, true, limits)) {
        return {bound, std::move(w)};
      }
    }
    throw Error("internal: certified relation of length "
                + std::to_string(*longest) + " not found by ordered search");
  }

  // Plain enumeration of every reduced word of length 1..bound.
  template <GroupCarrier C>
  FreenessVerdict l_free_naive(std::span<typename C::element_type const> tuple,
                               std::size_t                               bound,
                               C const&                                  carrier,
                               SearchLimits const&                       limits = {}) {
    detail::check_oracle_args(tuple.size(), bound);
    auto const letters = detail::letter_images(tuple, carrier);
    for (std::size_t len = 1; len <= bound; ++len) {
      if (auto w = detail::first_identity_of_length(letters, carrier, len, false, limits)) {
        return {bound, std::move(w)};
      }
    }
    return {bound, std::nullopt};
  }

  template <GroupCarrier C>
  FreenessVerdict l_free_check(std::vector<typename C::element_type> const& tuple,
                               std::size_t                                  bound,
                               C const&                                     carrier,
                               SearchLimits const&                          limits = {}) {
    return l_free_check(std::span<typename C::element_type const>(tuple), bound, carrier, limits);
  }

  template <GroupCarrier C>
  FreenessVerdict l_free_naive(std::vector<typename C::element_type> const& tuple,
                               std::size_t                                  bound,
                               C const&                                     carrier,
                               SearchLimits const&                          limits = {}) {
    return l_free_naive(std::span<typename C::element_type const>(tuple), bound, carrier, limits);
  }

  template <GroupCarrier C>
  typename C::element_type evaluate_word(Word const&                                  w,
                                         std::vector<typename C::element_type> const& tuple,
                                         C const&                                     carrier) {
    return evaluate_word(w, std::span<typename C::element_type const>(tuple), carrier);
  }

}  // namespace libredense
