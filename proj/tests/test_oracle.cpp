#include <doctest.h>

#include <numeric>

#include "libredense/freeword.hpp"
#include "libredense/oracle.hpp"
#include "libredense/perm.hpp"

using namespace libredense;

namespace {

  // First relation by brute force over every reduced word of length <= L,
  // evaluated letter by letter from the identity.
  std::optional<Word> brute_relation(std::vector<FinPerm> const& tuple, std::size_t bound) {
    auto const          rank   = static_cast<std::uint32_t>(tuple.size());
    std::uint32_t const degree = tuple.front().degree();
    std::optional<Word> found;
    for_each_word(rank, bound, EnumerationMode::all_reduced, [&](Word const& w) {
      if (w.empty()) {
        return true;
      }
      FinPerm v(degree);
      for (Letter l : w) {
        FinPerm const& g = tuple[l.index()];
        v                = compose(v, l.sign() > 0 ? g : invert(g));
      }
      if (v.is_identity()) {
        found = w;
        return false;
      }
      return true;
    });
    return found;
  }

}  // namespace

TEST_CASE("words evaluate left to right") {
  std::vector<FinPerm> const t{parse_fin_perm("2 3 1"), parse_fin_perm("2 1 3")};
  FinPermCarrier const       c{3};
  CHECK(evaluate_word(parse_word("1 2", 2), t, c) == compose(t[0], t[1]));
  CHECK(evaluate_word(parse_word("-1", 2), t, c) == invert(t[0]));
  CHECK(evaluate_word(Word::identity(2), t, c).is_identity());
  CHECK_THROWS_AS(evaluate_word(parse_word("3", 3), t, c), InvalidArgument);
}

TEST_CASE("argument checks") {
  FinPermCarrier const c{3};
  CHECK_THROWS_AS(l_free_check(std::vector<FinPerm>{}, 3, c), InvalidArgument);
  CHECK_THROWS_AS(l_free_check(std::vector<FinPerm>{FinPerm(3)}, 0, c), InvalidArgument);
}

TEST_CASE("naive oracle matches brute force; pruned oracle matches naive") {
  Rng rng(13);
  for (int t = 0; t < 150; ++t) {
    std::uint32_t const  degree = 3 + static_cast<std::uint32_t>(rng.below(3));
    std::vector<FinPerm> tuple{random_fin_perm(degree, rng), random_fin_perm(degree, rng)};
    FinPermCarrier const c{degree};
    auto const           naive  = l_free_naive(tuple, 5, c);
    auto const           pruned = l_free_check(tuple, 5, c);
    CHECK(naive.witness == brute_relation(tuple, 5));
    CHECK(pruned == naive);
    if (pruned.witness) {
      CHECK(evaluate_word(*pruned.witness, tuple, c).is_identity());
      CHECK(is_class_representative(*pruned.witness));
    }
  }
}

TEST_CASE("odd and even bounds") {
  // (1 2) and (1 2 3) generate S_3; shortest relation is x1^2
  std::vector<FinPerm> const tuple{parse_fin_perm("2 1 3"), parse_fin_perm("2 3 1")};
  FinPermCarrier const       c{3};
  for (std::size_t bound = 1; bound <= 7; ++bound) {
    CHECK(l_free_check(tuple, bound, c) == l_free_naive(tuple, bound, c));
  }
  CHECK(l_free_check(tuple, 1, c).free());
  CHECK(to_string(*l_free_check(tuple, 2, c).witness) == "1 1");
}

TEST_CASE("free group words are free up to any bound") {
  WordCarrier const c{2};
  auto const        basis = parse_word_list("1 2, 2 1 1", 2);
  CHECK(l_free_check(basis, 8, c).free());
  auto const dependent = parse_word_list("1 2 1 2, -2 -1", 2);
  auto const v         = l_free_check(dependent, 4, c);
  REQUIRE_FALSE(v.free());
  CHECK(evaluate_word(*v.witness, dependent, c).empty());
}

TEST_CASE("supports and verdict json") {
  SuppPermCarrier const c;
  auto const            tuple = parse_supp_perm_list("(1 2),(1 2)");
  auto const            v     = l_free_check(tuple, 3, c);
  REQUIRE_FALSE(v.free());
  CHECK(to_string(*v.witness) == "1 1");
  nlohmann::json const j = v;
  CHECK(j["free"] == false);
  CHECK(j["witness"] == "1 1");
  nlohmann::json const k = FreenessVerdict{4, std::nullopt};
  CHECK(k["witness"].is_null());
}

TEST_CASE("time limits") {
  std::vector<std::uint32_t> long_cycle(29);
  std::vector<std::uint32_t> other_cycle(23);
  std::iota(long_cycle.begin(), long_cycle.end(), 1U);
  std::iota(other_cycle.begin(), other_cycle.end(), 8U);
  std::vector<FinPerm> const tuple{FinPerm::from_cycles(30, {long_cycle}),
                                   FinPerm::from_cycles(30, {other_cycle})};
  FinPermCarrier const       c{30};
  CHECK_THROWS_AS(l_free_naive(tuple, 11, c, SearchLimits::within(std::chrono::milliseconds(0))),
                  SearchTimeout);
}
