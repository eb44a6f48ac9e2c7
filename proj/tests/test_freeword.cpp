#include <doctest.h>

#include <algorithm>
#include <set>

#include "libredense/freeword.hpp"
#include "libredense/rng.hpp"

using namespace libredense;

namespace {

  // Every letter sequence of the given length, reduced or not.
  std::vector<std::vector<Letter>> all_sequences(std::uint32_t rank, std::size_t length) {
    std::vector<std::vector<Letter>> out{{}};
    for (std::size_t i = 0; i < length; ++i) {
      std::vector<std::vector<Letter>> next;
      for (auto const& s : out) {
        for (std::uint32_t k = 0; k < 2 * rank; ++k) {
          auto t = s;
          t.push_back(Letter::from_key(k));
          next.push_back(t);
        }
      }
      out = std::move(next);
    }
    return out;
  }

  bool is_reduced(std::vector<Letter> const& s) {
    for (std::size_t i = 1; i < s.size(); ++i) {
      if (s[i - 1].cancels(s[i])) {
        return false;
      }
    }
    return true;
  }

  Word random_word(std::uint32_t rank, std::size_t max_len, Rng& rng) {
    std::vector<Letter> raw(rng.below(max_len + 1));
    for (auto& l : raw) {
      l = Letter::from_key(static_cast<std::uint32_t>(rng.below(2 * rank)));
    }
    return reduce(raw, rank);
  }

  // Least word among rotations of w and w^-1, computed naively.
  Word class_min(Word const& w) {
    Word best = w;
    for (Word const& v : {w, invert(w)}) {
      std::vector<Letter> s(v.begin(), v.end());
      for (std::size_t r = 0; r < s.size(); ++r) {
        std::rotate(s.begin(), s.begin() + 1, s.end());
        Word const c = reduce(s, w.rank());
        if (c < best) {
          best = c;
        }
      }
    }
    return best;
  }

}  // namespace

TEST_CASE("letters order positive before inverse") {
  Letter const a  = Letter::make(0, 1);
  Letter const ai = Letter::make(0, -1);
  Letter const b  = Letter::make(1, 1);
  CHECK(a < ai);
  CHECK(ai < b);
  CHECK(a.cancels(ai));
  CHECK_FALSE(a.cancels(b));
  CHECK(ai.inverse() == a);
  CHECK_THROWS_AS(Letter::make(0, 2), InvalidArgument);
}

TEST_CASE("reduce and text round trip") {
  Word const w = parse_word("1 2 -2 -1 2", 2);
  CHECK(to_string(w) == "2");
  CHECK(to_string(Word::identity(3)) == "e");
  CHECK(parse_word("e", 2).empty());
  CHECK(parse_word("3 -1").rank() == 3);
  CHECK_THROWS_AS(parse_word("1 x", 2), ParseError);
  CHECK_THROWS_AS(parse_word("0", 2), ParseError);
  CHECK_THROWS_AS(parse_word("3", 2), IndexOutOfRange);
  auto const list = parse_word_list("1 2, -2, e");
  REQUIRE(list.size() == 3);
  CHECK(list[1].rank() == 2);
  CHECK(to_string(std::span<Word const>(list)) == "1 2, -2, e");
}

TEST_CASE("group laws on random words") {
  Rng rng(7);
  for (int t = 0; t < 300; ++t) {
    Word const a = random_word(3, 8, rng);
    Word const b = random_word(3, 8, rng);
    Word const c = random_word(3, 8, rng);
    CHECK((a * b) * c == a * (b * c));
    CHECK((a * invert(a)).empty());
    CHECK(invert(a * b) == invert(b) * invert(a));
    CHECK(power(a, 3) == a * a * a);
    CHECK(power(a, -2) == invert(a) * invert(a));
    CHECK(power(a, 0).empty());
  }
}

TEST_CASE("count of reduced words matches brute force") {
  for (std::uint32_t rank = 1; rank <= 3; ++rank) {
    for (std::size_t len = 0; len <= 4; ++len) {
      std::uint64_t n = 0;
      for (auto const& s : all_sequences(rank, len)) {
        n += is_reduced(s) ? 1 : 0;
      }
      CHECK(count_reduced_words(rank, len) == n);
    }
  }
}

TEST_CASE("all_reduced enumeration is strictly increasing and indexed") {
  auto const words = enumerate_words(2, 5, EnumerationMode::all_reduced);
  std::uint64_t expected = 0;
  for (std::size_t len = 0; len <= 5; ++len) {
    expected += count_reduced_words(2, len);
  }
  REQUIRE(words.size() == expected);
  CHECK(words.front().empty());
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) {
      CHECK(words[i - 1] < words[i]);
    }
    CHECK(word_index(words[i]) == i + 1);
    CHECK(word_at(2, i + 1) == words[i]);
  }
}

TEST_CASE("cyclic classes are the naive class minima") {
  for (std::uint32_t rank = 1; rank <= 3; ++rank) {
    std::set<std::string> naive;
    naive.insert("e");
    for (Word const& w : enumerate_words(rank, 5, EnumerationMode::all_reduced)) {
      if (!w.empty() && is_cyclically_reduced(w)) {
        naive.insert(to_string(class_min(w)));
      }
    }
    std::set<std::string> got;
    for (Word const& w : enumerate_words(rank, 5, EnumerationMode::cyclic_classes)) {
      CHECK(is_class_representative(w));
      got.insert(to_string(w));
    }
    CHECK(got == naive);
  }
}

TEST_CASE("cyclic reduction conjugates to a cyclically reduced core") {
  Rng rng(11);
  for (int t = 0; t < 300; ++t) {
    Word const w = random_word(2, 10, rng);
    auto const d = cyclic_reduce(w);
    CHECK(is_cyclically_reduced(d.core));
    CHECK(d.conjugator * d.core * invert(d.conjugator) == w);
  }
}

TEST_CASE("primitive roots") {
  Word const r = parse_word("1 2 -1", 2);
  auto const p = primitive_root(power(r, 4));
  CHECK(p.exponent == 4);
  CHECK(power(p.root, 4) == power(r, 4));
  CHECK_THROWS_AS(primitive_root(Word::identity(2)), InvalidArgument);

  Rng rng(3);
  for (int t = 0; t < 300; ++t) {
    Word const w = random_word(2, 7, rng);
    if (w.empty()) {
      continue;
    }
    auto const q = primitive_root(w);
    CHECK(power(q.root, static_cast<std::int64_t>(q.exponent)) == w);
    CHECK(primitive_root(q.root).exponent == 1);
  }
}

TEST_CASE("commute agrees with direct multiplication") {
  auto const words = enumerate_words(2, 3, EnumerationMode::all_reduced);
  for (Word const& a : words) {
    for (Word const& b : words) {
      CHECK(commute(a, b) == (a * b == b * a));
    }
  }
  CHECK(commute(parse_word("1 2 1 2", 2), parse_word("-2 -1", 2)));
}

TEST_CASE("f2 embedding and substitution") {
  CHECK(to_string(f2_embed(2)) == "-1 -1 2 1 1");
  std::vector<Word> images{parse_word("1 2", 3), parse_word("3", 3)};
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    Word const u = random_word(2, 6, rng);
    Word const v = random_word(2, 6, rng);
    CHECK(substitute(u * v, images) == substitute(u, images) * substitute(v, images));
  }
  CHECK(to_string(substitute(parse_word("1 -2", 2), images)) == "1 2 -3");
}

TEST_CASE("combine_product_relation") {
  Word const g = parse_word("1 1", 2);
  Word const h = parse_word("2 2 2", 2);
  Word const c = combine_product_relation(g, h);
  CHECK_FALSE(c.empty());
  // rank one inputs use a common power
  Word const r = combine_product_relation(parse_word("1 1", 1), parse_word("1 1 1", 1));
  CHECK(r == power(Word::generator(0, 1), 6));
  // commuting inputs in rank two still give a nontrivial word
  Word const s = combine_product_relation(parse_word("1 2", 2), parse_word("1 2 1 2", 2));
  CHECK_FALSE(s.empty());
}

TEST_CASE("extend_with_fresh appends unused generators") {
  std::vector<Word> words{parse_word("1 3", 4)};
  auto const out = extend_with_fresh(words, 4);
  REQUIRE(out.size() == 3);
  CHECK(to_string(out[1]) == "2");
  CHECK(to_string(out[2]) == "4");
  CHECK(extend_with_fresh(words, 4, 2).size() == 2);
  CHECK_THROWS_AS(extend_with_fresh(words, 4, 4), InvalidArgument);
}
