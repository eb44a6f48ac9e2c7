#include "libredense/freeword.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <numeric>
#include <sstream>

#include "libredense/detail/hash.hpp"

namespace libredense {

  struct WordAccess {
    static Word make(std::uint32_t rank, std::vector<Letter> letters) {
      return Word(rank, std::move(letters));
    }
  };

  namespace {

    Word make_word(std::uint32_t rank, std::vector<Letter> letters) {
      return WordAccess::make(rank, std::move(letters));
    }

    void check_rank(Word const& a, Word const& b) {
      if (a.rank() != b.rank()) {
        throw RankMismatch("word ranks differ: " + std::to_string(a.rank())
                           + " vs " + std::to_string(b.rank()));
      }
    }

    // a <= every rotation of b (lexicographic on keys), all of equal length
    bool le_all_rotations(std::span<Letter const> a, std::span<Letter const> b) {
      std::size_t const n = a.size();
      for (std::size_t shift = 0; shift < n; ++shift) {
        for (std::size_t i = 0; i < n; ++i) {
          Letter const y = b[(shift + i) % n];
          if (a[i].key() < y.key()) {
            break;
          }
          if (a[i].key() > y.key()) {
            return false;
          }
        }
      }
      return true;
    }

    std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
      if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        throw InvalidArgument("word count overflows 64 bits");
      }
      return a * b;
    }

    std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
      if (b > std::numeric_limits<std::uint64_t>::max() - a) {
        throw InvalidArgument("word count overflows 64 bits");
      }
      return a + b;
    }

    std::uint64_t pow_u64(std::uint64_t base, std::size_t e) {
      std::uint64_t r = 1;
      for (std::size_t i = 0; i < e; ++i) {
        r = checked_mul(r, base);
      }
      return r;
    }

    bool visit_classes_of_length(
        std::uint32_t                                        rank,
        std::size_t                                          length,
        std::function<bool(std::span<Letter const>)> const& visit) {
      std::uint32_t const      alphabet = 2 * rank;
      std::vector<Letter>      buf(length);
      std::vector<std::uint32_t> next(length, 0);
      std::size_t              depth = 0;
      // Iterative DFS; next[d] is the next candidate key at depth d.
      while (true) {
        if (next[depth] >= alphabet) {
          if (depth == 0) {
            return true;
          }
          next[depth] = 0;
          --depth;
          continue;
        }
        Letter const c = Letter::from_key(next[depth]++);
        if (depth > 0) {
          if (c.cancels(buf[depth - 1])) {
            continue;
          }
          // The representative starts with the least letter of the orbit,
          // and the orbit contains the inverses of all letters.
          std::uint32_t const first = buf[0].key();
          if (c.key() < first || c.inverse().key() < first) {
            continue;
          }
        }
        buf[depth] = c;
        if (depth + 1 == length) {
          if (!c.cancels(buf[0]) || length == 1) {
            std::span<Letter const> w(buf);
            std::vector<Letter>     inv(length);
            for (std::size_t i = 0; i < length; ++i) {
              inv[i] = buf[length - 1 - i].inverse();
            }
            if (le_all_rotations(w, w) && le_all_rotations(w, inv)) {
              if (!visit(w)) {
                return false;
              }
            }
          }
        } else {
          ++depth;
        }
      }
    }

  }  // namespace

  Letter Letter::make(std::uint32_t index, int sign) {
    if (sign != 1 && sign != -1) {
      throw InvalidArgument("letter sign must be +1 or -1");
    }
    return from_key(2 * index + (sign < 0 ? 1U : 0U));
  }

  Word Word::identity(std::uint32_t rank) {
    if (rank == 0) {
      throw InvalidArgument("rank must be positive");
    }
    return make_word(rank, {});
  }

  Word Word::generator(std::uint32_t index, std::uint32_t rank) {
    if (rank == 0) {
      throw InvalidArgument("rank must be positive");
    }
    if (index >= rank) {
      throw IndexOutOfRange("generator " + std::to_string(index + 1)
                            + " exceeds rank " + std::to_string(rank));
    }
    return make_word(rank, {Letter::make(index, 1)});
  }

  std::uint64_t Word::hash() const noexcept {
    std::uint64_t h = detail::mix64(rank_);
    for (Letter l : letters_) {
      h = (h ^ l.key()) * 0x100000001B3ULL;
    }
    return detail::mix64(h ^ letters_.size());
  }

  bool operator<(Word const& a, Word const& b) {
    if (a.length() != b.length()) {
      return a.length() < b.length();
    }
    return std::lexicographical_compare(
        a.begin(), a.end(), b.begin(), b.end(), [](Letter x, Letter y) {
          return x.key() < y.key();
        });
  }

  Word reduce(std::span<Letter const> raw, std::uint32_t rank) {
    if (rank == 0) {
      throw InvalidArgument("rank must be positive");
    }
    std::vector<Letter> out;
    out.reserve(raw.size());
    for (Letter l : raw) {
      if (l.index() >= rank) {
        throw IndexOutOfRange("generator " + std::to_string(l.index() + 1)
                              + " exceeds rank " + std::to_string(rank));
      }
      if (!out.empty() && out.back().cancels(l)) {
        out.pop_back();
      } else {
        out.push_back(l);
      }
    }
    return Word(rank, std::move(out));
  }

  Word concat(Word const& a, Word const& b) {
    check_rank(a, b);
    std::size_t cancel = 0;
    std::size_t const limit = std::min(a.length(), b.length());
    while (cancel < limit
           && a.letters_[a.length() - 1 - cancel].cancels(b.letters_[cancel])) {
      ++cancel;
    }
    std::vector<Letter> out;
    out.reserve(a.length() + b.length() - 2 * cancel);
    out.insert(out.end(), a.letters_.begin(), a.letters_.end() - cancel);
    out.insert(out.end(), b.letters_.begin() + cancel, b.letters_.end());
    return Word(a.rank_, std::move(out));
  }

  Word invert(Word const& w) {
    std::vector<Letter> out(w.length());
    for (std::size_t i = 0; i < w.length(); ++i) {
      out[i] = w.letters_[w.length() - 1 - i].inverse();
    }
    return Word(w.rank_, std::move(out));
  }

  Word power(Word const& w, std::int64_t exponent) {
    Word const base = exponent < 0 ? invert(w) : w;
    Word       out  = Word::identity(w.rank());
    std::uint64_t const n
        = exponent < 0 ? static_cast<std::uint64_t>(-(exponent + 1)) + 1
                       : static_cast<std::uint64_t>(exponent);
    for (std::uint64_t i = 0; i < n; ++i) {
      out = concat(out, base);
    }
    return out;
  }

  Word lift(Word const& w, std::uint32_t rank) {
    std::vector<Letter> letters(w.begin(), w.end());
    return reduce(letters, rank);
  }

  bool is_cyclically_reduced(Word const& w) noexcept {
    return w.length() < 2 || !w.front().cancels(w.back());
  }

  CyclicDecomposition cyclic_reduce(Word const& w) {
    auto const   letters = w.letters();
    std::size_t  lo      = 0;
    std::size_t  hi      = letters.size();
    while (hi - lo >= 2 && letters[lo].cancels(letters[hi - 1])) {
      ++lo;
      --hi;
    }
    std::vector<Letter> u(letters.begin(), letters.begin() + lo);
    std::vector<Letter> c(letters.begin() + lo, letters.begin() + hi);
    return {make_word(w.rank(), std::move(u)), make_word(w.rank(), std::move(c))};
  }

  PrimitiveRoot primitive_root(Word const& w) {
    if (w.empty()) {
      throw InvalidArgument("primitive_root of the empty word");
    }
    auto [u, c]         = cyclic_reduce(w);
    std::size_t const n = c.length();
    std::size_t       period = n;
    for (std::size_t p = 1; p < n; ++p) {
      if (n % p != 0) {
        continue;
      }
      bool periodic = true;
      for (std::size_t i = p; i < n && periodic; ++i) {
        periodic = c[i] == c[i - p];
      }
      if (periodic) {
        period = p;
        break;
      }
    }
    std::vector<Letter> r(c.begin(), c.begin() + period);
    Word                core = make_word(w.rank(), std::move(r));
    return {concat(concat(u, core), invert(u)), n / period};
  }

  bool commute(Word const& a, Word const& b) {
    check_rank(a, b);
    if (a.empty() || b.empty()) {
      return true;
    }
    Word const ra = primitive_root(a).root;
    Word const rb = primitive_root(b).root;
    return ra == rb || ra == invert(rb);
  }

  std::uint64_t count_reduced_words(std::uint32_t rank, std::size_t length) {
    if (length == 0) {
      return 1;
    }
    return checked_mul(2ULL * rank, pow_u64(2ULL * rank - 1, length - 1));
  }

  std::uint64_t word_index(Word const& w) {
    std::uint64_t index = 1;
    for (std::size_t k = 0; k < w.length(); ++k) {
      index = checked_add(index, count_reduced_words(w.rank(), k));
    }
    std::uint64_t const alphabet = 2ULL * w.rank();
    for (std::size_t p = 0; p < w.length(); ++p) {
      std::uint64_t smaller = w[p].key();
      if (p > 0 && w[p - 1].inverse().key() < w[p].key()) {
        --smaller;
      }
      std::uint64_t const tail
          = p == 0 ? pow_u64(alphabet - 1, w.length() - 1)
                   : pow_u64(alphabet - 1, w.length() - p - 1);
      index = checked_add(index, checked_mul(smaller, tail));
    }
    return index;
  }

  Word word_at(std::uint32_t rank, std::uint64_t index) {
    if (rank == 0 || index == 0) {
      throw InvalidArgument("word_at needs positive rank and index");
    }
    std::uint64_t rem    = index - 1;
    std::size_t   length = 0;
    while (true) {
      std::uint64_t const c = count_reduced_words(rank, length);
      if (rem < c) {
        break;
      }
      rem -= c;
      ++length;
    }
    std::vector<Letter> out;
    out.reserve(length);
    std::uint64_t const alphabet = 2ULL * rank;
    for (std::size_t p = 0; p < length; ++p) {
      std::uint64_t const tail = pow_u64(alphabet - 1, length - p - 1);
      std::uint64_t       slot = rem / tail;
      rem %= tail;
      std::uint32_t key = static_cast<std::uint32_t>(slot);
      if (p > 0 && out.back().inverse().key() <= key) {
        ++key;
      }
      out.push_back(Letter::from_key(key));
    }
    return make_word(rank, std::move(out));
  }

  bool is_class_representative(Word const& w) {
    if (!is_cyclically_reduced(w)) {
      return false;
    }
    Word const inv = invert(w);
    return le_all_rotations(w.letters(), w.letters())
           && le_all_rotations(w.letters(), inv.letters());
  }

  namespace detail {
    bool visit_reduced_of_length(
        std::uint32_t                                        rank,
        std::size_t                                          length,
        std::function<bool(std::span<Letter const>)> const& visit) {
      if (length == 0) {
        return visit({});
      }
      std::uint32_t const        alphabet = 2 * rank;
      std::vector<Letter>        buf(length);
      std::vector<std::uint32_t> next(length, 0);
      std::size_t                depth = 0;
      while (true) {
        if (next[depth] >= alphabet) {
          if (depth == 0) {
            return true;
          }
          next[depth] = 0;
          --depth;
          continue;
        }
        Letter const c = Letter::from_key(next[depth]++);
        if (depth > 0 && c.cancels(buf[depth - 1])) {
          continue;
        }
        buf[depth] = c;
        if (depth + 1 == length) {
          if (!visit(buf)) {
            return false;
          }
        } else {
          ++depth;
        }
      }
    }
  }  // namespace detail

  void for_each_word(std::uint32_t                           rank,
                     std::size_t                             max_length,
                     EnumerationMode                         mode,
                     std::function<bool(Word const&)> const& visit) {
    if (rank == 0) {
      throw InvalidArgument("rank must be positive");
    }
    auto emit = [&](std::span<Letter const> letters) {
      return visit(make_word(rank, {letters.begin(), letters.end()}));
    };
    for (std::size_t len = 0; len <= max_length; ++len) {
      bool const go_on = (mode == EnumerationMode::all_reduced || len == 0)
                             ? detail::visit_reduced_of_length(rank, len, emit)
                             : visit_classes_of_length(rank, len, emit);
      if (!go_on) {
        return;
      }
    }
  }

  std::vector<Word> enumerate_words(std::uint32_t   rank,
                                    std::size_t     max_length,
                                    EnumerationMode mode) {
    std::vector<Word> out;
    for_each_word(rank, max_length, mode, [&out](Word const& w) {
      out.push_back(w);
      return true;
    });
    return out;
  }

  Word f2_embed(std::uint32_t i) {
    if (i == 0) {
      throw InvalidArgument("f2_embed index must be at least 1");
    }
    std::vector<Letter> letters;
    letters.reserve(2 * i + 1);
    letters.insert(letters.end(), i, Letter::make(0, -1));
    letters.push_back(Letter::make(1, 1));
    letters.insert(letters.end(), i, Letter::make(0, 1));
    return make_word(2, std::move(letters));
  }

  Word substitute(Word const& w, std::span<Word const> images) {
    if (images.empty()) {
      throw InvalidArgument("substitute needs at least one image");
    }
    std::uint32_t const target = images.front().rank();
    for (Word const& img : images) {
      if (img.rank() != target) {
        throw RankMismatch("substitution images have different ranks");
      }
    }
    Word out = Word::identity(target);
    for (Letter l : w) {
      if (l.index() >= images.size()) {
        throw IndexOutOfRange("no image for generator "
                              + std::to_string(l.index() + 1));
      }
      Word const& img = images[l.index()];
      out = concat(out, l.sign() > 0 ? img : invert(img));
    }
    return out;
  }

  Word combine_product_relation(Word const& relation_g,
                                Word const& relation_h,
                                std::size_t aux_search_length) {
    check_rank(relation_g, relation_h);
    if (relation_g.empty() || relation_h.empty()) {
      throw InvalidArgument("combine_product_relation needs nontrivial words");
    }
    auto commutator = [](Word const& a, Word const& b) {
      return concat(concat(a, b), concat(invert(a), invert(b)));
    };
    Word direct = commutator(relation_g, relation_h);
    if (!direct.empty()) {
      return direct;
    }
    std::uint32_t const rank = relation_g.rank();
    if (rank == 1) {
      std::uint64_t const e
          = std::lcm(primitive_root(relation_g).exponent,
                     primitive_root(relation_h).exponent);
      return power(Word::generator(0, 1), static_cast<std::int64_t>(e));
    }
    std::optional<Word> found;
    for_each_word(rank, aux_search_length, EnumerationMode::all_reduced,
                  [&](Word const& w) {
                    if (w.empty() || commute(w, relation_g)
                        || commute(w, relation_h)) {
                      return true;
                    }
                    Word const replaced = commutator(w, relation_h);
                    Word       combined = commutator(relation_g, replaced);
                    if (combined.empty()) {
                      return true;
                    }
                    found = std::move(combined);
                    return false;
                  });
    if (!found) {
      throw SearchExhausted(
          "no auxiliary word of length <= " + std::to_string(aux_search_length)
          + " commutes with neither relation");
    }
    return *found;
  }

  std::vector<Word> extend_with_fresh(std::span<Word const>      words,
                                      std::uint32_t              total_rank,
                                      std::optional<std::size_t> target_size) {
    if (total_rank == 0) {
      throw InvalidArgument("total rank must be positive");
    }
    std::vector<bool> used(total_rank, false);
    std::vector<Word> out;
    out.reserve(std::max<std::size_t>(words.size(), total_rank));
    for (Word const& w : words) {
      if (w.rank() > total_rank) {
        throw RankMismatch("total rank " + std::to_string(total_rank)
                           + " is below input rank " + std::to_string(w.rank()));
      }
      for (Letter l : w) {
        used[l.index()] = true;
      }
      out.push_back(lift(w, total_rank));
    }
    if (target_size && *target_size < out.size()) {
      throw InvalidArgument("target size is smaller than the input tuple");
    }
    for (std::uint32_t i = 0; i < total_rank; ++i) {
      if (target_size && out.size() == *target_size) {
        break;
      }
      if (!used[i]) {
        out.push_back(Word::generator(i, total_rank));
      }
    }
    if (target_size && out.size() < *target_size) {
      throw InvalidArgument("not enough unused generators below rank "
                            + std::to_string(total_rank) + " to reach "
                            + std::to_string(*target_size) + " words");
    }
    return out;
  }

  std::string to_string(Word const& w) {
    if (w.empty()) {
      return "e";
    }
    std::string out;
    for (Letter l : w) {
      if (!out.empty()) {
        out += ' ';
      }
      if (l.sign() < 0) {
        out += '-';
      }
      out += std::to_string(l.index() + 1);
    }
    return out;
  }

  namespace {
    std::vector<Letter> parse_letters(std::string_view text,
                                      std::uint32_t&   max_index) {
      std::vector<Letter> letters;
      std::size_t         pos = 0;
      bool                saw_e = false;
      while (pos < text.size()) {
        while (pos < text.size()
               && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n'
                   || text[pos] == '\r')) {
          ++pos;
        }
        if (pos >= text.size()) {
          break;
        }
        std::size_t end = pos;
        while (end < text.size() && text[end] != ' ' && text[end] != '\t'
               && text[end] != '\n' && text[end] != '\r') {
          ++end;
        }
        std::string_view tok = text.substr(pos, end - pos);
        pos                  = end;
        if (tok == "e") {
          saw_e = true;
          continue;
        }
        long long value = 0;
        auto [ptr, ec]  = std::from_chars(tok.data(), tok.data() + tok.size(), value);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || value == 0
            || value > std::numeric_limits<std::int32_t>::max()
            || value < -static_cast<long long>(std::numeric_limits<std::int32_t>::max())) {
          throw ParseError("bad word token '" + std::string(tok) + "'");
        }
        auto const index = static_cast<std::uint32_t>(value < 0 ? -value : value) - 1;
        max_index        = std::max(max_index, index + 1);
        letters.push_back(Letter::make(index, value < 0 ? -1 : 1));
      }
      if (saw_e && !letters.empty()) {
        throw ParseError("'e' cannot be mixed with letters");
      }
      if (!saw_e && letters.empty()) {
        throw ParseError("empty word text; use 'e' for the identity");
      }
      return letters;
    }
  }  // namespace

  Word parse_word(std::string_view text, std::uint32_t rank) {
    std::uint32_t max_index = 0;
    auto          letters   = parse_letters(text, max_index);
    return reduce(letters, rank);
  }

  Word parse_word(std::string_view text) {
    std::uint32_t max_index = 0;
    auto          letters   = parse_letters(text, max_index);
    return reduce(letters, std::max<std::uint32_t>(max_index, 1));
  }

  std::vector<Word> parse_word_list(std::string_view text, std::uint32_t rank) {
    std::vector<std::vector<Letter>> raw;
    std::uint32_t                    max_index = 0;
    std::size_t                      start     = 0;
    while (true) {
      std::size_t const comma = text.find(',', start);
      std::string_view  piece = text.substr(
          start, comma == std::string_view::npos ? std::string_view::npos
                                                  : comma - start);
      raw.push_back(parse_letters(piece, max_index));
      if (comma == std::string_view::npos) {
        break;
      }
      start = comma + 1;
    }
    std::uint32_t const r = rank == 0 ? std::max<std::uint32_t>(max_index, 1) : rank;
    std::vector<Word>   out;
    out.reserve(raw.size());
    for (auto const& letters : raw) {
      out.push_back(reduce(letters, r));
    }
    return out;
  }

  std::string to_string(std::span<Word const> words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
      if (i > 0) {
        out += ", ";
      }
      out += to_string(words[i]);
    }
    return out;
  }

}  // namespace libredense
