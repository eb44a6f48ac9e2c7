#include "libredense/perm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <set>

#include "libredense/detail/hash.hpp"

namespace libredense {

  namespace {

    void skip_space(std::string_view text, std::size_t& pos) {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) {
        ++pos;
      }
    }

    std::uint64_t parse_point(std::string_view text, std::size_t& pos) {
      std::size_t const start = pos;
      std::uint64_t     value = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        std::uint64_t const digit = static_cast<std::uint64_t>(text[pos] - '0');
        if (value > (UINT64_MAX - digit) / 10) {
          throw ParseError("point out of range in \"" + std::string(text) + "\"");
        }
        value = value * 10 + digit;
        ++pos;
      }
      if (pos == start) {
        throw ParseError("expected a point in \"" + std::string(text) + "\"");
      }
      if (value == 0) {
        throw ParseError("points are positive in \"" + std::string(text) + "\"");
      }
      return value;
    }

    // Cycle notation into a list of cycles, each at least one point long.
    std::vector<std::vector<std::uint64_t>> parse_cycles(std::string_view text) {
      std::vector<std::vector<std::uint64_t>> cycles;
      std::size_t                             pos = 0;
      skip_space(text, pos);
      if (pos == text.size()) {
        throw ParseError("empty permutation text");
      }
      while (pos < text.size()) {
        if (text[pos] != '(') {
          throw ParseError("expected '(' in \"" + std::string(text) + "\"");
        }
        ++pos;
        std::vector<std::uint64_t> cycle;
        while (true) {
          skip_space(text, pos);
          if (pos == text.size()) {
            throw ParseError("unterminated cycle in \"" + std::string(text) + "\"");
          }
          if (text[pos] == ')') {
            ++pos;
            break;
          }
          if (text[pos] == ',') {
            ++pos;
            continue;
          }
          cycle.push_back(parse_point(text, pos));
        }
        if (!cycle.empty()) {
          cycles.push_back(std::move(cycle));
        }
        skip_space(text, pos);
      }
      return cycles;
    }

  }  // namespace

  FinPerm::FinPerm(std::uint32_t degree) {
    if (degree == 0) {
      throw InvalidArgument("permutation degree must be positive");
    }
    images_.resize(degree);
    std::iota(images_.begin(), images_.end(), 0U);
  }

  FinPerm FinPerm::from_images(std::vector<std::uint32_t> images) {
    if (images.empty()) {
      throw InvalidArgument("permutation degree must be positive");
    }
    std::vector<bool> hit(images.size(), false);
    for (std::uint32_t& v : images) {
      if (v == 0 || v > images.size() || hit[v - 1]) {
        throw InvalidArgument("image list is not a permutation of 1.."
                              + std::to_string(images.size()));
      }
      hit[v - 1] = true;
      --v;
    }
    FinPerm f(1);
    f.images_ = std::move(images);
    return f;
  }

  FinPerm FinPerm::from_cycles(std::uint32_t                                  degree,
                               std::vector<std::vector<std::uint32_t>> const& cycles) {
    std::vector<std::uint32_t> images(degree);
    std::iota(images.begin(), images.end(), 1U);
    std::vector<bool> used(degree, false);
    for (auto const& cycle : cycles) {
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        std::uint32_t const p = cycle[i];
        if (p == 0 || p > degree || used[p - 1]) {
          throw InvalidArgument("cycles must be disjoint and within 1.."
                                + std::to_string(degree));
        }
        used[p - 1]   = true;
        images[p - 1] = cycle[(i + 1) % cycle.size()];
      }
    }
    return from_images(std::move(images));
  }

  bool FinPerm::is_identity() const noexcept {
    for (std::size_t i = 0; i < images_.size(); ++i) {
      if (images_[i] != i) {
        return false;
      }
    }
    return true;
  }

  std::uint64_t FinPerm::hash() const noexcept {
    return detail::hash_u32s(images_);
  }

  FinPerm FinPerm::extended(std::uint32_t degree) const {
    if (degree < this->degree()) {
      throw DegreeMismatch("cannot shrink a permutation of degree "
                           + std::to_string(this->degree()));
    }
    FinPerm f(degree);
    std::copy(images_.begin(), images_.end(), f.images_.begin());
    return f;
  }

  FinPerm compose(FinPerm const& f, FinPerm const& g) {
    if (f.degree() != g.degree()) {
      throw DegreeMismatch("composing permutations of degree "
                           + std::to_string(f.degree()) + " and "
                           + std::to_string(g.degree()));
    }
    FinPerm out(f.degree());
    for (std::size_t i = 0; i < g.images_.size(); ++i) {
      out.images_[i] = f.images_[g.images_[i]];
    }
    return out;
  }

  FinPerm invert(FinPerm const& f) {
    FinPerm out(f.degree());
    for (std::size_t i = 0; i < f.images_.size(); ++i) {
      out.images_[f.images_[i]] = static_cast<std::uint32_t>(i);
    }
    return out;
  }

  std::uint64_t factorial(std::uint32_t n) {
    if (n > 20) {
      throw InvalidArgument(std::to_string(n) + "! does not fit in 64 bits");
    }
    std::uint64_t r = 1;
    for (std::uint32_t i = 2; i <= n; ++i) {
      r *= i;
    }
    return r;
  }

  std::uint64_t lex_rank(FinPerm const& f) {
    std::uint32_t const m = f.degree();
    if (m > 20) {
      throw InvalidArgument("lex_rank needs degree at most 20");
    }
    auto const        img = f.zero_based();
    std::vector<bool> used(m, false);
    std::uint64_t     rank = 0;
    for (std::uint32_t i = 0; i < m; ++i) {
      std::uint64_t smaller = 0;
      for (std::uint32_t v = 0; v < img[i]; ++v) {
        smaller += used[v] ? 0 : 1;
      }
      used[img[i]] = true;
      rank += smaller * factorial(m - 1 - i);
    }
    return rank;
  }

  FinPerm lex_unrank(std::uint32_t degree, std::uint64_t rank) {
    if (degree == 0 || rank >= factorial(degree)) {
      throw IndexOutOfRange("rank " + std::to_string(rank) + " outside S_"
                            + std::to_string(degree));
    }
    std::vector<std::uint32_t> pool(degree);
    std::iota(pool.begin(), pool.end(), 1U);
    std::vector<std::uint32_t> images;
    images.reserve(degree);
    for (std::uint32_t i = 0; i < degree; ++i) {
      std::uint64_t const f = factorial(degree - 1 - i);
      auto const          k = static_cast<std::size_t>(rank / f);
      rank %= f;
      images.push_back(pool[k]);
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return FinPerm::from_images(std::move(images));
  }

  FinPerm random_fin_perm(std::uint32_t degree, Rng& rng) {
    std::vector<std::uint32_t> images(degree);
    std::iota(images.begin(), images.end(), 1U);
    for (std::size_t i = images.size(); i > 1; --i) {
      std::swap(images[i - 1], images[rng.below(i)]);
    }
    return FinPerm::from_images(std::move(images));
  }

  std::string to_string(FinPerm const& f) {
    std::string out;
    for (std::uint32_t p = 1; p <= f.degree(); ++p) {
      if (p > 1) {
        out += ' ';
      }
      out += std::to_string(f(p));
    }
    return out;
  }

  FinPerm parse_fin_perm(std::string_view text) {
    std::vector<std::uint32_t> images;
    std::size_t                pos = 0;
    skip_space(text, pos);
    while (pos < text.size()) {
      std::uint64_t const v = parse_point(text, pos);
      if (v > UINT32_MAX) {
        throw ParseError("image out of range in \"" + std::string(text) + "\"");
      }
      images.push_back(static_cast<std::uint32_t>(v));
      skip_space(text, pos);
    }
    try {
      return FinPerm::from_images(std::move(images));
    } catch (InvalidArgument const& e) {
      throw ParseError(e.what());
    }
  }

  std::string to_cycle_string(FinPerm const& f) {
    return to_string(SuppPerm::from_fin_perm(f));
  }

  SuppPerm SuppPerm::from_pairs(
      std::vector<std::pair<std::uint64_t, std::uint64_t>> const& pairs) {
    SuppPerm                f;
    std::set<std::uint64_t> images;
    for (auto const& [p, q] : pairs) {
      if (p == 0 || q == 0) {
        throw InvalidArgument("points are positive");
      }
      if (!f.map_.emplace(p, q).second || !images.insert(q).second) {
        throw InvalidArgument("pairs are not injective");
      }
    }
    for (auto const& [p, q] : f.map_) {
      if (images.count(p) == 0) {
        throw InvalidArgument("pairs do not describe a permutation: point "
                              + std::to_string(p) + " has no preimage");
      }
    }
    std::erase_if(f.map_, [](auto const& kv) { return kv.first == kv.second; });
    return f;
  }

  SuppPerm SuppPerm::from_cycles(std::vector<std::vector<std::uint64_t>> const& cycles) {
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
    for (auto const& cycle : cycles) {
      for (std::size_t i = 0; i < cycle.size(); ++i) {
        pairs.emplace_back(cycle[i], cycle[(i + 1) % cycle.size()]);
      }
    }
    return from_pairs(pairs);
  }

  SuppPerm SuppPerm::from_fin_perm(FinPerm const& f, std::uint64_t offset) {
    SuppPerm f2;
    for (std::uint32_t p = 1; p <= f.degree(); ++p) {
      if (f(p) != p) {
        f2.map_.emplace(p + offset, f(p) + offset);
      }
    }
    return f2;
  }

  std::uint64_t SuppPerm::hash() const noexcept {
    std::uint64_t h = 0x5u;
    for (auto const& [p, q] : map_) {
      h = detail::hash_combine(detail::hash_combine(h, p), q);
    }
    return h;
  }

  FinPerm SuppPerm::to_fin_perm(std::uint32_t degree) const {
    if (max_point() > degree) {
      throw InvalidArgument("permutation moves " + std::to_string(max_point())
                            + ", outside 1.." + std::to_string(degree));
    }
    std::vector<std::uint32_t> images(degree);
    std::iota(images.begin(), images.end(), 1U);
    for (auto const& [p, q] : map_) {
      images[p - 1] = static_cast<std::uint32_t>(q);
    }
    return FinPerm::from_images(std::move(images));
  }

  SuppPerm compose(SuppPerm const& f, SuppPerm const& g) {
    SuppPerm out;
    for (auto const& [p, q] : g.map_) {
      std::uint64_t const r = f(q);
      if (r != p) {
        out.map_.emplace(p, r);
      }
    }
    for (auto const& [p, q] : f.map_) {
      if (g.map_.count(p) == 0) {
        out.map_.emplace(p, q);
      }
    }
    return out;
  }

  SuppPerm invert(SuppPerm const& f) {
    SuppPerm out;
    for (auto const& [p, q] : f.map_) {
      out.map_.emplace(q, p);
    }
    return out;
  }

  std::string to_string(SuppPerm const& f) {
    if (f.is_identity()) {
      return "()";
    }
    std::string             out;
    std::set<std::uint64_t> seen;
    for (auto const& [start, image] : f.support_map()) {
      if (seen.count(start) != 0) {
        continue;
      }
      out += '(';
      std::uint64_t p = start;
      do {
        if (p != start) {
          out += ' ';
        }
        out += std::to_string(p);
        seen.insert(p);
        p = f(p);
      } while (p != start);
      out += ')';
    }
    return out;
  }

  SuppPerm parse_supp_perm(std::string_view text) {
    auto const cycles = parse_cycles(text);
    std::set<std::uint64_t> used;
    for (auto const& c : cycles) {
      for (std::uint64_t p : c) {
        if (!used.insert(p).second) {
          throw ParseError("cycles are not disjoint in \"" + std::string(text) + "\"");
        }
      }
    }
    return SuppPerm::from_cycles(cycles);
  }

  std::vector<SuppPerm> parse_supp_perm_list(std::string_view text) {
    std::vector<SuppPerm> out;
    std::size_t           start = 0;
    int                   depth = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
      if (i < text.size()) {
        if (text[i] == '(') {
          ++depth;
        } else if (text[i] == ')') {
          --depth;
        }
      }
      if (i == text.size() || (text[i] == ',' && depth == 0)) {
        out.push_back(parse_supp_perm(text.substr(start, i - start)));
        start = i + 1;
      }
    }
    return out;
  }

  OpenBox::OpenBox(std::vector<std::pair<std::uint64_t, std::uint64_t>> constraints) {
    std::set<std::uint64_t> images;
    for (auto const& [a, b] : constraints) {
      if (a == 0 || b == 0) {
        throw InvalidArgument("box constraints use positive points");
      }
      auto const [it, fresh] = forward_.emplace(a, b);
      if (!fresh) {
        if (it->second != b) {
          throw InvalidArgument("box sends " + std::to_string(a) + " to two points");
        }
        continue;
      }
      if (!images.insert(b).second) {
        throw InvalidArgument("box sends two points to " + std::to_string(b));
      }
    }
  }

  bool box_member(SuppPerm const& f, OpenBox const& box) {
    return std::all_of(box.constraints().begin(), box.constraints().end(),
                       [&f](auto const& c) { return f(c.first) == c.second; });
  }

  SuppPerm complete_box(OpenBox const& box, CompletionPolicy const& policy) {
    if (policy.kind == CompletionPolicy::Kind::random) {
      Rng rng(policy.seed);
      return complete_box_random(box, policy.support_bound, rng);
    }
    auto const&             forward = box.constraints();
    std::set<std::uint64_t> images;
    for (auto const& [a, b] : forward) {
      images.insert(b);
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(forward.begin(),
                                                               forward.end());
    // A chain starts at a point that is constrained but is nobody's image.
    for (auto const& [a, b] : forward) {
      if (images.count(a) != 0) {
        continue;
      }
      std::uint64_t end = b;
      while (forward.count(end) != 0) {
        end = forward.at(end);
      }
      pairs.emplace_back(end, a);
    }
    return SuppPerm::from_pairs(pairs);
  }

  SuppPerm complete_box_random(OpenBox const& box, std::uint64_t support_bound, Rng& rng) {
    auto const&   forward = box.constraints();
    std::uint64_t bound   = support_bound;
    for (auto const& [a, b] : forward) {
      bound = std::max({bound, a, b});
    }
    std::set<std::uint64_t> images;
    for (auto const& [a, b] : forward) {
      images.insert(b);
    }
    std::vector<std::uint64_t> free_points;
    std::vector<std::uint64_t> free_images;
    for (std::uint64_t p = 1; p <= bound; ++p) {
      if (forward.count(p) == 0) {
        free_points.push_back(p);
      }
      if (images.count(p) == 0) {
        free_images.push_back(p);
      }
    }
    for (std::size_t i = free_images.size(); i > 1; --i) {
      std::swap(free_images[i - 1], free_images[rng.below(i)]);
    }
    std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs(forward.begin(),
                                                               forward.end());
    for (std::size_t i = 0; i < free_points.size(); ++i) {
      pairs.emplace_back(free_points[i], free_images[i]);
    }
    return SuppPerm::from_pairs(pairs);
  }

  double Dyadic::value() const {
    return zero ? 0.0 : std::ldexp(1.0, -static_cast<int>(std::min<std::uint64_t>(exponent, 2000)));
  }

  bool operator<(Dyadic const& a, Dyadic const& b) {
    if (b.zero) {
      return false;
    }
    return a.zero || a.exponent > b.exponent;
  }

  bool operator<=(Dyadic const& a, Dyadic const& b) {
    return !(b < a);
  }

  bool dyadic_le_sum(Dyadic const& a, Dyadic const& b, Dyadic const& c) {
    if (a <= b || a <= c) {
      return true;
    }
    // a exceeds both summands, so b + c can only reach a as 2^-k + 2^-k.
    return !b.zero && !c.zero && b.exponent == c.exponent
           && a.exponent + 1 == b.exponent;
  }

  Dyadic metric_d(SuppPerm const& f, SuppPerm const& g) {
    std::set<std::uint64_t> points;
    for (auto const& kv : f.support_map()) {
      points.insert(kv.first);
    }
    for (auto const& kv : g.support_map()) {
      points.insert(kv.first);
    }
    SuppPerm const fi = invert(f);
    SuppPerm const gi = invert(g);
    for (std::uint64_t n : points) {
      if (f(n) != g(n) || fi(n) != gi(n)) {
        return {false, n};
      }
    }
    return {};
  }

}  // namespace libredense
