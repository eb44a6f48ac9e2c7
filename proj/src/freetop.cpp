#include "libredense/freetop.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "libredense/stallings.hpp"

namespace libredense {

  namespace {

    struct FinPermHash {
      std::size_t operator()(FinPerm const& f) const noexcept {
        return static_cast<std::size_t>(f.hash());
      }
    };

    constexpr std::size_t max_coset_search_elements = 2'000'000;

    std::uint64_t perm_order(FinPerm const& f) {
      std::vector<bool> seen(f.degree() + 1, false);
      std::uint64_t     order = 1;
      for (std::uint32_t p = 1; p <= f.degree(); ++p) {
        if (seen[p]) {
          continue;
        }
        std::uint64_t len = 0;
        for (std::uint32_t q = p; !seen[q]; q = f(q)) {
          seen[q] = true;
          ++len;
        }
        order = std::lcm(order, len);
      }
      return order;
    }

    Word random_reduced_word(std::uint32_t rank, std::size_t length, Rng& rng) {
      std::vector<Letter> letters;
      for (std::size_t i = 0; i < length; ++i) {
        while (true) {
          Letter const c = Letter::from_key(static_cast<std::uint32_t>(rng.below(2 * rank)));
          if (letters.empty() || !c.cancels(letters.back())) {
            letters.push_back(c);
            break;
          }
        }
      }
      return reduce(letters, rank);
    }

    // Kernel words in enumeration order, and every non-commuting pair among
    // them ordered by (z, y). `visit` returns true to stop.
    bool for_each_kernel_pair(FiniteQuotient const&                          q,
                              std::size_t                                    max_length,
                              std::function<bool(KernelPair const&)> const& visit) {
      if (q.rank() < 2) {
        throw InvalidArgument("a free pair needs rank at least 2");
      }
      std::vector<Word> kernel;
      bool              stopped = false;
      for_each_word(q.rank(), max_length, EnumerationMode::all_reduced, [&](Word const& w) {
        if (w.empty() || !quotient_apply(q, w).is_identity()) {
          return true;
        }
        for (Word const& y : kernel) {
          if (!commute(y, w) && visit({y, w})) {
            stopped = true;
            return false;
          }
        }
        kernel.push_back(w);
        return true;
      });
      return stopped;
    }

  }  // namespace

  FiniteQuotient::FiniteQuotient(std::uint32_t rank, std::uint32_t degree, std::vector<FinPerm> images)
      : rank_(rank), degree_(degree), images_(std::move(images)) {
    if (rank_ == 0) {
      throw InvalidArgument("quotient rank must be positive");
    }
    if (images_.size() != rank_) {
      throw InvalidArgument("quotient of rank " + std::to_string(rank_) + " needs "
                            + std::to_string(rank_) + " images, got "
                            + std::to_string(images_.size()));
    }
    for (FinPerm const& f : images_) {
      if (f.degree() != degree_) {
        throw InvalidArgument("quotient image of degree " + std::to_string(f.degree())
                              + " in a degree " + std::to_string(degree_) + " quotient");
      }
    }
  }

  FiniteQuotient FiniteQuotient::trivial(std::uint32_t rank) {
    return FiniteQuotient(rank, 1, std::vector<FinPerm>(rank, FinPerm(1)));
  }

  FiniteQuotient FiniteQuotient::lifted(std::uint32_t rank) const {
    if (rank < rank_) {
      throw RankMismatch("cannot lift a quotient to a smaller rank");
    }
    std::vector<FinPerm> images = images_;
    images.resize(rank, FinPerm(degree_));
    return FiniteQuotient(rank, degree_, std::move(images));
  }

  FinPerm quotient_apply(FiniteQuotient const& q, Word const& w) {
    FinPerm result(q.degree());
    for (Letter l : w) {
      if (l.index() >= q.rank()) {
        throw RankMismatch("word uses generator " + std::to_string(l.index() + 1)
                           + " outside a rank " + std::to_string(q.rank()) + " quotient");
      }
      FinPerm const& g = q.images()[l.index()];
      result           = compose(result, l.sign() > 0 ? g : invert(g));
    }
    return result;
  }

  FiniteQuotient parse_quotient(std::string_view text) {
    std::istringstream       in{std::string(text)};
    std::string              line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos && line[line.find_first_not_of(" \t\r")] != '#') {
        lines.push_back(line);
      }
    }
    if (lines.empty()) {
      throw ParseError("empty quotient file");
    }
    std::istringstream head(lines[0]);
    std::string        kw_rank;
    std::string        kw_degree;
    long long          rank   = 0;
    long long          degree = 0;
    if (!(head >> kw_rank >> rank >> kw_degree >> degree) || kw_rank != "rank"
        || kw_degree != "degree" || rank <= 0 || degree <= 0) {
      throw ParseError("quotient header must read \"rank n degree m\"");
    }
    std::string rest;
    if (head >> rest) {
      throw ParseError("trailing text in quotient header");
    }
    if (lines.size() != static_cast<std::size_t>(rank) + 1) {
      throw ParseError("expected " + std::to_string(rank) + " image lines, got "
                       + std::to_string(lines.size() - 1));
    }
    std::vector<FinPerm> images;
    for (std::size_t i = 1; i < lines.size(); ++i) {
      images.push_back(parse_fin_perm(lines[i]));
      if (images.back().degree() != static_cast<std::uint32_t>(degree)) {
        throw ParseError("image " + std::to_string(i) + " has the wrong degree");
      }
    }
    return FiniteQuotient(static_cast<std::uint32_t>(rank), static_cast<std::uint32_t>(degree),
                          std::move(images));
  }

  FiniteQuotient load_quotient(std::string const& path) {
    std::ifstream in(path);
    if (!in) {
      throw IoError("cannot read quotient " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_quotient(buf.str());
  }

  std::string to_text(FiniteQuotient const& q) {
    std::string out = "rank " + std::to_string(q.rank()) + " degree " + std::to_string(q.degree()) + "\n";
    for (FinPerm const& f : q.images()) {
      out += to_string(f) + "\n";
    }
    return out;
  }

  CosetNeighborhood::CosetNeighborhood(FiniteQuotient quotient, FinPerm target)
      : quotient_(std::move(quotient)), target_(std::move(target)) {
    std::uint32_t const n = quotient_.rank();
    if (target_.degree() != quotient_.degree()) {
      throw DegreeMismatch("coset target of degree " + std::to_string(target_.degree())
                           + " for a degree " + std::to_string(quotient_.degree()) + " quotient");
    }
    if (target_.is_identity()) {
      representative_ = Word::identity(n);
      return;
    }
    std::vector<FinPerm> letters;
    for (FinPerm const& f : quotient_.images()) {
      letters.push_back(f);
      letters.push_back(invert(f));
    }
    struct Node {
      std::size_t   parent;
      std::uint32_t key;
    };
    std::vector<Node>                                    nodes{{0, 0}};
    std::vector<FinPerm>                                 values{FinPerm(quotient_.degree())};
    std::unordered_map<FinPerm, std::size_t, FinPermHash> seen{{values[0], 0}};
    std::size_t const max_length = 2 * static_cast<std::size_t>(quotient_.degree()) * quotient_.degree();

    auto spell = [&](std::size_t i) {
      std::vector<Letter> out;
      for (; i != 0; i = nodes[i].parent) {
        out.push_back(Letter::from_key(nodes[i].key));
      }
      std::reverse(out.begin(), out.end());
      return reduce(out, n);
    };

    std::size_t begin = 0;
    for (std::size_t len = 1; len <= max_length; ++len) {
      std::size_t const end = values.size();
      if (begin == end) {
        throw EmptyNeighborhood("target " + to_cycle_string(target_)
                                + " is not in the image of the quotient");
      }
      for (std::size_t i = begin; i < end; ++i) {
        for (std::uint32_t k = 0; k < 2 * n; ++k) {
          if (i != 0 && Letter::from_key(k).cancels(Letter::from_key(nodes[i].key))) {
            continue;
          }
          FinPerm next = compose(values[i], letters[k]);
          if (seen.count(next) != 0) {
            continue;
          }
          if (values.size() >= max_coset_search_elements) {
            throw SearchExhausted("coset search visited too many elements");
          }
          nodes.push_back({i, k});
          values.push_back(next);
          seen.emplace(std::move(next), values.size() - 1);
          if (values.back() == target_) {
            representative_ = spell(values.size() - 1);
            return;
          }
        }
      }
      begin = end;
    }
    if (begin == values.size()) {
      throw EmptyNeighborhood("target " + to_cycle_string(target_)
                              + " is not in the image of the quotient");
    }
    throw SearchExhausted("no coset representative of length <= " + std::to_string(max_length));
  }

  CosetNeighborhood CosetNeighborhood::kernel(FiniteQuotient quotient) {
    FinPerm id(quotient.degree());
    return CosetNeighborhood(std::move(quotient), std::move(id));
  }

  CosetNeighborhood CosetNeighborhood::around(FiniteQuotient quotient, Word const& w) {
    FinPerm t = quotient_apply(quotient, w);
    return CosetNeighborhood(std::move(quotient), std::move(t));
  }

  bool CosetNeighborhood::contains(Word const& w) const {
    return quotient_apply(quotient_, w) == target_;
  }

  FiniteQuotient intersect_neighborhoods(std::span<CosetNeighborhood const> neighborhoods) {
    if (neighborhoods.empty()) {
      throw InvalidArgument("intersection of no neighbourhoods");
    }
    std::uint32_t const rank   = neighborhoods.front().quotient().rank();
    std::uint32_t       degree = 0;
    for (auto const& u : neighborhoods) {
      if (u.quotient().rank() != rank) {
        throw RankMismatch("neighbourhoods of different ranks");
      }
      degree += u.quotient().degree();
    }
    std::vector<FinPerm> images;
    for (std::uint32_t k = 0; k < rank; ++k) {
      std::vector<std::uint32_t> img;
      std::uint32_t              offset = 0;
      for (auto const& u : neighborhoods) {
        FinPerm const& f = u.quotient().images()[k];
        for (std::uint32_t p = 1; p <= f.degree(); ++p) {
          img.push_back(f(p) + offset);
        }
        offset += f.degree();
      }
      images.push_back(FinPerm::from_images(std::move(img)));
    }
    return FiniteQuotient(rank, degree, std::move(images));
  }

  FinPerm intersected_target(std::span<CosetNeighborhood const> neighborhoods) {
    std::vector<std::uint32_t> img;
    std::uint32_t              offset = 0;
    for (auto const& u : neighborhoods) {
      for (std::uint32_t p = 1; p <= u.target().degree(); ++p) {
        img.push_back(u.target()(p) + offset);
      }
      offset += u.target().degree();
    }
    return FinPerm::from_images(std::move(img));
  }

  std::optional<Word> shortest_kernel_word(FiniteQuotient const& q, std::size_t max_length) {
    std::optional<Word> found;
    for_each_word(q.rank(), max_length, EnumerationMode::all_reduced, [&](Word const& w) {
      if (!w.empty() && quotient_apply(q, w).is_identity()) {
        found = w;
        return false;
      }
      return true;
    });
    return found;
  }

  Word random_kernel_word(FiniteQuotient const& q, std::size_t max_length, Rng& rng) {
    std::uint32_t const n = q.rank();
    Word const r = random_reduced_word(n, rng.below(max_length + 1), rng);
    Word const w = random_reduced_word(n, 1 + rng.below(std::max<std::size_t>(max_length, 1)), rng);
    std::uint64_t const k = perm_order(quotient_apply(q, w));
    return concat(concat(r, power(w, static_cast<std::int64_t>(k))), invert(r));
  }

  bool check_prod_neigh(std::span<CosetNeighborhood const> neighborhoods,
                        std::span<Word const>              members,
                        std::size_t                        m,
                        std::size_t                        samples,
                        std::uint64_t                      seed) {
    if (members.size() != neighborhoods.size()) {
      throw InvalidArgument("one member per neighbourhood is required");
    }
    FiniteQuotient const q = intersect_neighborhoods(neighborhoods);
    Rng                  rng(seed);
    for (std::size_t i = 0; i < neighborhoods.size(); ++i) {
      if (!neighborhoods[i].contains(members[i])) {
        throw InvalidArgument("member " + std::to_string(i + 1) + " is outside its neighbourhood");
      }
      for (std::size_t j = 0; j <= m; ++j) {
        for (std::size_t s = 0; s < samples; ++s) {
          Word w = Word::identity(q.rank());
          for (std::size_t t = 0; t < m - j; ++t) {
            w = concat(w, random_kernel_word(q, 3, rng));
          }
          w = concat(w, lift(members[i], q.rank()));
          for (std::size_t t = 0; t < j; ++t) {
            w = concat(w, random_kernel_word(q, 3, rng));
          }
          if (!neighborhoods[i].contains(w)) {
            return false;
          }
        }
      }
    }
    return true;
  }

  KernelPair find_free_pair_in_kernel(FiniteQuotient const& q, std::size_t max_length) {
    std::optional<KernelPair> found;
    for_each_kernel_pair(q, max_length, [&](KernelPair const& p) {
      found = p;
      return true;
    });
    if (!found) {
      throw SearchExhausted("no non-commuting kernel pair among words of length <= "
                            + std::to_string(max_length));
    }
    return *found;
  }

  FinCaseResult fin_case_perturb(std::vector<FinCaseTarget> const& targets,
                                 std::size_t                       h_search_length,
                                 std::size_t                       kernel_search_length) {
    if (targets.empty()) {
      throw InvalidArgument("fin_case_perturb needs at least one target");
    }
    std::vector<CosetNeighborhood> neighborhoods;
    for (auto const& t : targets) {
      neighborhoods.push_back(t.neighborhood);
    }
    FiniteQuotient const q    = intersect_neighborhoods(neighborhoods);
    std::uint32_t const  rank = q.rank();
    if (rank < 2) {
      throw InvalidArgument("fin_case_perturb needs rank at least 2");
    }
    std::size_t const n = targets.size();
    std::vector<Word> g;
    std::size_t       m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      Word const& gi = targets[i].g;
      if (gi.rank() > rank) {
        throw RankMismatch("target word of rank " + std::to_string(gi.rank())
                           + " in a rank " + std::to_string(rank) + " group");
      }
      g.push_back(lift(gi, rank));
      if (!targets[i].neighborhood.contains(g.back())) {
        throw InvalidArgument("target " + std::to_string(i + 1) + " (" + to_string(gi)
                              + ") is outside its neighbourhood");
      }
      m = std::max(m, 2 * gi.length() + 2 * n + 2 + 1);
    }

    // h words over {a = y, b = z}, grouped by length.
    std::vector<std::vector<Word>> h_by_length(h_search_length + 1);
    for_each_word(2, h_search_length, EnumerationMode::all_reduced, [&](Word const& h) {
      h_by_length[h.length()].push_back(h);
      return true;
    });

    std::optional<FinCaseResult> result;
    bool                         h_exhausted = false;
    for_each_kernel_pair(q, kernel_search_length, [&](KernelPair const& pair) {
      std::vector<Word> const yz{pair.y, pair.z};
      FinCaseResult           attempt{m, q, pair, {}, {}, {}};
      for (std::size_t i = 0; i < n; ++i) {
        auto const  idx  = static_cast<std::int64_t>(i + 1);
        Word const  head = concat(power(pair.z, -idx), pair.y);
        Word const  tail = concat(pair.y, power(pair.z, idx));
        bool        done = false;
        for (std::size_t total = 0; total <= 2 * h_search_length && !done; ++total) {
          std::size_t const lo = total > h_search_length ? total - h_search_length : 0;
          for (std::size_t l1 = lo; l1 <= std::min(total, h_search_length) && !done; ++l1) {
            for (Word const& h1 : h_by_length[l1]) {
              Word const left = concat(substitute(h1, yz), g[i]);
              for (Word const& h2 : h_by_length[total - l1]) {
                Word const mid = concat(left, substitute(h2, yz));
                if (mid.empty() || head.empty() || tail.empty()
                    || head.back().cancels(mid.front()) || mid.back().cancels(tail.front())) {
                  continue;
                }
                attempt.h1.push_back(h1);
                attempt.h2.push_back(h2);
                attempt.f.push_back(concat(concat(head, mid), tail));
                done = true;
                break;
              }
              if (done) {
                break;
              }
            }
          }
        }
        if (!done) {
          h_exhausted = true;
          return true;
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (!targets[i].neighborhood.contains(attempt.f[i])) {
          return false;
        }
      }
      if (!is_free_basis(attempt.f, rank)) {
        return false;
      }
      result = std::move(attempt);
      return true;
    });
    if (h_exhausted) {
      throw SearchExhausted("no h words of length <= " + std::to_string(h_search_length)
                            + " give a cancellation-free middle");
    }
    if (!result) {
      throw SearchExhausted("no kernel pair of length <= " + std::to_string(kernel_search_length)
                            + " yields a verified free tuple");
    }
    return *result;
  }

  std::vector<Word> density_witness_free_group(std::uint32_t                         rank,
                                               std::vector<CosetNeighborhood> const& constraints,
                                               std::uint32_t                         total_rank,
                                               std::size_t                           h_search_length) {
    if (rank == 0 || total_rank < rank || constraints.size() > rank) {
      throw InvalidArgument("need total_rank >= rank >= number of constraints, rank >= 1");
    }
    for (auto const& u : constraints) {
      if (u.quotient().rank() != rank) {
        throw RankMismatch("constraint quotient of rank " + std::to_string(u.quotient().rank())
                           + " for a rank " + std::to_string(rank) + " group");
      }
    }
    if (constraints.empty()) {
      std::vector<Word> basis;
      for (std::uint32_t i = 0; i < total_rank; ++i) {
        basis.push_back(Word::generator(i, total_rank));
      }
      return basis;
    }

    std::vector<Word> core;
    if (rank == 1) {
      // Any nontrivial element freely generates; take the first one in the coset.
      CosetNeighborhood const& u = constraints.front();
      FinPerm const  a     = u.quotient().images()[0];
      FinPerm const  a_inv = invert(a);
      FinPerm        up(a.degree());
      FinPerm        down(a.degree());
      std::uint64_t const order = perm_order(a);
      for (std::uint64_t j = 1; j <= order && core.empty(); ++j) {
        up   = compose(up, a);
        down = compose(down, a_inv);
        if (up == u.target()) {
          core.push_back(power(Word::generator(0, 1), static_cast<std::int64_t>(j)));
        } else if (down == u.target()) {
          core.push_back(power(Word::generator(0, 1), -static_cast<std::int64_t>(j)));
        }
      }
      if (core.empty()) {
        throw EmptyNeighborhood("no nontrivial word in the coset of " + to_cycle_string(u.target()));
      }
    } else {
      std::vector<FinCaseTarget> targets;
      for (std::uint32_t i = 0; i < rank; ++i) {
        CosetNeighborhood u = i < constraints.size()
                                  ? constraints[i]
                                  : CosetNeighborhood::kernel(FiniteQuotient::trivial(rank));
        Word g = u.representative();
        targets.push_back({std::move(g), std::move(u)});
      }
      // Padding entries come from the trivial neighbourhood and keep the
      // tuple at full rank, so only generators >= rank are fresh below.
      core = fin_case_perturb(targets, h_search_length).f;
    }
    std::vector<Word> lifted;
    for (Word const& w : core) {
      lifted.push_back(lift(w, total_rank));
    }
    return extend_with_fresh(lifted, total_rank, total_rank);
  }

  std::vector<Word> countable_extension(std::span<Word const> free_tuple, std::uint32_t k) {
    if (free_tuple.size() < 3 || !is_free_basis(free_tuple)) {
      throw NotFreeBasis("countable_extension needs a free basis of at least three words");
    }
    std::size_t const       n = free_tuple.size() - 2;
    std::vector<Word> const ab{free_tuple[n], free_tuple[n + 1]};
    std::vector<Word>       out(free_tuple.begin(), free_tuple.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::uint32_t j = 1; j <= k; ++j) {
      out.push_back(substitute(f2_embed(j), ab));
    }
    return out;
  }

}  // namespace libredense
