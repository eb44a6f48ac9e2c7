// One line per acceptance criterion: PASS or FAIL, a short measurement, and
// the wall time against its budget. Exit status is nonzero if any line fails.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>

#include "libredense/freetop.hpp"
#include "libredense/freeword.hpp"
#include "libredense/harness.hpp"
#include "libredense/oracle.hpp"
#include "libredense/perm.hpp"
#include "libredense/product.hpp"
#include "libredense/stallings.hpp"

using namespace libredense;

namespace {

  struct Outcome {
    bool        pass = false;
    std::string detail;
  };

  Word random_word(std::uint32_t rank, std::size_t max_len, Rng& rng) {
    std::vector<Letter> raw(rng.below(max_len + 1));
    for (auto& l : raw) {
      l = Letter::from_key(static_cast<std::uint32_t>(rng.below(2 * rank)));
    }
    return reduce(raw, rank);
  }

  std::vector<FinPerm> all_perms(std::uint32_t degree) {
    std::vector<std::uint32_t> images(degree);
    std::iota(images.begin(), images.end(), 1U);
    std::vector<FinPerm> out;
    do {
      out.push_back(FinPerm::from_images(images));
    } while (std::next_permutation(images.begin(), images.end()));
    return out;
  }

  // Evaluates w by following points, without the library's word evaluator.
  bool vanishes_pointwise(Word const& w, std::vector<FinPerm> const& tuple) {
    std::uint32_t const degree = tuple.front().degree();
    std::vector<FinPerm> inverses;
    for (FinPerm const& f : tuple) {
      inverses.push_back(invert(f));
    }
    for (std::uint32_t x = 1; x <= degree; ++x) {
      std::uint32_t y = x;
      // w = l1 ... lk acts as l1(l2(...lk(x)))
      for (std::size_t i = w.length(); i-- > 0;) {
        Letter const l = w[i];
        y              = l.sign() > 0 ? tuple[l.index()](y) : inverses[l.index()](y);
      }
      if (y != x) {
        return false;
      }
    }
    return true;
  }

  std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", x);
    return buf;
  }

  Outcome oracle_equivalence() {
    std::size_t agree = 0;
    std::size_t total = 0;
    std::size_t same_witness = 0;
    FinPermCarrier const c4{4};
    auto const           s4 = all_perms(4);
    for (FinPerm const& a : s4) {
      for (FinPerm const& b : s4) {
        std::vector<FinPerm> const t{a, b};
        auto const                 fast  = l_free_check(t, 6, c4);
        auto const                 naive = l_free_naive(t, 6, c4);
        agree += fast.free() == naive.free() ? 1 : 0;
        same_witness += fast == naive ? 1 : 0;
        ++total;
      }
    }
    Rng                  rng(20240601);
    FinPermCarrier const c6{6};
    for (int i = 0; i < 200; ++i) {
      std::vector<FinPerm> t;
      for (int k = 0; k < 3; ++k) {
        t.push_back(random_fin_perm(6, rng));
      }
      auto const fast  = l_free_check(t, 5, c6);
      auto const naive = l_free_naive(t, 5, c6);
      agree += fast.free() == naive.free() ? 1 : 0;
      same_witness += fast == naive ? 1 : 0;
      ++total;
    }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total)
                                + " outcomes agree, " + std::to_string(same_witness)
                                + " identical witnesses"};
  }

  Outcome stallings_soundness() {
    Rng         rng(7);
    std::size_t moved_free = 0;
    std::size_t planted_rejected = 0;
    std::size_t symbolic_ok = 0;
    for (int t = 0; t < 200; ++t) {
      std::uint32_t const rank = 1 + static_cast<std::uint32_t>(rng.below(4));
      std::vector<Word>   words;
      for (std::uint32_t i = 0; i < rank; ++i) {
        words.push_back(Word::generator(i, rank));
      }
      std::size_t const moves = rng.below(11);
      for (std::size_t k = 0; k < moves; ++k) {
        std::size_t const i = rng.below(rank);
        if (rank == 1 || rng.below(3) == 0) {
          words[i] = invert(words[i]);
          continue;
        }
        std::size_t j = rng.below(rank - 1);
        j += j >= i ? 1 : 0;
        Word const other = rng.below(2) == 0 ? words[j] : invert(words[j]);
        words[i]         = rng.below(2) == 0 ? words[i] * other : other * words[i];
      }
      bool const free = is_free_basis(words);
      moved_free += free ? 1 : 0;
      if (free && l_free_check(words, 12, WordCarrier{rank}).free()) {
        ++symbolic_ok;
      }
    }
    for (int t = 0; t < 200; ++t) {
      std::uint32_t const rank = 2 + static_cast<std::uint32_t>(rng.below(3));
      std::vector<Word>   words;
      for (std::uint32_t i = 0; i < rank; ++i) {
        words.push_back(random_word(rank, 4, rng));
        while (words.back().empty()) {
          words.back() = random_word(rank, 4, rng);
        }
      }
      std::size_t const victim = rng.below(rank);
      Word              product = Word::identity(rank);
      while (product.empty()) {
        for (std::size_t j = 0; j < rank; ++j) {
          if (j != victim && rng.below(2) == 0) {
            product = product * power(words[j], rng.below(2) == 0 ? 1 : -1);
          }
        }
      }
      words[victim] = product;
      planted_rejected += is_free_basis(words) ? 0 : 1;
    }
    bool const pass = moved_free == 200 && planted_rejected == 200 && symbolic_ok == moved_free;
    return {pass, "nielsen " + std::to_string(moved_free) + "/200, planted rejected "
                      + std::to_string(planted_rejected) + "/200, L=12 free "
                      + std::to_string(symbolic_ok) + "/" + std::to_string(moved_free)};
  }

  Outcome pair_criterion() {
    std::vector<Word> words;
    for (Word const& w : enumerate_words(2, 4, EnumerationMode::all_reduced)) {
      if (!w.empty()) {
        words.push_back(w);
      }
    }
    std::size_t pairs          = 0;
    std::size_t agree          = 0;
    std::size_t library_agrees = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t j = 0; j < words.size(); ++j) {
        if (i == j) {
          continue;
        }
        std::vector<Word> const pair{words[i], words[j]};
        bool const commuting = words[i] * words[j] == words[j] * words[i];
        agree += is_free_basis(pair) == !commuting ? 1 : 0;
        library_agrees += commute(words[i], words[j]) == commuting ? 1 : 0;
        ++pairs;
      }
    }
    return {agree == pairs && library_agrees == pairs,
            std::to_string(agree) + "/" + std::to_string(pairs)
                + " pairs, commute() agrees on " + std::to_string(library_agrees)};
  }

  Outcome fin_case() {
    Rng         rng(99);
    std::size_t ok = 0;
    std::string first_failure;
    for (int t = 0; t < 200; ++t) {
      std::uint32_t const  degree = 2 + static_cast<std::uint32_t>(rng.below(2));
      FiniteQuotient const q(2, degree, {random_fin_perm(degree, rng), random_fin_perm(degree, rng)});
      std::size_t const          n = 1 + rng.below(3);
      std::vector<FinCaseTarget> targets;
      for (std::size_t i = 0; i < n; ++i) {
        Word const g = random_word(2, 3, rng);
        targets.push_back({g, CosetNeighborhood::around(q, g)});
      }
      try {
        FinCaseResult const r  = fin_case_perturb(targets, 8);
        bool                in = r.f.size() == n;
        for (std::size_t i = 0; in && i < n; ++i) {
          in = quotient_apply(q, r.f[i]) == quotient_apply(q, targets[i].g);
        }
        if (in && is_free_basis(r.f)) {
          ++ok;
        } else if (first_failure.empty()) {
          first_failure = " (first failure: instance " + std::to_string(t) + ")";
        }
      } catch (Error const& e) {
        if (first_failure.empty()) {
          first_failure = " (first failure: " + std::string(e.what()) + ")";
        }
      }
    }
    return {ok == 200, std::to_string(ok) + "/200 verified" + first_failure};
  }

  Outcome product_density() {
    ProfilePtr const  profile = make_profile({2, 3, 4, 12, 12, 12}, 3);
    DenseFamily const family  = prod_main_family(profile, 4);

    // every box on at most two of the three visible coordinates
    std::vector<std::vector<FinPerm>> perms{all_perms(2), all_perms(3), all_perms(4)};
    std::size_t                       boxes = 0;
    std::size_t                       hits  = 0;
    auto visit = [&](ProductBox const& box) {
      ++boxes;
      hits += box_member(dense_witness(family, box), box) ? 1 : 0;
    };
    visit({});
    for (std::size_t a = 0; a < 3; ++a) {
      for (FinPerm const& f : perms[a]) {
        visit({{a, f}});
        for (std::size_t b = a + 1; b < 3; ++b) {
          for (FinPerm const& g : perms[b]) {
            visit({{a, f}, {b, g}});
          }
        }
      }
    }

    auto const          members = family.members();
    std::size_t const   n       = members.size();
    ProductCarrier const carrier{profile};
    std::size_t         checked = 0;
    std::size_t         free    = 0;
    std::vector<ProductElement> t;
    for (std::size_t i = 0; i < n; ++i) {
      t.assign({members[i]});
      free += l_free_check(t, 4, carrier).free() ? 1 : 0;
      ++checked;
      for (std::size_t j = i + 1; j < n; ++j) {
        t.assign({members[i], members[j]});
        free += l_free_check(t, 4, carrier).free() ? 1 : 0;
        ++checked;
        for (std::size_t k = j + 1; k < n; ++k) {
          t.assign({members[i], members[j], members[k]});
          free += l_free_check(t, 4, carrier).free() ? 1 : 0;
          ++checked;
        }
      }
    }
    bool const pass = hits == boxes && boxes == 1 + 2 + 6 + 24 + 12 + 48 + 144 && free == checked;
    return {pass, std::to_string(hits) + "/" + std::to_string(boxes) + " boxes hit, "
                      + std::to_string(free) + "/" + std::to_string(checked)
                      + " subsets 4-free, family of " + std::to_string(n)};
  }

  Outcome prod1_soundness() {
    std::size_t words = 0;
    std::size_t ok    = 0;
    for (std::uint32_t rank = 1; rank <= 2; ++rank) {
      for (Word const& w : enumerate_words(rank, 5, EnumerationMode::cyclic_classes)) {
        if (w.empty()) {
          continue;
        }
        Prod1Witness const p = prod1_witness(w);
        bool const nontrivial = !evaluate_word(w, p.tuple, FinPermCarrier{p.degree}).is_identity();
        ok += nontrivial && !vanishes_pointwise(w, p.tuple) ? 1 : 0;
        ++words;
      }
    }
    return {ok == words, std::to_string(ok) + "/" + std::to_string(words) + " class words"};
  }

  // d(f, g) = 2^-k with k the first point where f or f^-1 differs from g or
  // g^-1, so agreement on {1..n} is d < 2^-n. The non-strict d <= 2^-n only
  // gives agreement on {1..n-1}; both forms are counted.
  Outcome metric_topology() {
    std::vector<SuppPerm> perms;
    for (FinPerm const& f : all_perms(4)) {
      perms.push_back(SuppPerm::from_fin_perm(f));
    }
    std::size_t checks       = 0;
    std::size_t strict_agree = 0;
    std::size_t loose_agree  = 0;
    for (SuppPerm const& f : perms) {
      SuppPerm const fi = invert(f);
      for (SuppPerm const& g : perms) {
        SuppPerm const gi = invert(g);
        Dyadic const   d  = metric_d(f, g);
        for (std::uint64_t n = 1; n <= 4; ++n) {
          auto agree_on = [&](std::uint64_t upto) {
            bool match = true;
            for (std::uint64_t x = 1; x <= upto; ++x) {
              match = match && f(x) == g(x) && fi(x) == gi(x);
            }
            return match;
          };
          strict_agree += (d < Dyadic{false, n}) == agree_on(n) ? 1 : 0;
          loose_agree += (d <= Dyadic{false, n}) == agree_on(n - 1) ? 1 : 0;
          ++checks;
        }
      }
    }
    return {strict_agree == checks && loose_agree == checks,
            "d < 2^-n iff agreement on {1..n}: " + std::to_string(strict_agree) + "/"
                + std::to_string(checks) + "; d <= 2^-n iff agreement on {1..n-1}: "
                + std::to_string(loose_agree) + "/" + std::to_string(checks)};
  }

  Outcome product_relation() {
    std::vector<Word> words;
    for (Word const& w : enumerate_words(2, 3, EnumerationMode::all_reduced)) {
      if (!w.empty()) {
        words.push_back(w);
      }
    }
    std::vector<std::vector<FinPerm>> pairs;
    for (FinPerm const& a : all_perms(3)) {
      for (FinPerm const& b : all_perms(3)) {
        pairs.push_back({a, b});
      }
    }
    // satisfying[i]: the pairs in S_3 x S_3 on which words[i] vanishes
    std::vector<std::vector<std::size_t>> satisfying(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        if (vanishes_pointwise(words[i], pairs[p])) {
          satisfying[i].push_back(p);
        }
      }
    }
    ProfilePtr const     s3xs3 = make_profile({3, 3});
    ProductCarrier const carrier{s3xs3};
    std::size_t          good  = 0;
    std::size_t          evals = 0;
    for (std::size_t i = 0; i < words.size(); ++i) {
      for (std::size_t j = 0; j < words.size(); ++j) {
        Word const c  = combine_product_relation(words[i], words[j]);
        bool       ok = !c.empty();
        for (std::size_t p : satisfying[i]) {
          for (std::size_t q : satisfying[j]) {
            std::vector<ProductElement> tuple(2, ProductElement(s3xs3));
            for (std::size_t k = 0; k < 2; ++k) {
              tuple[k].set_coordinate(0, pairs[p][k]);
              tuple[k].set_coordinate(1, pairs[q][k]);
            }
            ok = ok && evaluate_word(c, tuple, carrier).is_identity();
            ++evals;
          }
        }
        good += ok ? 1 : 0;
      }
    }
    std::size_t const total = words.size() * words.size();
    return {good == total, std::to_string(good) + "/" + std::to_string(total) + " pairs, "
                               + std::to_string(evals) + " paired tuples"};
  }

  Outcome countable() {
    std::vector<Word> basis;
    for (std::uint32_t i = 0; i < 3; ++i) {
      basis.push_back(Word::generator(i, 3));
    }
    auto const        extended = countable_extension(basis, 6);
    std::vector<Word> h;
    for (std::uint32_t i = 1; i <= 6; ++i) {
      h.push_back(f2_embed(i));
    }
    bool const a = is_free_basis(extended);
    bool const b = is_free_basis(h);
    return {a && b, std::string("extension ") + (a ? "free" : "not free") + " ("
                        + std::to_string(extended.size()) + " words), f2 family "
                        + (b ? "free" : "not free")};
  }

  Outcome dixon_trend() {
    std::vector<double> fractions;
    for (std::uint32_t m : {10U, 50U, 200U}) {
      ExperimentConfig c;
      c.group        = GroupSpec::parse("sym:" + std::to_string(m));
      c.tuple_size   = 2;
      c.word_bound   = 6;
      c.sample_count = 1000;
      c.seed         = 2024;
      fractions.push_back(dixon_sample(c).fraction());
    }
    bool pass = true;
    for (std::size_t i = 1; i < fractions.size(); ++i) {
      pass = pass && fractions[i] + 0.05 >= fractions[i - 1] && fractions[i] >= fractions[0];
    }
    return {pass, "L-free fraction m=10: " + fmt(fractions[0]) + ", m=50: " + fmt(fractions[1])
                      + ", m=200: " + fmt(fractions[2]) + " (empirical, not a theorem)"};
  }

  struct Criterion {
    int                      id;
    std::string              name;
    double                   budget_seconds;
    std::function<Outcome()> run;
  };

}  // namespace

// With arguments, only the listed criterion numbers run.
int main(int argc, char** argv) {
  std::vector<Criterion> const criteria{
      {1, "oracle equivalence", 120, oracle_equivalence},
      {2, "stallings soundness", 120, stallings_soundness},
      {3, "pair criterion", 60, pair_criterion},
      {4, "fin-case construction", 180, fin_case},
      {5, "product density", 300, product_density},
      {6, "prod1 soundness", 60, prod1_soundness},
      {7, "metric topology", 60, metric_topology},
      {8, "product relation", 180, product_relation},
      {9, "countable extension", 10, countable},
      {10, "dixon trend", 120, dixon_trend},
  };
  int failures = 0;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    only.push_back(std::stoi(argv[i]));
  }
  for (Criterion const& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) {
      continue;
    }
    auto const start = std::chrono::steady_clock::now();
    Outcome    out;
    try {
      out = c.run();
    } catch (std::exception const& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    double const secs
        = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    bool const pass = out.pass && secs <= c.budget_seconds;
    failures += pass ? 0 : 1;
    std::cout << (pass ? "PASS" : "FAIL") << " criterion " << c.id << " " << c.name << ": "
              << out.detail << " [" << fmt(secs) << " s of " << c.budget_seconds << " s]"
              << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
