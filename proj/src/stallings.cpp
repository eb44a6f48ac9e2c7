#include "libredense/stallings.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <random>
#include <unordered_set>

namespace libredense {

  class GraphBuilder {
   public:
    GraphBuilder(std::uint32_t rank, FoldSchedule schedule)
        : rank_(rank), schedule_(schedule) {
      if (schedule_.shuffle_seed) {
        rng_.seed(*schedule_.shuffle_seed);
      }
      new_vertex();
    }

    void add_loop(Word const& w) {
      if (w.empty()) {
        return;
      }
      std::int32_t at = 0;
      for (std::size_t i = 0; i < w.length(); ++i) {
        std::int32_t const to
            = i + 1 == w.length() ? 0 : new_vertex();
        add_edge(at, w[i], to);
        at = to;
      }
    }

    void fold() {
      while (!pending_.empty()) {
        std::size_t pick = 0;
        if (schedule_.shuffle_seed) {
          pick = static_cast<std::size_t>(rng_() % pending_.size());
        }
        auto const [a, b] = pending_[pick];
        pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
        merge(a, b);
      }
    }

    SubgroupGraph finish() {
      trim();
      // Canonical numbering: breadth first from the base, neighbours visited
      // in letter order.
      std::int32_t const      root = find(0);
      std::map<std::int32_t, std::int32_t> label;
      std::vector<std::int32_t>            order{root};
      label[root] = 0;
      for (std::size_t head = 0; head < order.size(); ++head) {
        auto const& adj = adj_[order[head]];
        for (auto const& [key, raw] : adj) {
          std::int32_t const t = find(raw);
          if (label.emplace(t, static_cast<std::int32_t>(order.size())).second) {
            order.push_back(t);
          }
        }
      }
      SubgroupGraph g;
      g.rank_ = rank_;
      g.next_.assign(order.size() * 2 * rank_, SubgroupGraph::none);
      for (std::size_t v = 0; v < order.size(); ++v) {
        for (auto const& [key, raw] : adj_[order[v]]) {
          g.next_[v * 2 * rank_ + key] = label.at(find(raw));
        }
      }
      return g;
    }

   private:
    std::int32_t new_vertex() {
      auto const id = static_cast<std::int32_t>(parent_.size());
      parent_.push_back(id);
      size_.push_back(1);
      adj_.emplace_back();
      return id;
    }

    std::int32_t find(std::int32_t v) {
      while (parent_[v] != v) {
        parent_[v] = parent_[parent_[v]];
        v          = parent_[v];
      }
      return v;
    }

    void attach(std::int32_t from, std::uint32_t key, std::int32_t to) {
      from                = find(from);
      auto [it, inserted] = adj_[from].emplace(key, to);
      if (!inserted && find(it->second) != find(to)) {
        pending_.emplace_back(it->second, to);
      }
    }

    void add_edge(std::int32_t from, Letter letter, std::int32_t to) {
      attach(from, letter.key(), to);
      attach(to, letter.inverse().key(), from);
    }

    void merge(std::int32_t a, std::int32_t b) {
      a = find(a);
      b = find(b);
      if (a == b) {
        return;
      }
      if (size_[a] < size_[b]) {
        std::swap(a, b);
      }
      parent_[b] = a;
      size_[a] += size_[b];
      auto moved = std::move(adj_[b]);
      adj_[b].clear();
      for (auto const& [key, to] : moved) {
        attach(a, key, to);
      }
    }

    void trim() {
      std::int32_t const root = find(0);
      std::deque<std::int32_t> leaves;
      for (std::int32_t v = 0; v < static_cast<std::int32_t>(parent_.size()); ++v) {
        if (find(v) == v && v != root && adj_[v].size() == 1) {
          leaves.push_back(v);
        }
      }
      while (!leaves.empty()) {
        std::int32_t const v = leaves.front();
        leaves.pop_front();
        if (adj_[v].size() != 1) {
          continue;
        }
        auto const [key, raw] = *adj_[v].begin();
        std::int32_t const t  = find(raw);
        adj_[v].clear();
        adj_[t].erase(key ^ 1U);
        if (t != root && adj_[t].size() == 1) {
          leaves.push_back(t);
        }
      }
    }

    std::uint32_t                                       rank_;
    FoldSchedule                                        schedule_;
    std::mt19937_64                                     rng_;
    std::vector<std::int32_t>                           parent_;
    std::vector<std::int32_t>                           size_;
    std::vector<std::map<std::uint32_t, std::int32_t>> adj_;
    std::deque<std::pair<std::int32_t, std::int32_t>>   pending_;
  };

  std::size_t SubgroupGraph::edge_count() const noexcept {
    std::size_t e = 0;
    for (std::size_t i = 0; i < next_.size(); i += 2) {
      e += next_[i] != none ? 1 : 0;
    }
    return e;
  }

  SubgroupGraph build_graph(std::span<Word const> words,
                            std::uint32_t         rank,
                            FoldSchedule          schedule) {
    for (Word const& w : words) {
      if (w.rank() != rank) {
        throw RankMismatch("word of rank " + std::to_string(w.rank())
                           + " in a rank " + std::to_string(rank) + " graph");
      }
    }
    GraphBuilder builder(rank, schedule);
    std::vector<std::size_t> order(words.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (schedule.shuffle_seed) {
      std::mt19937_64 rng(*schedule.shuffle_seed ^ 0x5DEECE66DULL);
      for (std::size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[rng() % i]);
      }
    }
    for (std::size_t i : order) {
      builder.add_loop(words[i]);
      if (!schedule.shuffle_seed) {
        builder.fold();
      }
    }
    builder.fold();
    return builder.finish();
  }

  std::size_t graph_rank(SubgroupGraph const& g) {
    return g.edge_count() + 1 - g.vertex_count();
  }

  bool contains(SubgroupGraph const& g, Word const& w) {
    if (w.rank() != g.rank()) {
      throw RankMismatch("membership query with mismatched rank");
    }
    std::int32_t at = static_cast<std::int32_t>(SubgroupGraph::base());
    for (Letter l : w) {
      at = g.follow(static_cast<std::size_t>(at), l);
      if (at == SubgroupGraph::none) {
        return false;
      }
    }
    return at == static_cast<std::int32_t>(SubgroupGraph::base());
  }

  bool is_free_basis(std::span<Word const> words, std::uint32_t rank) {
    std::unordered_set<Word, WordHash> seen;
    for (Word const& w : words) {
      if (w.empty() || !seen.insert(w).second) {
        return false;
      }
    }
    return graph_rank(build_graph(words, rank)) == words.size();
  }

}  // namespace libredense
