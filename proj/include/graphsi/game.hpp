#ifndef GRAPHSI_GAME_HPP
#define GRAPHSI_GAME_HPP

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "graphsi/coalition.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/gnn.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/parallel.hpp"

namespace graphsi {

/// A cooperative game: deterministic value per coalition of num_players().
template <class G>
concept Game = requires(G& g, Coalition t) {
  { g.num_players() } -> std::convertible_to<std::size_t>;
  { g.evaluate(t) } -> std::convertible_to<double>;
};

template <class G>
concept BatchGame = Game<G> && requires(G& g, std::span<const Coalition> ts) {
  { g.evaluate_batch(ts) } -> std::convertible_to<std::vector<double>>;
};

/// Evaluates many coalitions, using the game's batch path when it has one.
template <Game G>
std::vector<double> evaluate_all(G& game, std::span<const Coalition> coalitions) {
  if constexpr (BatchGame<G>) {
    return game.evaluate_batch(coalitions);
  } else {
    std::vector<double> out;
    out.reserve(coalitions.size());
    for (auto t : coalitions) out.push_back(game.evaluate(t));
    return out;
  }
}

/// Game backed by an arbitrary callable; used for synthetic games.
class FunctionGame {
 public:
  FunctionGame(std::size_t n, std::function<double(Coalition)> fn) : n_(n), fn_(std::move(fn)) {
    if (n_ > kMaxPlayers) throw InfeasibleError("games support at most 64 players");
  }
  std::size_t num_players() const { return n_; }
  double evaluate(Coalition t) const { return fn_(t); }

 private:
  std::size_t n_;
  std::function<double(Coalition)> fn_;
};

/// Thread-safe memo of coalition values with an optional LRU capacity.
///
/// insert() never overwrites a stored value. misses() counts insertions of
/// keys that were not resident, so with no capacity it equals the number of
/// distinct coalitions ever stored.
class CoalitionCache {
 public:
  explicit CoalitionCache(std::size_t capacity = 0) : capacity_(capacity) {}

  std::optional<double> find(Coalition t) {
    std::scoped_lock lock(mutex_);
    auto it = entries_.find(t);
    if (it == entries_.end()) return std::nullopt;
    if (capacity_ > 0) lru_.splice(lru_.begin(), lru_, it->second.position);
    return it->second.value;
  }

  /// Returns the resident value for t (the first one stored wins).
  double insert(Coalition t, double value) {
    std::scoped_lock lock(mutex_);
    auto it = entries_.find(t);
    if (it != entries_.end()) return it->second.value;
    Entry entry{value, {}};
    if (capacity_ > 0) {
      if (entries_.size() >= capacity_) {
        entries_.erase(lru_.back());
        lru_.pop_back();
      }
      lru_.push_front(t);
      entry.position = lru_.begin();
    }
    entries_.emplace(t, entry);
    ++misses_;
    return value;
  }

  std::size_t misses() const {
    std::scoped_lock lock(mutex_);
    return misses_;
  }
  std::size_t size() const {
    std::scoped_lock lock(mutex_);
    return entries_.size();
  }

 private:
  struct Entry {
    double value;
    std::list<Coalition>::iterator position;
  };
  std::size_t capacity_;
  mutable std::mutex mutex_;
  std::unordered_map<Coalition, Entry, CoalitionHash> entries_;
  std::list<Coalition> lru_;
  std::size_t misses_ = 0;
};

struct GameOptions {
  /// Report v(T) - v(empty) instead of v(T).
  bool normalize = false;
  /// 0 means unbounded (exact mode); otherwise LRU-evicting.
  std::size_t cache_capacity = 0;
  /// 0 means default_thread_count().
  std::size_t threads = 0;
};

/// GNN-induced graph game: v(T) is the logit of the frozen target class when
/// every node outside T has its features replaced by the baseline.
///
/// The target is the argmax of the unmasked prediction (lowest index wins
/// ties), fixed at construction. That construction pass is not a game
/// evaluation and does not count toward call_count().
class GraphGame {
 public:
  GraphGame(GnnModel model, Graph graph, std::vector<double> baseline, GameOptions options = {})
      : model_(std::move(model)),
        graph_(std::move(graph)),
        baseline_(std::move(baseline)),
        options_(options),
        cache_(options.cache_capacity) {
    if (graph_.num_nodes() > kMaxPlayers) {
      throw InfeasibleError("graph games support at most 64 nodes, graph has " +
                            std::to_string(graph_.num_nodes()));
    }
    model_.check_input(graph_.feature_dim());
    if (baseline_.size() != graph_.feature_dim()) {
      throw DimensionError("baseline has length " + std::to_string(baseline_.size()) +
                           ", expected feature width " + std::to_string(graph_.feature_dim()));
    }
    full_output_ = forward_graph(model_, graph_, graph_.features());
    target_ = static_cast<std::size_t>(
        std::distance(full_output_.begin(), std::max_element(full_output_.begin(), full_output_.end())));
    if (options_.threads == 0) options_.threads = default_thread_count();
  }

  GraphGame(const GraphGame&) = delete;
  GraphGame& operator=(const GraphGame&) = delete;

  std::size_t num_players() const { return graph_.num_nodes(); }

  double evaluate(Coalition t) {
    check(t);
    const double value = raw(t);
    return options_.normalize ? value - raw(Coalition()) : value;
  }

  /// Values in input order. Uncached coalitions are forwarded once each,
  /// possibly concurrently.
  std::vector<double> evaluate_batch(std::span<const Coalition> coalitions) {
    std::vector<Coalition> pending;
    std::unordered_set<Coalition, CoalitionHash> seen;
    if (options_.normalize && !cache_.find(Coalition())) {
      seen.insert(Coalition());
      pending.push_back(Coalition());
    }
    for (auto t : coalitions) {
      check(t);
      if (!cache_.find(t) && seen.insert(t).second) pending.push_back(t);
    }
    parallel_for(pending.size(), options_.threads, [&](std::size_t idx) {
      cache_.insert(pending[idx], forward(pending[idx]));
    });
    std::vector<double> out;
    out.reserve(coalitions.size());
    for (auto t : coalitions) out.push_back(evaluate(t));
    return out;
  }

  /// Forward passes performed so far (distinct coalitions when the cache is
  /// unbounded).
  std::size_t call_count() const { return cache_.misses(); }

  /// v(N); uses the construction-time prediction.
  double grand_value() {
    const double full = full_output_[target_];
    return options_.normalize ? full - raw(Coalition()) : full;
  }

  std::size_t target() const { return target_; }
  const std::vector<double>& full_output() const { return full_output_; }
  const GnnModel& model() const { return model_; }
  const Graph& graph() const { return graph_; }
  const std::vector<double>& baseline() const { return baseline_; }
  bool normalized() const { return options_.normalize; }
  std::size_t threads() const { return options_.threads; }

 private:
  void check(Coalition t) const {
    if (!t.fits(graph_.num_nodes())) {
      throw std::out_of_range("coalition " + to_string(t) + " exceeds " +
                              std::to_string(graph_.num_nodes()) + " players");
    }
  }

  double forward(Coalition t) const {
    return forward_graph(model_, graph_, MaskedFeatures(graph_.features(), baseline_, t))[target_];
  }

  double raw(Coalition t) {
    if (auto hit = cache_.find(t)) return *hit;
    return cache_.insert(t, forward(t));
  }

  GnnModel model_;
  Graph graph_;
  std::vector<double> baseline_;
  GameOptions options_;
  std::vector<double> full_output_;
  std::size_t target_ = 0;
  CoalitionCache cache_;
};

/// Vector-valued node game: node i's final embedding under masking.
class NodeGame {
 public:
  NodeGame(const GnnModel& model, const Graph& graph, std::vector<double> baseline, std::size_t node)
      : model_(&model), graph_(&graph), baseline_(std::move(baseline)), node_(node) {
    if (node_ >= graph.num_nodes()) throw std::out_of_range("node index out of range");
    model.check_input(graph.feature_dim());
  }

  std::size_t num_players() const { return graph_->num_nodes(); }
  std::size_t node() const { return node_; }

  std::vector<double> evaluate(Coalition t) const {
    return forward_node(*model_, *graph_, MaskedFeatures(graph_->features(), baseline_, t), node_);
  }

 private:
  const GnnModel* model_;
  const Graph* graph_;
  std::vector<double> baseline_;
  std::size_t node_;
};

}  // namespace graphsi

#endif  // GRAPHSI_GAME_HPP
