#ifndef PGMSYM_PERMGROUP_HPP
#define PGMSYM_PERMGROUP_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "pgmsym/errors.hpp"

namespace pgmsym {

inline constexpr std::uint64_t kDefaultOrbitCap = 100000;
inline constexpr std::uint64_t kDefaultClosureCap = 100000;

// Bijection of {0..n-1} stored as an image table.
class Permutation {
public:
  Permutation() = default;
  explicit Permutation(std::vector<int> image) : image_(std::move(image)) {
    std::vector<char> seen(image_.size(), 0);
    for (int v : image_) {
      if (v < 0 || v >= static_cast<int>(image_.size()) || seen[static_cast<std::size_t>(v)])
        throw InvalidPermutation("image table is not a bijection");
      seen[static_cast<std::size_t>(v)] = 1;
    }
  }

  static Permutation identity(int n) {
    std::vector<int> im(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) im[static_cast<std::size_t>(i)] = i;
    return Permutation(std::move(im));
  }

  int size() const { return static_cast<int>(image_.size()); }
  int operator()(int x) const { return image_[static_cast<std::size_t>(x)]; }
  const std::vector<int>& image() const { return image_; }

  bool is_identity() const {
    for (int i = 0; i < size(); ++i)
      if (image_[static_cast<std::size_t>(i)] != i) return false;
    return true;
  }

  friend bool operator==(const Permutation& a, const Permutation& b) { return a.image_ == b.image_; }
  friend bool operator<(const Permutation& a, const Permutation& b) { return a.image_ < b.image_; }

private:
  std::vector<int> image_;
};

// (p o q)(x) = p(q(x))
inline Permutation compose(const Permutation& p, const Permutation& q) {
  if (p.size() != q.size()) throw SizeMismatch("composing permutations of different ground sets");
  std::vector<int> im(static_cast<std::size_t>(p.size()));
  for (int x = 0; x < p.size(); ++x) im[static_cast<std::size_t>(x)] = p(q(x));
  return Permutation(std::move(im));
}

inline Permutation inverse(const Permutation& p) {
  std::vector<int> im(static_cast<std::size_t>(p.size()));
  for (int x = 0; x < p.size(); ++x) im[static_cast<std::size_t>(p(x))] = x;
  return Permutation(std::move(im));
}

struct GeneratorSet {
  int ground_size = 0;
  std::vector<Permutation> generators;  // identity omitted

  void check() const {
    for (const Permutation& g : generators)
      if (g.size() != ground_size) throw SizeMismatch("generator ground set mismatch");
  }
};

// BFS closure of a point under the generators, returned sorted.
inline std::vector<int> orbit_of_point(const GeneratorSet& gens, int x,
                                       std::uint64_t cap = kDefaultOrbitCap) {
  if (x < 0 || x >= gens.ground_size) throw ValidationError("orbit seed outside ground set");
  std::vector<char> seen(static_cast<std::size_t>(gens.ground_size), 0);
  std::vector<int> queue{x};
  seen[static_cast<std::size_t>(x)] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int y = queue[head];
    for (const Permutation& g : gens.generators) {
      const int z = g(y);
      if (!seen[static_cast<std::size_t>(z)]) {
        if (queue.size() + 1 > cap) throw OrbitCapExceeded("orbit exceeds cap of " + std::to_string(cap));
        seen[static_cast<std::size_t>(z)] = 1;
        queue.push_back(z);
      }
    }
  }
  std::sort(queue.begin(), queue.end());
  return queue;
}

// Orbits of every ground point; together they partition the ground set.
inline std::vector<std::vector<int>> orbit_partition(const GeneratorSet& gens,
                                                     std::uint64_t cap = kDefaultOrbitCap) {
  std::vector<std::vector<int>> orbits;
  std::vector<char> done(static_cast<std::size_t>(gens.ground_size), 0);
  for (int x = 0; x < gens.ground_size; ++x) {
    if (done[static_cast<std::size_t>(x)]) continue;
    std::vector<int> orb = orbit_of_point(gens, x, cap);
    for (int y : orb) done[static_cast<std::size_t>(y)] = 1;
    orbits.push_back(std::move(orb));
  }
  return orbits;
}

// Every group element reachable as a product of generators, identity included.
inline std::vector<Permutation> group_closure(const GeneratorSet& gens,
                                              std::uint64_t cap = kDefaultClosureCap) {
  gens.check();
  std::set<Permutation> seen;
  std::deque<Permutation> queue;
  Permutation id = Permutation::identity(gens.ground_size);
  seen.insert(id);
  queue.push_back(id);
  while (!queue.empty()) {
    Permutation cur = queue.front();
    queue.pop_front();
    for (const Permutation& g : gens.generators) {
      Permutation next = compose(g, cur);
      if (seen.insert(next).second) {
        if (seen.size() > cap) throw GroupTooLarge("group order exceeds cap of " + std::to_string(cap));
        queue.push_back(std::move(next));
      }
    }
  }
  return std::vector<Permutation>(seen.begin(), seen.end());
}

// Product replacement walk over a slot list of group elements. Every slot is a
// product of generators, so every draw is a group member; after burn-in the
// draws are approximately uniform over the group. Single-owner mutable state:
// one sampler per chain.
class PraSampler {
public:
  static constexpr int kMinSlots = 10;
  static constexpr int kBurnIn = 60;

  PraSampler(const GeneratorSet& gens, std::uint64_t seed)
      : ground_(gens.ground_size), identity_(Permutation::identity(gens.ground_size)), rng_(seed) {
    gens.check();
    if (gens.generators.empty()) return;  // trivial group: next() is always identity
    const int k = static_cast<int>(gens.generators.size());
    const int r = std::max(kMinSlots, 2 * k);
    slots_.reserve(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) slots_.push_back(gens.generators[static_cast<std::size_t>(i % k)]);
    for (int i = 0; i < kBurnIn; ++i) mix();
  }

  const Permutation& next() {
    if (slots_.empty()) return identity_;
    return mix();
  }

private:
  const Permutation& mix() {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(slots_.size()) - 1);
    const int i = pick(rng_);
    int j = pick(rng_);
    while (j == i) j = pick(rng_);
    std::uniform_int_distribution<int> side(0, 1);
    if (side(rng_) == 0)
      slots_[static_cast<std::size_t>(i)] =
          compose(slots_[static_cast<std::size_t>(i)], slots_[static_cast<std::size_t>(j)]);
    else
      slots_[static_cast<std::size_t>(i)] =
          compose(slots_[static_cast<std::size_t>(j)], slots_[static_cast<std::size_t>(i)]);
    return slots_[static_cast<std::size_t>(i)];
  }

  int ground_ = 0;
  std::vector<Permutation> slots_;
  Permutation identity_;
  std::mt19937_64 rng_;
};

// Exact uniform draw from the BFS-enumerated orbit of x.
template <class Rng>
int uniform_orbit_element(const GeneratorSet& gens, int x, Rng& rng,
                          std::uint64_t cap = kDefaultOrbitCap) {
  const std::vector<int> orb = orbit_of_point(gens, x, cap);
  if (orb.size() == 1) return orb[0];
  std::uniform_int_distribution<std::size_t> pick(0, orb.size() - 1);
  return orb[pick(rng)];
}

// Cycle notation with caller-supplied point labels, e.g. "(a.0 b.1)(a.1 b.0)".
inline std::string cycle_notation(const Permutation& p, const std::vector<std::string>& labels) {
  std::string out;
  std::vector<char> used(static_cast<std::size_t>(p.size()), 0);
  for (int start = 0; start < p.size(); ++start) {
    if (used[static_cast<std::size_t>(start)] || p(start) == start) continue;
    out += "(";
    int x = start;
    bool first = true;
    do {
      used[static_cast<std::size_t>(x)] = 1;
      if (!first) out += " ";
      out += labels[static_cast<std::size_t>(x)];
      first = false;
      x = p(x);
    } while (x != start);
    out += ")";
  }
  if (out.empty()) out = "()";
  return out;
}

}  // namespace pgmsym

#endif
