#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "coill/typing.hpp"

namespace coill {

inline constexpr unsigned kMaxUniverse = 16;

struct Universe {
  unsigned size = 1;

  explicit Universe(unsigned n);
  std::uint32_t all() const { return (std::uint32_t{1} << size) - 1; }
};

/// A set of universe points, bit i standing for point i.
struct Event {
  std::uint32_t bits = 0;

  static Event of(std::initializer_list<unsigned> points);
  static Event from_points(const std::vector<unsigned>& points);
  std::vector<unsigned> points() const;
  bool empty() const { return bits == 0; }
  bool subset_of(Event o) const { return (bits & ~o.bits) == 0; }
  unsigned count() const;

  friend Event operator&(Event a, Event b) { return {a.bits & b.bits}; }
  friend Event operator|(Event a, Event b) { return {a.bits | b.bits}; }
  friend bool operator==(Event, Event) = default;
};

std::string print_event(Event e);

/// Events indexed by judgement occurrence. For the node at path p (as given
/// by for_each_node): "p/ant" is the antecedent, "p/s<i>" the i-th succedent
/// slot and "p/c<i>" the i-th control term.
struct Assignment {
  Universe universe{1};
  std::map<std::string, Event> events;

  Event complement(Event e) const { return {universe.all() & ~e.bits}; }
  /// Missing keys read as the empty event.
  Event at(const std::string& key) const;
};

std::string ant_key(std::string_view path);
std::string slot_key(std::string_view path, std::size_t i);
std::string control_key(std::string_view path, std::size_t i);

/// True when every node uses only axiom, cut, subtraction and par rules.
bool is_multiplicative(const Derivation& d);

/// Every constraint row at every node; issue codes name the violated row.
CheckReport check_assignment(const Derivation& d, const Assignment& a);

enum class ParSplit { KeepLeft, KeepRight };

/// The disjoint sub-events of the conclusion's succedent slots. Throws
/// NotMultiplicative or AssignmentInvalid.
std::vector<Event> decompose(const Derivation& d, const Assignment& a,
                             ParSplit split = ParSplit::KeepLeft);

/// Decomposes and checks inclusion, pairwise disjointness and coverage.
bool verify_decomposition(const Derivation& d, const Assignment& a,
                          ParSplit split = ParSplit::KeepLeft);

/// Deterministic per seed; the result always passes check_assignment.
Assignment random_assignment(const Derivation& d, Universe u, std::uint64_t seed);

std::string assignment_to_json(const Assignment& a);
Assignment assignment_from_json(std::string_view text);

struct SweepResult {
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::vector<std::uint64_t> failing_seeds;
};

/// Seeds seed, seed+1, ... with universe sizes cycling through [min_u, max_u].
SweepResult sweep(const Derivation& d, unsigned min_u, unsigned max_u, std::uint64_t seed,
                  std::size_t trials, unsigned jobs = 1);

}  // namespace coill
