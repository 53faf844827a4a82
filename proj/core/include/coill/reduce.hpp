#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "coill/context.hpp"

namespace coill {

enum class RedexKind {
  LocalPostpConnect,
  LocalCasel,
  LocalCaser,
  PostpMkc,
  StoreDereliction,
  StoreWeakening,
  StoreContraction,
};

std::string_view redex_kind_name(RedexKind kind);

/// Address of a subterm: a chain of store boxes from the root node, then a
/// component of the innermost node (stored terms first, then guarded terms),
/// then a child-index path inside that component.
struct Site {
  std::vector<std::size_t> boxes;
  std::size_t component = 0;
  std::vector<std::size_t> path;

  friend bool operator==(const Site&, const Site&) = default;
};

std::string print_site(const Site& s);

struct Redex {
  RedexKind kind;
  Site site;

  friend bool operator==(const Redex&, const Redex&) = default;
};

/// Redexes in box-tree preorder, then component order, then subterm path.
/// Copies of one redex reached through remote occurrences are reported once.
std::vector<Redex> find_redexes(const ComputationalContext& c);

/// Throws StaleRedex when r is not a redex of c.
ComputationalContext reduce_once(const ComputationalContext& c, const Redex& r);

struct TraceStep {
  Redex redex;
  ComputationalContext before;
  ComputationalContext after;
};

using Trace = std::vector<TraceStep>;

/// Picks one of the (non-empty) redexes of the current context.
using RedexChooser =
    std::function<std::size_t(const ComputationalContext&, const std::vector<Redex>&)>;

/// Always the first redex.
RedexChooser leftmost_strategy();
/// Follows the given choice indices, then falls back to leftmost.
RedexChooser scripted_strategy(std::vector<std::size_t> choices);

struct NormalizeResult {
  ComputationalContext context;
  Trace trace;
};

class FuelExhausted : public Error {
 public:
  FuelExhausted(std::size_t fuel, Trace trace);
  const Trace& trace() const { return trace_; }

 private:
  Trace trace_;
};

inline constexpr std::size_t kDefaultFuel = 1000;

NormalizeResult normalize(const ComputationalContext& c, std::size_t fuel = kDefaultFuel,
                          const RedexChooser& strategy = leftmost_strategy());

/// One JSON object per line: {step, kind, site, before, after}.
std::string trace_to_jsonl(const Trace& trace);

}  // namespace coill
