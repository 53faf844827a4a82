#pragma once

// Reduction machinery on remote-form items that keeps track of where each
// root item came from. Shared by the reducer and the equational normalizer.

#include <vector>

#include "coill/reduce.hpp"

namespace coill::detail {

struct Tracked {
  VarName var;
  std::vector<Term> items;  // remote form, arbitrary order
  std::vector<int> tags;    // origin of each root item, -1 for new ones
};

Tracked track(const VarName& var, const std::vector<Term>& local_items);
std::vector<Term> local_items(const Tracked& t);

struct Found {
  Redex redex;
  Term remote;
};

std::vector<Found> find_tracked(const Tracked& t);
void apply_tracked(Tracked& t, const Found& f);
/// Leftmost normalization; returns the number of steps, throws FuelExhausted.
std::size_t normalize_tracked(Tracked& t, std::size_t fuel);

/// The items of the node at `boxes` (root items or a box's stored ++ guarded).
std::vector<Term> node_items(const Tracked& t, const std::vector<std::size_t>& boxes);

/// Remote form of the variable of the node at `boxes`.
Term node_variable(const Tracked& t, const std::vector<std::size_t>& boxes);

/// Rewrite the node at `boxes`. `edit` may remove or add p-term items; the
/// m-term items of a box node must keep their number and order. Tags are
/// passed only for the root node and must be kept aligned with the items.
using NodeEdit = std::function<void(std::vector<Term>& items, std::vector<int>* tags)>;
void edit_node(Tracked& t, const std::vector<std::size_t>& boxes, const NodeEdit& edit);

/// Apply a replacement map to every item.
void replace_everywhere(Tracked& t, const TermMap& map);

/// Visit every node (root first, preorder) with its box path.
void for_each_node(const Tracked& t,
                   const std::function<void(const std::vector<std::size_t>&,
                                            const std::vector<Term>&)>& f);

}  // namespace coill::detail
