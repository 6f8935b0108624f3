#pragma once

#include "chaintest/callgraph.hpp"
#include "chaintest/hierarchy.hpp"

#include <set>
#include <vector>

namespace chaintest {

/// One call path: first element is an entry point, last element a target
/// method, consecutive pairs are call-graph edges, and no method repeats.
struct CallPath {
    std::vector<MethodRef> methods;

    auto operator<=>(const CallPath&) const = default;
};

/// Canonical order over paths: shorter first, then lexicographic by the
/// canonical method texts. Total, so sorting is deterministic.
bool canonical_path_less(const CallPath& a, const CallPath& b);

/// Paths in canonical order, no duplicates.
struct PathSet {
    std::vector<CallPath> paths;

    bool operator==(const PathSet&) const = default;
};

/// Least fixpoint of "can reach a target through forward edges": targets
/// themselves plus every method with a callee already in the set.
std::set<MethodRef> backward_reachable(const CallGraph& graph, const std::set<MethodRef>& targets);

/// Depth-limited DFS path enumeration. Emits every simple path from a root
/// to a target with at most d_max edges; a root that is itself a target
/// contributes the singleton path. The visited set lives on the current path
/// only, so all simple paths are found. `prune` disables the backward
/// reachability cut for differential testing; the result is identical either
/// way.
PathSet extract_call_paths(const CallGraph& graph, const std::set<MethodRef>& roots,
                           const std::set<MethodRef>& targets, int d_max, bool prune = true);

} // namespace chaintest
