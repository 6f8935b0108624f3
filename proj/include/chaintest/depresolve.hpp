#pragma once

#include "chaintest/callgraph.hpp"
#include "chaintest/pathfinder.hpp"

#include <map>
#include <set>
#include <vector>

namespace chaintest {

/// Paths surviving the visibility filter: every method is public and owned
/// by a public, non-abstract class. Canonically ordered, capped at K_paths.
struct FilteredPathSet {
    std::vector<CallPath> paths;

    bool operator==(const FilteredPathSet&) const = default;
};

/// Classes a test must be able to construct: the focal class, the declaring
/// classes and parameter types of all filtered-path methods, closed under
/// public-constructor parameter types.
struct DependencyClosure {
    std::set<TypeName> classes;
    /// Pre-expansion members (focal class, declaring classes, parameter
    /// types). Kept so the prompt composer can fall back to a seed-only
    /// rendering under budget pressure.
    std::set<TypeName> seed;
    /// Fixpoint rounds the expansion took; bounded by the class count.
    int expansion_rounds = 0;
};

/// Public constructors per closure class, plus known implementations for
/// classes that expose no public constructor.
struct InitializationSet {
    std::map<TypeName, std::vector<ConstructorInfo>> ctors;
    std::map<TypeName, std::set<TypeName>> known_impls;
};

/// Projects each path onto its public/public-class/non-abstract methods,
/// deduplicates within the path (first occurrence wins), drops empty
/// projections, merges identical results, and truncates the canonical order
/// to the first k_paths entries.
FilteredPathSet filter_paths(const PathSet& raw, const MetadataMaps& maps, int k_paths);

/// Seed collection plus transitive expansion over public-constructor
/// parameter types. Array parameter types contribute their element type;
/// primitives and types absent from the facts never join.
DependencyClosure resolve_dependencies(const FilteredPathSet& filtered, const TypeName& focalClass,
                                       const MetadataMaps& maps);

InitializationSet build_initialization_set(const DependencyClosure& closure,
                                           const MetadataMaps& maps);

} // namespace chaintest
