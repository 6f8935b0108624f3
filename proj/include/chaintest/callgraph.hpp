#pragma once

#include "chaintest/facts.hpp"
#include "chaintest/hierarchy.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace chaintest {

/// Metadata maps collected in one pass over the facts. classVis and ctors
/// cover every class; methodVis covers every declared method; impls maps a
/// supertype to the public non-abstract classes that directly declare it as
/// superclass or interface.
struct MetadataMaps {
    std::map<TypeName, Visibility> class_vis;
    std::map<MethodRef, Visibility> method_vis;
    std::map<TypeName, std::vector<ConstructorInfo>> ctors;
    std::map<TypeName, std::set<TypeName>> impls;
    /// Companion to class_vis: whether the class is declared abstract (or is
    /// an interface). Needed by the path filter alongside visibility.
    std::map<TypeName, bool> class_abstract;
};

/// Call graph over declared, non-abstract methods. Edges are kept sorted by
/// (caller, callee) so identical facts always produce identical iteration
/// order.
struct CallGraph {
    std::vector<std::pair<MethodRef, MethodRef>> edges;
    /// All methods reachable from the roots (roots included), plus resolved
    /// callees; superset of every edge endpoint.
    std::set<MethodRef> nodes;
    /// Call sites that resolved to nothing (external owner, or no concrete
    /// implementation in scope). Diagnostics only.
    std::size_t unresolved_call_sites = 0;
};

/// Root and target sets for one analysis: entry points and the focal-name
/// overload set.
struct AnalysisSeed {
    std::set<MethodRef> roots;
    std::set<MethodRef> targets;
};

MetadataMaps collect_metadata(const ProgramFacts& facts);

/// Entry points: every non-abstract public method whose owner is a public,
/// non-abstract class.
std::set<MethodRef> compute_entry_points(const ProgramFacts& facts, const MetadataMaps& maps);

/// All methods declared on the focal class whose name matches, regardless of
/// params, visibility, or abstractness. Throws UnknownClassError /
/// NoSuchMethodError.
std::set<MethodRef> collect_target_overloads(const ProgramFacts& facts, const TypeName& focalClass,
                                             const std::string& focalName);

/// CHA construction restricted to methods forward-reachable from `roots`.
/// Per call site: static/special dispatch through the owner's superclass
/// walk; virtual/interface dispatch through every concrete subtype of the
/// owner. Sites that resolve to nothing are tallied, never fatal.
CallGraph build_call_graph(const ProgramFacts& facts, const ClassHierarchy& hierarchy,
                           const std::set<MethodRef>& roots);

} // namespace chaintest
