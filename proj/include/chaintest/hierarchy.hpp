#pragma once

#include "chaintest/facts.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace chaintest {

/// Identifies one declared method: the owning class plus name and parameter
/// types. Ordering is lexicographic on (owner, name, params) so that sets and
/// maps keyed by MethodRef iterate deterministically.
struct MethodRef {
    TypeName owner;
    std::string name;
    std::vector<TypeName> params;

    auto operator<=>(const MethodRef&) const = default;
};

/// Canonical one-line form: `owner#name(param1,param2)`, no spaces.
std::string to_text(const MethodRef& ref);

/// Class-hierarchy facts derived from a ProgramFacts snapshot. All maps are
/// keyed by fully-qualified class name and only contain classes present in
/// the facts; supertypes outside the facts are ignored.
struct ClassHierarchy {
    /// Direct declared supertypes (superclass plus interfaces), in-facts only.
    std::map<TypeName, std::vector<TypeName>> direct_supertypes;
    /// All in-facts classes that transitively derive from the key. The key
    /// itself is not a member.
    std::map<TypeName, std::set<TypeName>> subtypes;
    /// Non-abstract members of subtypes[key]; the key itself is included when
    /// it is non-abstract.
    std::map<TypeName, std::set<TypeName>> concrete_subtypes;
};

/// Builds hierarchy maps from the facts. Throws CyclicHierarchyError when the
/// declared supertype edges contain a cycle, and UnknownClassError is never
/// raised here: references to classes outside the facts are treated as
/// external and simply dropped from the maps.
ClassHierarchy build_hierarchy(const ProgramFacts& facts);

/// Resolves the concrete method a call on `receiver` dispatches to: walks the
/// receiver's superclass chain (not interfaces) looking for a declared,
/// non-abstract method with the given name and exact parameter types. Returns
/// the declaring class's MethodRef, or nothing when the walk runs off the top
/// of the in-facts hierarchy without a match. Throws UnknownReceiverError when
/// `receiver` itself is not in the facts.
std::optional<MethodRef> lookup_dispatch(const ProgramFacts& facts, const ClassHierarchy& hierarchy,
                                         const TypeName& receiver, const std::string& name,
                                         const std::vector<TypeName>& params);

} // namespace chaintest
