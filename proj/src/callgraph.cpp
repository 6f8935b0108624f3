#include "chaintest/callgraph.hpp"

#include "chaintest/errors.hpp"

#include <algorithm>
#include <deque>

namespace chaintest {

MetadataMaps collect_metadata(const ProgramFacts& facts) {
    MetadataMaps maps;
    for (const ClassInfo& cls : facts.classes) {
        maps.class_vis[cls.name] = cls.visibility;
        maps.class_abstract[cls.name] = cls.is_abstract;
        maps.ctors[cls.name] = cls.constructors;
        for (const MethodInfo& method : cls.methods)
            maps.method_vis[MethodRef{cls.name, method.name, method.params}] = method.visibility;
        if (cls.visibility == Visibility::Public && !cls.is_abstract) {
            if (cls.superclass)
                maps.impls[*cls.superclass].insert(cls.name);
            for (const TypeName& iface : cls.interfaces)
                maps.impls[iface].insert(cls.name);
        }
    }
    return maps;
}

std::set<MethodRef> compute_entry_points(const ProgramFacts& facts, const MetadataMaps& maps) {
    std::set<MethodRef> roots;
    for (const ClassInfo& cls : facts.classes) {
        if (cls.visibility != Visibility::Public || cls.is_abstract)
            continue;
        for (const MethodInfo& method : cls.methods) {
            if (method.visibility == Visibility::Public && !method.is_abstract)
                roots.insert(MethodRef{cls.name, method.name, method.params});
        }
    }
    (void)maps;
    return roots;
}

std::set<MethodRef> collect_target_overloads(const ProgramFacts& facts, const TypeName& focalClass,
                                             const std::string& focalName) {
    const ClassInfo* cls = facts.find_class(focalClass);
    if (!cls)
        throw UnknownClassError(focalClass);
    std::set<MethodRef> targets;
    for (const MethodInfo& method : cls->methods)
        if (method.name == focalName)
            targets.insert(MethodRef{cls->name, method.name, method.params});
    if (targets.empty())
        throw NoSuchMethodError(focalClass, focalName);
    return targets;
}

namespace {

// CHA dispatch set of one call site. static/special resolve on the declared
// owner alone; virtual/interface fan out over every concrete subtype of the
// owner (owner included when concrete).
std::set<MethodRef> resolve_call_site(const ProgramFacts& facts, const ClassHierarchy& hierarchy,
                                      const CallSite& call) {
    std::set<MethodRef> resolved;
    if (!facts.find_class(call.owner))
        return resolved; // external owner: nothing visible to analyze
    if (call.kind == CallKind::Static || call.kind == CallKind::Special) {
        if (auto hit = lookup_dispatch(facts, hierarchy, call.owner, call.name, call.params))
            resolved.insert(*hit);
        return resolved;
    }
    auto it = hierarchy.concrete_subtypes.find(call.owner);
    if (it == hierarchy.concrete_subtypes.end())
        return resolved;
    for (const TypeName& receiver : it->second)
        if (auto hit = lookup_dispatch(facts, hierarchy, receiver, call.name, call.params))
            resolved.insert(*hit);
    return resolved;
}

const MethodInfo* find_declared(const ProgramFacts& facts, const MethodRef& ref) {
    const ClassInfo* cls = facts.find_class(ref.owner);
    if (!cls)
        return nullptr;
    for (const MethodInfo& method : cls->methods)
        if (method.name == ref.name && method.params == ref.params)
            return &method;
    return nullptr;
}

} // namespace

CallGraph build_call_graph(const ProgramFacts& facts, const ClassHierarchy& hierarchy,
                           const std::set<MethodRef>& roots) {
    CallGraph graph;
    std::set<std::pair<MethodRef, MethodRef>> edges;
    std::deque<MethodRef> work;

    for (const MethodRef& root : roots) {
        const MethodInfo* method = find_declared(facts, root);
        if (method && !method->is_abstract && graph.nodes.insert(root).second)
            work.push_back(root);
    }

    while (!work.empty()) {
        MethodRef caller = std::move(work.front());
        work.pop_front();
        const MethodInfo* method = find_declared(facts, caller);
        for (const CallSite& call : method->calls) {
            std::set<MethodRef> callees = resolve_call_site(facts, hierarchy, call);
            if (callees.empty()) {
                ++graph.unresolved_call_sites;
                continue;
            }
            for (const MethodRef& callee : callees) {
                edges.insert({caller, callee});
                if (graph.nodes.insert(callee).second)
                    work.push_back(callee);
            }
        }
    }

    graph.edges.assign(edges.begin(), edges.end());
    return graph;
}

} // namespace chaintest
