#include "chaintest/depresolve.hpp"

#include <algorithm>

namespace chaintest {

namespace {

bool method_qualifies(const MethodRef& m, const MetadataMaps& maps) {
    auto mv = maps.method_vis.find(m);
    if (mv == maps.method_vis.end() || mv->second != Visibility::Public)
        return false;
    auto cv = maps.class_vis.find(m.owner);
    if (cv == maps.class_vis.end() || cv->second != Visibility::Public)
        return false;
    auto ab = maps.class_abstract.find(m.owner);
    return ab != maps.class_abstract.end() && !ab->second;
}

// A type joins the closure when it is declared in the facts; arrays decay to
// their element type first, and primitives never qualify.
std::optional<TypeName> closure_candidate(const TypeName& type, const MetadataMaps& maps) {
    TypeName element = array_element_type(type);
    if (is_primitive_type(element) || !maps.class_vis.count(element))
        return std::nullopt;
    return element;
}

} // namespace

FilteredPathSet filter_paths(const PathSet& raw, const MetadataMaps& maps, int k_paths) {
    std::vector<CallPath> projected;
    for (const CallPath& path : raw.paths) {
        CallPath p;
        std::set<MethodRef> seen;
        for (const MethodRef& m : path.methods) {
            if (method_qualifies(m, maps) && seen.insert(m).second)
                p.methods.push_back(m);
        }
        if (!p.methods.empty())
            projected.push_back(std::move(p));
    }
    std::sort(projected.begin(), projected.end(), canonical_path_less);
    projected.erase(std::unique(projected.begin(), projected.end()), projected.end());
    if (k_paths >= 0 && projected.size() > static_cast<std::size_t>(k_paths))
        projected.resize(static_cast<std::size_t>(k_paths));
    return FilteredPathSet{std::move(projected)};
}

DependencyClosure resolve_dependencies(const FilteredPathSet& filtered, const TypeName& focalClass,
                                       const MetadataMaps& maps) {
    DependencyClosure closure;
    closure.seed.insert(focalClass);
    for (const CallPath& path : filtered.paths) {
        for (const MethodRef& m : path.methods) {
            closure.seed.insert(m.owner);
            for (const TypeName& param : m.params)
                if (auto t = closure_candidate(param, maps))
                    closure.seed.insert(*t);
        }
    }
    closure.classes = closure.seed;

    bool grew = true;
    while (grew) {
        grew = false;
        std::set<TypeName> discovered;
        for (const TypeName& member : closure.classes) {
            auto it = maps.ctors.find(member);
            if (it == maps.ctors.end())
                continue;
            for (const ConstructorInfo& ctor : it->second) {
                if (ctor.visibility != Visibility::Public)
                    continue;
                for (const TypeName& param : ctor.params)
                    if (auto t = closure_candidate(param, maps))
                        if (!closure.classes.count(*t))
                            discovered.insert(*t);
            }
        }
        if (!discovered.empty()) {
            closure.classes.insert(discovered.begin(), discovered.end());
            ++closure.expansion_rounds;
            grew = true;
        }
    }
    return closure;
}

InitializationSet build_initialization_set(const DependencyClosure& closure,
                                           const MetadataMaps& maps) {
    InitializationSet init;
    for (const TypeName& member : closure.classes) {
        std::vector<ConstructorInfo>& list = init.ctors[member];
        if (auto it = maps.ctors.find(member); it != maps.ctors.end()) {
            for (const ConstructorInfo& ctor : it->second)
                if (ctor.visibility == Visibility::Public)
                    list.push_back(ctor);
        }
        if (list.empty()) {
            if (auto it = maps.impls.find(member); it != maps.impls.end())
                init.known_impls[member] = it->second;
            else
                init.known_impls[member] = {};
        }
    }
    return init;
}

} // namespace chaintest
