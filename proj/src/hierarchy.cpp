#include "chaintest/hierarchy.hpp"

#include "chaintest/errors.hpp"

#include <functional>

namespace chaintest {

std::string to_text(const MethodRef& ref) {
    std::string out = ref.owner;
    out += '#';
    out += ref.name;
    out += '(';
    for (std::size_t i = 0; i < ref.params.size(); ++i) {
        if (i)
            out += ',';
        out += ref.params[i];
    }
    out += ')';
    return out;
}

ClassHierarchy build_hierarchy(const ProgramFacts& facts) {
    ClassHierarchy h;
    std::set<TypeName> declared;
    for (const ClassInfo& cls : facts.classes)
        declared.insert(cls.name);

    for (const ClassInfo& cls : facts.classes) {
        std::vector<TypeName>& supers = h.direct_supertypes[cls.name];
        if (cls.superclass && declared.count(*cls.superclass))
            supers.push_back(*cls.superclass);
        for (const TypeName& iface : cls.interfaces)
            if (declared.count(iface))
                supers.push_back(iface);
    }

    // Cycle check over the declared supertype edges: iterative three-color
    // DFS so deep chains cannot overflow the stack.
    std::map<TypeName, int> color; // 0 = white, 1 = gray, 2 = black
    for (const ClassInfo& cls : facts.classes) {
        if (color[cls.name] != 0)
            continue;
        std::vector<std::pair<TypeName, std::size_t>> stack{{cls.name, 0}};
        color[cls.name] = 1;
        while (!stack.empty()) {
            auto& [node, next] = stack.back();
            const std::vector<TypeName>& supers = h.direct_supertypes[node];
            if (next < supers.size()) {
                const TypeName& super = supers[next++];
                if (color[super] == 1)
                    throw CyclicHierarchyError(super);
                if (color[super] == 0) {
                    color[super] = 1;
                    stack.emplace_back(super, 0);
                }
            } else {
                color[node] = 2;
                stack.pop_back();
            }
        }
    }

    // Transitive subtype sets: propagate each class up through its acyclic
    // supertype edges.
    for (const ClassInfo& cls : facts.classes) {
        h.subtypes[cls.name]; // ensure every class has an entry
        std::set<TypeName> seen;
        std::vector<TypeName> work = h.direct_supertypes[cls.name];
        while (!work.empty()) {
            TypeName super = std::move(work.back());
            work.pop_back();
            if (!seen.insert(super).second)
                continue;
            h.subtypes[super].insert(cls.name);
            const auto& next = h.direct_supertypes[super];
            work.insert(work.end(), next.begin(), next.end());
        }
    }

    for (const ClassInfo& cls : facts.classes) {
        std::set<TypeName>& concrete = h.concrete_subtypes[cls.name];
        if (!cls.is_abstract)
            concrete.insert(cls.name);
        for (const TypeName& sub : h.subtypes[cls.name]) {
            const ClassInfo* info = facts.find_class(sub);
            if (info && !info->is_abstract)
                concrete.insert(sub);
        }
    }
    return h;
}

std::optional<MethodRef> lookup_dispatch(const ProgramFacts& facts, const ClassHierarchy& hierarchy,
                                         const TypeName& receiver, const std::string& name,
                                         const std::vector<TypeName>& params) {
    (void)hierarchy;
    const ClassInfo* cls = facts.find_class(receiver);
    if (!cls)
        throw UnknownReceiverError(receiver);
    while (cls) {
        for (const MethodInfo& method : cls->methods) {
            if (method.name == name && method.params == params && !method.is_abstract)
                return MethodRef{cls->name, name, params};
        }
        if (!cls->superclass)
            return std::nullopt;
        cls = facts.find_class(*cls->superclass); // external superclass ends the walk
    }
    return std::nullopt;
}

} // namespace chaintest
