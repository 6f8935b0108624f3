#include "chaintest/pathfinder.hpp"

#include <algorithm>
#include <map>

namespace chaintest {

bool canonical_path_less(const CallPath& a, const CallPath& b) {
    if (a.methods.size() != b.methods.size())
        return a.methods.size() < b.methods.size();
    for (std::size_t i = 0; i < a.methods.size(); ++i) {
        std::string left = to_text(a.methods[i]);
        std::string right = to_text(b.methods[i]);
        if (left != right)
            return left < right;
    }
    return false;
}

std::set<MethodRef> backward_reachable(const CallGraph& graph, const std::set<MethodRef>& targets) {
    std::set<MethodRef> canReach = targets;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [caller, callee] : graph.edges) {
            if (canReach.count(callee) && canReach.insert(caller).second)
                changed = true;
        }
    }
    return canReach;
}

namespace {

using Adjacency = std::map<MethodRef, std::vector<MethodRef>>;

struct DfsState {
    const Adjacency& forward;
    const std::set<MethodRef>& targets;
    int d_max;
    std::vector<MethodRef> stack;
    std::set<MethodRef> visited;
    std::vector<CallPath> out;
};

void dfs(DfsState& st, const MethodRef& m, int d) {
    st.stack.push_back(m);
    st.visited.insert(m);
    if (st.targets.count(m) && d <= st.d_max)
        st.out.push_back(CallPath{st.stack});
    if (d < st.d_max) {
        if (auto it = st.forward.find(m); it != st.forward.end()) {
            for (const MethodRef& s : it->second)
                if (!st.visited.count(s))
                    dfs(st, s, d + 1);
        }
    }
    st.stack.pop_back();
    st.visited.erase(m);
}

} // namespace

PathSet extract_call_paths(const CallGraph& graph, const std::set<MethodRef>& roots,
                           const std::set<MethodRef>& targets, int d_max, bool prune) {
    // With prune disabled the search runs on the raw graph with no
    // reachability phase at all, so the two modes can be tested
    // differentially.
    std::set<MethodRef> canReach;
    if (prune)
        canReach = backward_reachable(graph, targets);

    Adjacency forward;
    for (const auto& [caller, callee] : graph.edges) {
        if (!prune || (canReach.count(caller) && canReach.count(callee)))
            forward[caller].push_back(callee);
    }

    DfsState st{forward, targets, d_max, {}, {}, {}};
    for (const MethodRef& root : roots) {
        if (prune && !canReach.count(root))
            continue;
        dfs(st, root, 0);
    }

    std::sort(st.out.begin(), st.out.end(), canonical_path_less);
    st.out.erase(std::unique(st.out.begin(), st.out.end()), st.out.end());
    return PathSet{std::move(st.out)};
}

} // namespace chaintest
