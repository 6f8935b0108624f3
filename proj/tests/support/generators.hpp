// Seeded random inputs for property tests: program facts that satisfy every
// parser invariant, and raw digraphs (cycles allowed) for path search.

#pragma once

#include "chaintest/callgraph.hpp"
#include "chaintest/facts.hpp"

#include <random>

namespace chaintest::testing {

struct FactsOptions {
    int num_classes = 8;
    int max_ctors = 3;
    int max_methods = 4;
    int max_calls = 3;
    double interface_prob = 0.2;
    double abstract_prob = 0.25;
    double nonpublic_prob = 0.2;
    double external_call_prob = 0.2;
};

/// Random facts over classes gen.C0..C{n-1}. Supertype edges always point to
/// lower indices, so hierarchies are acyclic by construction; call sites
/// mostly reference declared methods and occasionally external ones.
ProgramFacts random_facts(std::mt19937& rng, const FactsOptions& opts = {});

/// Arbitrary digraph over `nodes` synthetic methods with independent edge
/// probability; self-loops excluded, cycles welcome.
CallGraph random_graph(std::mt19937& rng, int nodes, double edgeProb);

/// Same, but with each node's out-degree drawn from [0, maxOut].
CallGraph random_graph_outdeg(std::mt19937& rng, int nodes, int maxOut);

std::set<MethodRef> random_method_subset(std::mt19937& rng, const std::set<MethodRef>& pool,
                                         double keepProb);

} // namespace chaintest::testing
