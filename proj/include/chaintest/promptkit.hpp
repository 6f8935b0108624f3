#pragma once

#include "chaintest/depresolve.hpp"
#include "chaintest/facts.hpp"
#include "chaintest/hierarchy.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace chaintest {

/// Size caps for prompt assembly. The character budget is a proxy for the
/// model's token budget; reason_max caps each failure reason.
struct PromptLimits {
    std::size_t char_budget = 60000;
    std::size_t reason_max = 500;
};

/// Everything the prompt composer needs, precomputed once per focal method.
struct ContextBundle {
    std::string call_chain_text;
    std::string init_text;
    /// Initialization context restricted to the pre-expansion seed classes;
    /// substituted for init_text under budget pressure.
    std::string init_text_seed_only;
    /// Most frequent related classes first, at most d_max entries, focal
    /// class excluded.
    std::vector<std::pair<TypeName, std::string>> related_sources;
    std::string focal_source;
};

struct PromptPair {
    std::string system;
    std::string user;
};

/// Condensed failure feedback for one test: name, the reported error line if
/// any, and a reason truncated to reason_max. `source` carries the failing
/// test's code into the fixing prompt.
struct FailureDigest {
    std::string test_name;
    std::optional<int> error_line;
    std::string reason;
    std::string source;
};

FailureDigest make_failure_digest(std::string testName, std::optional<int> errorLine,
                                  std::string reason, std::size_t reasonMax,
                                  std::string source = {});

/// Renders paths as numbered context blocks under a "Call-chain context:"
/// header; each step is the canonical method text, continuations prefixed
/// with "->", the focal method last. Empty input yields the explicit
/// "no indirect chains found" sentinel line.
std::string render_call_chain_context(const FilteredPathSet& filtered);

/// Renders the dependency context: one block per closure class in canonical
/// (name) order with its modifiers, public constructor lines, the
/// "no public constructors found" sentinel, and known implementations for
/// every class that has any recorded.
std::string render_initialization_context(const InitializationSet& init, const MetadataMaps& maps);

/// Picks the top-d_max most frequently occurring path classes (focal class
/// excluded; ties broken by ascending name) that have a loadable source file
/// under repoRoot, and returns their contents. Classes skipped for a missing
/// or unreadable source are appended to *missingSources when given.
std::vector<std::pair<TypeName, std::string>>
select_related_sources(const ProgramFacts& facts, const FilteredPathSet& filtered,
                       const TypeName& focalClass, int d_max,
                       const std::filesystem::path& repoRoot,
                       std::vector<TypeName>* missingSources = nullptr);

/// Fills the generation templates. Reduces oversized prompts by dropping
/// related sources from the back, then swapping in the seed-only
/// initialization text, then truncating the call-chain text to the blocks
/// that fit; throws TokenBudgetExceededError when nothing fits.
PromptPair compose_generation_prompt(const ContextBundle& bundle, const MethodRef& focal,
                                     const std::string& frameworkName,
                                     const PromptLimits& limits = {});

/// Fills the fixing templates with one block per digest plus the related
/// sources. Reasons are clamped to reason_max defensively.
PromptPair compose_fixing_prompt(const std::vector<FailureDigest>& failures,
                                 const ContextBundle& bundle, const PromptLimits& limits = {});

} // namespace chaintest
