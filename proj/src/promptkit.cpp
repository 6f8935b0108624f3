#include "chaintest/promptkit.hpp"

#include "chaintest/errors.hpp"
#include "chaintest/prompt_templates.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace chaintest {

namespace {

void replace_all(std::string& text, const std::string& needle, const std::string& value) {
    std::size_t pos = 0;
    while ((pos = text.find(needle, pos)) != std::string::npos) {
        text.replace(pos, needle.size(), value);
        pos += value.size();
    }
}

std::string render_related_sources(const std::vector<std::pair<TypeName, std::string>>& sources) {
    if (sources.empty())
        return "  no related source files available";
    std::ostringstream out;
    for (std::size_t i = 0; i < sources.size(); ++i) {
        if (i)
            out << "\n";
        out << "// ===== Source: " << sources[i].first << " =====\n" << sources[i].second;
        if (!sources[i].second.empty() && sources[i].second.back() != '\n')
            out << "\n";
    }
    return out.str();
}

// Splits the rendered call-chain text into its header and context blocks so
// the composer can drop trailing blocks under budget pressure.
std::vector<std::string> split_chain_blocks(const std::string& text) {
    std::vector<std::string> blocks;
    std::size_t pos = text.find("\n\n");
    while (pos != std::string::npos) {
        std::size_t next = text.find("\n\n", pos + 2);
        std::size_t end = next == std::string::npos ? text.size() : next;
        blocks.push_back(text.substr(pos + 2, end - pos - 2));
        pos = next;
    }
    return blocks;
}

std::string join_chain_blocks(const std::vector<std::string>& blocks, std::size_t count) {
    std::string out = "Call-chain context:";
    for (std::size_t i = 0; i < count && i < blocks.size(); ++i) {
        out += "\n\n";
        out += blocks[i];
    }
    return out;
}

std::string assemble_generation_user(const ContextBundle& bundle, const MethodRef& focal,
                                     const std::string& frameworkName,
                                     const std::string& callChains, const std::string& initInfo,
                                     std::size_t sourceCount) {
    std::string user = templates::kGenerationUser;
    replace_all(user, "{{FRAMEWORK}}", frameworkName);
    replace_all(user, "{{FOCAL_METHOD}}", to_text(focal));
    replace_all(user, "{{FOCAL_CLASS}}", focal.owner);
    replace_all(user, "{{CALL_CHAINS}}", callChains);
    replace_all(user, "{{INITIALIZATION_INFO}}",
                initInfo.empty() ? "  no initialization metadata available" : initInfo);
    std::vector<std::pair<TypeName, std::string>> kept(bundle.related_sources.begin(),
                                                       bundle.related_sources.begin() +
                                                           static_cast<std::ptrdiff_t>(sourceCount));
    replace_all(user, "{{RELATED_SOURCE_FILES}}", render_related_sources(kept));
    replace_all(user, "{{FOCAL_SOURCE}}",
                bundle.focal_source.empty() ? "  focal class source unavailable"
                                            : bundle.focal_source);
    return user;
}

} // namespace

FailureDigest make_failure_digest(std::string testName, std::optional<int> errorLine,
                                  std::string reason, std::size_t reasonMax, std::string source) {
    if (reason.size() > reasonMax)
        reason.resize(reasonMax);
    return FailureDigest{std::move(testName), errorLine, std::move(reason), std::move(source)};
}

std::string render_call_chain_context(const FilteredPathSet& filtered) {
    std::string out = "Call-chain context:";
    if (filtered.paths.empty()) {
        out += "\n  no indirect chains found";
        return out;
    }
    for (std::size_t i = 0; i < filtered.paths.size(); ++i) {
        out += "\n\nContext " + std::to_string(i + 1) + ":";
        const CallPath& path = filtered.paths[i];
        for (std::size_t j = 0; j < path.methods.size(); ++j) {
            if (j == 0)
                out += "\n  " + to_text(path.methods[j]);
            else
                out += "\n    -> " + to_text(path.methods[j]);
        }
    }
    return out;
}

std::string render_initialization_context(const InitializationSet& init,
                                          const MetadataMaps& maps) {
    if (init.ctors.empty())
        return {};
    std::string out = "Dependency Context:";
    for (const auto& [name, ctors] : init.ctors) { // std::map: canonical name order
        out += "\n\n" + name + " (";
        if (auto it = maps.class_vis.find(name); it != maps.class_vis.end())
            out += to_string(it->second);
        else
            out += "public";
        if (auto it = maps.class_abstract.find(name); it != maps.class_abstract.end() && it->second)
            out += " abstract";
        out += "):";
        std::string simple = simple_class_name(name);
        for (const ConstructorInfo& ctor : ctors) {
            out += "\n  - " + simple + "(";
            for (std::size_t i = 0; i < ctor.params.size(); ++i) {
                if (i)
                    out += ", ";
                out += ctor.params[i];
            }
            out += ")";
        }
        if (ctors.empty())
            out += "\n  - no public constructors found";
        std::set<TypeName> impls;
        if (auto it = init.known_impls.find(name); it != init.known_impls.end())
            impls = it->second;
        if (impls.empty()) {
            // Implementations are listed for constructible classes too, so
            // fall back to the metadata map for every member.
            if (auto it = maps.impls.find(name); it != maps.impls.end())
                impls = it->second;
        }
        if (!impls.empty()) {
            out += "\n  - Known implementations:";
            for (const TypeName& impl : impls)
                out += "\n      * " + simple_class_name(impl);
        }
    }
    out += "\n";
    return out;
}

std::vector<std::pair<TypeName, std::string>>
select_related_sources(const ProgramFacts& facts, const FilteredPathSet& filtered,
                       const TypeName& focalClass, int d_max,
                       const std::filesystem::path& repoRoot,
                       std::vector<TypeName>* missingSources) {
    std::map<TypeName, int> counts;
    for (const CallPath& path : filtered.paths)
        for (const MethodRef& m : path.methods)
            if (m.owner != focalClass)
                ++counts[m.owner];

    std::vector<std::pair<TypeName, int>> ranked(counts.begin(), counts.end());
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second)
            return a.second > b.second;
        return a.first < b.first;
    });

    std::vector<std::pair<TypeName, std::string>> selected;
    for (const auto& [name, count] : ranked) {
        if (static_cast<int>(selected.size()) >= d_max)
            break;
        const ClassInfo* cls = facts.find_class(name);
        if (!cls || !cls->source_path) {
            if (missingSources)
                missingSources->push_back(name);
            continue;
        }
        std::ifstream in(repoRoot / *cls->source_path, std::ios::binary);
        if (!in) {
            if (missingSources)
                missingSources->push_back(name);
            continue;
        }
        std::ostringstream contents;
        contents << in.rdbuf();
        selected.emplace_back(name, contents.str());
    }
    return selected;
}

PromptPair compose_generation_prompt(const ContextBundle& bundle, const MethodRef& focal,
                                     const std::string& frameworkName,
                                     const PromptLimits& limits) {
    PromptPair prompt;
    prompt.system = templates::kGenerationSystem;

    // Full assembly first; then shrink along the fixed reduction ladder until
    // the user text fits the character budget.
    std::size_t sources = bundle.related_sources.size();
    prompt.user = assemble_generation_user(bundle, focal, frameworkName, bundle.call_chain_text,
                                           bundle.init_text, sources);
    while (prompt.user.size() > limits.char_budget && sources > 0) {
        --sources;
        prompt.user = assemble_generation_user(bundle, focal, frameworkName,
                                               bundle.call_chain_text, bundle.init_text, sources);
    }

    const std::string* init = &bundle.init_text;
    if (prompt.user.size() > limits.char_budget && !bundle.init_text_seed_only.empty() &&
        bundle.init_text_seed_only.size() < bundle.init_text.size()) {
        init = &bundle.init_text_seed_only;
        prompt.user = assemble_generation_user(bundle, focal, frameworkName,
                                               bundle.call_chain_text, *init, sources);
    }

    if (prompt.user.size() > limits.char_budget) {
        std::vector<std::string> blocks = split_chain_blocks(bundle.call_chain_text);
        for (std::size_t keep = blocks.size(); keep-- > 1;) {
            prompt.user = assemble_generation_user(bundle, focal, frameworkName,
                                                   join_chain_blocks(blocks, keep), *init, sources);
            if (prompt.user.size() <= limits.char_budget)
                break;
        }
    }

    if (prompt.user.size() > limits.char_budget)
        throw TokenBudgetExceededError(prompt.user.size(), limits.char_budget);
    return prompt;
}

PromptPair compose_fixing_prompt(const std::vector<FailureDigest>& failures,
                                 const ContextBundle& bundle, const PromptLimits& limits) {
    std::ostringstream block;
    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (i)
            block << "\n";
        const FailureDigest& digest = failures[i];
        block << "Test: " << digest.test_name << "\n";
        if (digest.error_line)
            block << "Error line: " << *digest.error_line << "\n";
        std::string reason = digest.reason;
        if (reason.size() > limits.reason_max)
            reason.resize(limits.reason_max);
        block << "Reason: " << reason << "\n";
        if (!digest.source.empty()) {
            block << "Code:\n```java\n" << digest.source;
            if (digest.source.back() != '\n')
                block << "\n";
            block << "```\n";
        }
    }

    PromptPair prompt;
    prompt.system = templates::kFixingSystem;
    prompt.user = templates::kFixingUser;
    replace_all(prompt.user, "{{FAILING_TESTS_AND_ERRORS}}", block.str());
    replace_all(prompt.user, "{{RELATED_SOURCE_FILES}}",
                render_related_sources(bundle.related_sources));
    return prompt;
}

} // namespace chaintest
