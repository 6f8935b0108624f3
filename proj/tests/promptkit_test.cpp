#include "chaintest/promptkit.hpp"

#include "chaintest/errors.hpp"

#include "support/generators.hpp"
#include "support/testutil.hpp"

#include <gtest/gtest.h>

#include <limits>

namespace chaintest {
namespace {

using testing::fixture_path;
using testing::golden_path;
using testing::read_file;
using testing::ScratchDir;

constexpr const char* kXmlFactory = "com.fasterxml.jackson.dataformat.xml.XmlFactory";
constexpr const char* kDetector = "com.fasterxml.jackson.core.format.DataFormatDetector";

struct Pipeline {
    ProgramFacts facts;
    MetadataMaps maps;
    FilteredPathSet filtered;
    InitializationSet init;
};

Pipeline jackson_pipeline() {
    Pipeline p;
    p.facts = parse_facts(read_file(fixture_path("jackson_xml.json")));
    ClassHierarchy hierarchy = build_hierarchy(p.facts);
    p.maps = collect_metadata(p.facts);
    std::set<MethodRef> roots = compute_entry_points(p.facts, p.maps);
    std::set<MethodRef> targets = collect_target_overloads(p.facts, kXmlFactory, "hasFormat");
    CallGraph graph = build_call_graph(p.facts, hierarchy, roots);
    PathSet raw = extract_call_paths(graph, roots, targets, 3);
    p.filtered = filter_paths(raw, p.maps, 32);
    DependencyClosure closure = resolve_dependencies(p.filtered, kXmlFactory, p.maps);
    p.init = build_initialization_set(closure, p.maps);
    return p;
}

TEST(RenderCallChain, MatchesJacksonGolden) {
    Pipeline p = jackson_pipeline();
    std::string rendered = render_call_chain_context(p.filtered);
    EXPECT_EQ(rendered + "\n", read_file(golden_path("jackson_callchain.txt")));
}

TEST(RenderCallChain, EmptyPathSetUsesSentinel) {
    EXPECT_EQ(render_call_chain_context(FilteredPathSet{}),
              "Call-chain context:\n  no indirect chains found");
}

TEST(RenderCallChain, NumbersBlocksAndIndentsContinuations) {
    FilteredPathSet filtered;
    filtered.paths.push_back(CallPath{{MethodRef{"p.A", "a", {}}}});
    filtered.paths.push_back(
        CallPath{{MethodRef{"p.B", "b", {"int"}}, MethodRef{"p.A", "a", {}}}});
    EXPECT_EQ(render_call_chain_context(filtered),
              "Call-chain context:\n"
              "\n"
              "Context 1:\n"
              "  p.A#a()\n"
              "\n"
              "Context 2:\n"
              "  p.B#b(int)\n"
              "    -> p.A#a()");
}

TEST(RenderInitialization, MatchesJacksonGolden) {
    Pipeline p = jackson_pipeline();
    EXPECT_EQ(render_initialization_context(p.init, p.maps),
              read_file(golden_path("jackson_init.txt")));
}

TEST(RenderInitialization, EmptySetRendersNothing) {
    Pipeline p = jackson_pipeline();
    EXPECT_EQ(render_initialization_context(InitializationSet{}, p.maps), "");
}

TEST(RenderInitialization, SentinelAndNestedNames) {
    std::string doc = R"({"classes": [
      {"name": "p.Outer$Inner", "visibility": "public", "kind": "class", "abstract": true,
       "superclass": null, "interfaces": [], "constructors": [], "methods": []},
      {"name": "p.Sub", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": "p.Outer$Inner", "interfaces": [],
       "constructors": [{"visibility": "public", "params": []}], "methods": []}
    ]})";
    ProgramFacts facts = parse_facts(doc);
    MetadataMaps maps = collect_metadata(facts);
    DependencyClosure closure;
    closure.classes = {"p.Outer$Inner"};
    InitializationSet init = build_initialization_set(closure, maps);
    EXPECT_EQ(render_initialization_context(init, maps),
              "Dependency Context:\n"
              "\n"
              "p.Outer$Inner (public abstract):\n"
              "  - no public constructors found\n"
              "  - Known implementations:\n"
              "      * Sub\n");
}

TEST(SelectRelatedSources, JacksonPicksTheDetector) {
    Pipeline p = jackson_pipeline();
    std::vector<TypeName> missing;
    auto sources =
        select_related_sources(p.facts, p.filtered, kXmlFactory, 3, fixture_path("repo"), &missing);
    ASSERT_EQ(sources.size(), 1u);
    EXPECT_EQ(sources[0].first, kDetector);
    EXPECT_EQ(sources[0].second,
              read_file(fixture_path("repo/src/main/java/com/fasterxml/jackson/core/format/"
                                     "DataFormatDetector.java")));
    EXPECT_TRUE(missing.empty());
}

TEST(SelectRelatedSources, RanksByFrequencyThenName) {
    ScratchDir scratch("chaintest-sources");
    testing::write_file(scratch.file("A.java"), "class A {}\n");
    testing::write_file(scratch.file("B.java"), "class B {}\n");
    testing::write_file(scratch.file("C.java"), "class C {}\n");

    std::string doc = R"({"classes": [
      {"name": "q.A", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": [],
       "source_path": "A.java"},
      {"name": "q.B", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": [],
       "source_path": "B.java"},
      {"name": "q.C", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": [],
       "source_path": "C.java"},
      {"name": "q.Focal", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": []}
    ]})";
    ProgramFacts facts = parse_facts(doc);

    // q.C appears twice, q.A and q.B once each: order is C, A, B.
    FilteredPathSet filtered;
    filtered.paths.push_back(CallPath{{MethodRef{"q.C", "m", {}}, MethodRef{"q.Focal", "f", {}}}});
    filtered.paths.push_back(CallPath{{MethodRef{"q.C", "n", {}}, MethodRef{"q.B", "m", {}},
                                       MethodRef{"q.A", "m", {}}, MethodRef{"q.Focal", "f", {}}}});

    auto sources = select_related_sources(facts, filtered, "q.Focal", 3, scratch.path());
    ASSERT_EQ(sources.size(), 3u);
    EXPECT_EQ(sources[0].first, "q.C");
    EXPECT_EQ(sources[1].first, "q.A");
    EXPECT_EQ(sources[2].first, "q.B");
    EXPECT_EQ(sources[0].second, "class C {}\n");

    auto capped = select_related_sources(facts, filtered, "q.Focal", 2, scratch.path());
    ASSERT_EQ(capped.size(), 2u);
    EXPECT_EQ(capped[0].first, "q.C");
    EXPECT_EQ(capped[1].first, "q.A");
}

TEST(SelectRelatedSources, SkipsMissingSourcesAndReportsThem) {
    ScratchDir scratch("chaintest-missing");
    testing::write_file(scratch.file("B.java"), "class B {}\n");

    std::string doc = R"({"classes": [
      {"name": "q.A", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": []},
      {"name": "q.B", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": [],
       "source_path": "B.java"},
      {"name": "q.C", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": [],
       "source_path": "does/not/exist.java"},
      {"name": "q.Focal", "visibility": "public", "kind": "class", "abstract": false,
       "superclass": null, "interfaces": [], "constructors": [], "methods": []}
    ]})";
    ProgramFacts facts = parse_facts(doc);

    // q.A (no source_path) and q.C (unreadable) outrank q.B by frequency, but
    // only q.B can be loaded; skipped classes do not consume the cap.
    FilteredPathSet filtered;
    filtered.paths.push_back(CallPath{{MethodRef{"q.A", "m", {}}, MethodRef{"q.C", "m", {}},
                                       MethodRef{"q.Focal", "f", {}}}});
    filtered.paths.push_back(CallPath{{MethodRef{"q.A", "n", {}}, MethodRef{"q.C", "n", {}},
                                       MethodRef{"q.B", "m", {}}, MethodRef{"q.Focal", "f", {}}}});

    std::vector<TypeName> missing;
    auto sources = select_related_sources(facts, filtered, "q.Focal", 1, scratch.path(), &missing);
    ASSERT_EQ(sources.size(), 1u);
    EXPECT_EQ(sources[0].first, "q.B");
    EXPECT_EQ(missing, (std::vector<TypeName>{"q.A", "q.C"}));
}

TEST(FailureDigest, TruncatesReasonAtLimit) {
    std::string reason(600, 'x');
    FailureDigest digest = make_failure_digest("t", 7, reason, 500);
    EXPECT_EQ(digest.test_name, "t");
    ASSERT_TRUE(digest.error_line.has_value());
    EXPECT_EQ(*digest.error_line, 7);
    EXPECT_EQ(digest.reason.size(), 500u);
    EXPECT_TRUE(digest.source.empty());

    FailureDigest shortOne = make_failure_digest("u", std::nullopt, "ok", 500, "code");
    EXPECT_EQ(shortOne.reason, "ok");
    EXPECT_EQ(shortOne.source, "code");
    EXPECT_FALSE(shortOne.error_line.has_value());
}

ContextBundle ladder_bundle() {
    ContextBundle bundle;
    FilteredPathSet filtered;
    filtered.paths.push_back(CallPath{{MethodRef{"p.A", "alpha", {}}}});
    filtered.paths.push_back(
        CallPath{{MethodRef{"p.B", "beta", {}}, MethodRef{"p.A", "alpha", {}}}});
    filtered.paths.push_back(CallPath{{MethodRef{"p.C", "gamma", {}},
                                       MethodRef{"p.B", "beta", {}},
                                       MethodRef{"p.A", "alpha", {}}}});
    bundle.call_chain_text = render_call_chain_context(filtered);
    bundle.init_text = "Dependency Context:\n\nFULL_INIT_MARKER " + std::string(200, 'i') + "\n";
    bundle.init_text_seed_only = "Dependency Context:\n\nSEED_INIT_MARKER\n";
    bundle.related_sources.emplace_back("p.B", "SOURCE_B_MARKER " + std::string(200, 'b'));
    bundle.related_sources.emplace_back("p.C", "SOURCE_C_MARKER " + std::string(200, 'c'));
    bundle.focal_source = "class A { FOCAL_MARKER }";
    return bundle;
}

TEST(ComposeGeneration, FullBundleSubstitutesEverything) {
    ContextBundle bundle = ladder_bundle();
    MethodRef focal{"p.A", "alpha", {}};
    PromptPair prompt = compose_generation_prompt(bundle, focal, "JUnit 4");

    EXPECT_NE(prompt.system.find("Initialization-first testing"), std::string::npos);
    EXPECT_NE(prompt.user.find("Call-Chain Context (Test Design Driver)"), std::string::npos);
    EXPECT_NE(prompt.user.find("JUnit 4"), std::string::npos);
    EXPECT_NE(prompt.user.find("p.A#alpha()"), std::string::npos);
    EXPECT_NE(prompt.user.find("FULL_INIT_MARKER"), std::string::npos);
    EXPECT_NE(prompt.user.find("SOURCE_B_MARKER"), std::string::npos);
    EXPECT_NE(prompt.user.find("SOURCE_C_MARKER"), std::string::npos);
    EXPECT_NE(prompt.user.find("// ===== Source: p.B ====="), std::string::npos);
    EXPECT_NE(prompt.user.find("FOCAL_MARKER"), std::string::npos);
    EXPECT_NE(prompt.user.find("Context 3:"), std::string::npos);
    EXPECT_EQ(prompt.system.find("{{"), std::string::npos);
    EXPECT_EQ(prompt.user.find("{{"), std::string::npos);
}

TEST(ComposeGeneration, EmptySectionsGetPlaceholders) {
    ContextBundle bundle;
    bundle.call_chain_text = render_call_chain_context(FilteredPathSet{});
    MethodRef focal{"p.A", "alpha", {}};
    PromptPair prompt = compose_generation_prompt(bundle, focal, "JUnit 4");
    EXPECT_NE(prompt.user.find("no indirect chains found"), std::string::npos);
    EXPECT_NE(prompt.user.find("no initialization metadata available"), std::string::npos);
    EXPECT_NE(prompt.user.find("no related source files available"), std::string::npos);
    EXPECT_NE(prompt.user.find("focal class source unavailable"), std::string::npos);
    EXPECT_EQ(prompt.user.find("{{"), std::string::npos);
}

TEST(ComposeGeneration, ReductionLadderDropsInOrder) {
    ContextBundle bundle = ladder_bundle();
    MethodRef focal{"p.A", "alpha", {}};
    PromptLimits limits;

    limits.char_budget = std::numeric_limits<std::size_t>::max();
    std::size_t fullSize = compose_generation_prompt(bundle, focal, "JUnit 4", limits).user.size();

    // Stage 1: related sources drop from the back.
    limits.char_budget = fullSize - 1;
    PromptPair oneSource = compose_generation_prompt(bundle, focal, "JUnit 4", limits);
    EXPECT_NE(oneSource.user.find("SOURCE_B_MARKER"), std::string::npos);
    EXPECT_EQ(oneSource.user.find("SOURCE_C_MARKER"), std::string::npos);
    EXPECT_NE(oneSource.user.find("FULL_INIT_MARKER"), std::string::npos);

    limits.char_budget = oneSource.user.size() - 1;
    PromptPair noSources = compose_generation_prompt(bundle, focal, "JUnit 4", limits);
    EXPECT_EQ(noSources.user.find("SOURCE_B_MARKER"), std::string::npos);
    EXPECT_NE(noSources.user.find("no related source files available"), std::string::npos);
    EXPECT_NE(noSources.user.find("FULL_INIT_MARKER"), std::string::npos);

    // Stage 2: seed-only initialization context replaces the full text.
    limits.char_budget = noSources.user.size() - 1;
    PromptPair seedOnly = compose_generation_prompt(bundle, focal, "JUnit 4", limits);
    EXPECT_EQ(seedOnly.user.find("FULL_INIT_MARKER"), std::string::npos);
    EXPECT_NE(seedOnly.user.find("SEED_INIT_MARKER"), std::string::npos);
    EXPECT_NE(seedOnly.user.find("Context 3:"), std::string::npos);

    // Stage 3: trailing call-chain blocks go next.
    limits.char_budget = seedOnly.user.size() - 1;
    PromptPair twoBlocks = compose_generation_prompt(bundle, focal, "JUnit 4", limits);
    EXPECT_NE(twoBlocks.user.find("p.B#beta()"), std::string::npos);
    EXPECT_EQ(twoBlocks.user.find("p.C#gamma()"), std::string::npos);
    EXPECT_EQ(twoBlocks.user.find("Context 3:"), std::string::npos);

    limits.char_budget = twoBlocks.user.size() - 1;
    PromptPair oneBlock = compose_generation_prompt(bundle, focal, "JUnit 4", limits);
    // "Context 2:" appears verbatim in the template's worked example, so the
    // dropped block is detected through its body text instead.
    EXPECT_NE(oneBlock.user.find("Context 1:"), std::string::npos);
    EXPECT_EQ(oneBlock.user.find("p.B#beta()"), std::string::npos);

    // Stage 4: nothing left to shed.
    limits.char_budget = oneBlock.user.size() - 1;
    EXPECT_THROW(compose_generation_prompt(bundle, focal, "JUnit 4", limits),
                 TokenBudgetExceededError);
}

TEST(ComposeGeneration, BudgetErrorCarriesSizes) {
    ContextBundle bundle = ladder_bundle();
    MethodRef focal{"p.A", "alpha", {}};
    PromptLimits limits;
    limits.char_budget = 10;
    try {
        compose_generation_prompt(bundle, focal, "JUnit 4", limits);
        FAIL() << "expected TokenBudgetExceededError";
    } catch (const TokenBudgetExceededError& e) {
        EXPECT_EQ(e.kind(), ErrorKind::TokenBudgetExceeded);
        EXPECT_NE(std::string(e.what()).find("10"), std::string::npos);
    }
}

TEST(ComposeFixing, FormatsFailureBlocks) {
    ContextBundle bundle;
    bundle.related_sources.emplace_back("p.B", "class B {}\n");

    std::vector<FailureDigest> failures;
    failures.push_back(make_failure_digest("testOne", 42, "assertion failed", 500,
                                           "@Test\npublic void testOne() {}\n"));
    failures.push_back(make_failure_digest("testTwo", std::nullopt, "timeout", 500));

    PromptPair prompt = compose_fixing_prompt(failures, bundle);
    EXPECT_NE(prompt.system.find("You should NOT modify the production code."),
              std::string::npos);
    EXPECT_NE(prompt.user.find("Test: testOne\n"
                               "Error line: 42\n"
                               "Reason: assertion failed\n"
                               "Code:\n"
                               "```java\n"
                               "@Test\n"
                               "public void testOne() {}\n"
                               "```\n"
                               "\n"
                               "Test: testTwo\n"
                               "Reason: timeout\n"),
              std::string::npos);
    EXPECT_NE(prompt.user.find("// ===== Source: p.B ====="), std::string::npos);
    EXPECT_EQ(prompt.user.find("{{"), std::string::npos);
    EXPECT_EQ(prompt.system.find("{{"), std::string::npos);
}

TEST(ComposeFixing, ClampsOversizedReasonsDefensively) {
    ContextBundle bundle;
    FailureDigest raw;
    raw.test_name = "t";
    raw.reason = std::string(600, 'r');

    PromptLimits limits;
    limits.reason_max = 10;
    PromptPair prompt = compose_fixing_prompt({raw}, bundle, limits);
    EXPECT_NE(prompt.user.find("Reason: rrrrrrrrrr\n"), std::string::npos);
    EXPECT_EQ(prompt.user.find(std::string(11, 'r')), std::string::npos);
}

TEST(ComposeFixing, AddsNewlineAfterUnterminatedCode) {
    ContextBundle bundle;
    FailureDigest raw;
    raw.test_name = "t";
    raw.reason = "r";
    raw.source = "@Test void t() {}"; // no trailing newline
    PromptPair prompt = compose_fixing_prompt({raw}, bundle);
    EXPECT_NE(prompt.user.find("```java\n@Test void t() {}\n```\n"), std::string::npos);
}

} // namespace
} // namespace chaintest
