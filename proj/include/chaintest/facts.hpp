// facts.hpp - Declarative program-facts model of the codebase under analysis.
//
// A facts document describes classes, their hierarchy edges, constructors,
// methods, and call sites of a Java-style codebase. It is the analysis
// boundary: everything downstream (hierarchy index, call graph, path search,
// dependency resolution) consumes this model and never touches real source
// or bytecode. Types referenced but not declared in the document are treated
// as "external": they produce no hierarchy edges, no dispatch candidates,
// and no call-graph edges.

#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chaintest {

// Fully-qualified dotted class name ("com.example.Foo"), a primitive name,
// or an array type with one trailing "[]" per dimension. Nested classes are
// flat "$"-joined names ("Outer$Inner").
using TypeName = std::string;

// The fixed primitive set. Array types are never primitive.
bool is_primitive_type(const TypeName& name);
bool is_array_type(const TypeName& name);

// Strips all trailing "[]" pairs: "a.B[][]" -> "a.B".
TypeName array_element_type(const TypeName& name);

// Text after the last '.': "a.b.C$D" -> "C$D".
std::string simple_class_name(const TypeName& name);

// Text before the first '$' of the simple name: "a.b.C$D" -> "C".
std::string outer_simple_name(const TypeName& name);

// Package prefix, empty for default-package classes: "a.b.C" -> "a.b".
std::string package_name(const TypeName& name);

enum class Visibility { Public, Protected, Package, Private };

std::string_view to_string(Visibility vis);

enum class ClassKind { Class, Interface };

enum class CallKind { Static, Virtual, Interface, Special };

struct ConstructorInfo {
    Visibility visibility = Visibility::Public;
    std::vector<TypeName> params;

    bool operator==(const ConstructorInfo&) const = default;
};

struct CallSite {
    CallKind kind = CallKind::Virtual;
    TypeName owner; // static receiver type
    std::string name;
    std::vector<TypeName> params;

    bool operator==(const CallSite&) const = default;
};

struct MethodInfo {
    std::string name;
    std::vector<TypeName> params;
    TypeName return_type;
    Visibility visibility = Visibility::Public;
    bool is_static = false;
    bool is_abstract = false;
    std::vector<CallSite> calls;

    bool operator==(const MethodInfo&) const = default;
};

struct ClassInfo {
    TypeName name;
    Visibility visibility = Visibility::Public;
    ClassKind kind = ClassKind::Class;
    bool is_abstract = false;
    std::optional<TypeName> superclass;
    std::vector<TypeName> interfaces;
    std::vector<ConstructorInfo> constructors;
    std::vector<MethodInfo> methods;
    std::optional<std::string> source_path;

    bool operator==(const ClassInfo&) const = default;
};

struct ProgramFacts {
    std::vector<ClassInfo> classes;

    // Types referenced by the document (supertypes, call-site owners,
    // parameter/return element types) but not declared in it. Populated
    // during validation; not part of document equality.
    std::set<TypeName> external_types;

    bool operator==(const ProgramFacts& other) const {
        return classes == other.classes;
    }

    const ClassInfo* find_class(const TypeName& name) const;
};

// Parses and validates a facts document (JSON text, see the file format in
// the README). Classes are returned in input order.
//
// Throws MalformedDocumentError on syntax errors, SchemaViolationError on
// missing/ill-typed/unknown fields or broken invariants (the message names
// the offending path), and DuplicateClassError on repeated class names.
ProgramFacts parse_facts(std::string_view document);

// Canonical JSON rendering; parse_facts(serialize_facts(f)) == f.
std::string serialize_facts(const ProgramFacts& facts);

} // namespace chaintest
