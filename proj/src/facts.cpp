#include "chaintest/facts.hpp"

#include "chaintest/errors.hpp"

#include <algorithm>
#include <array>
#include <nlohmann/json.hpp>
#include <unordered_set>

namespace chaintest {

using json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 9> kPrimitives = {
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void"};

Visibility parse_visibility(const std::string& text, const std::string& path) {
    if (text == "public") return Visibility::Public;
    if (text == "protected") return Visibility::Protected;
    if (text == "package") return Visibility::Package;
    if (text == "private") return Visibility::Private;
    throw SchemaViolationError(path, "invalid visibility '" + text + "'");
}

CallKind parse_call_kind(const std::string& text, const std::string& path) {
    if (text == "static") return CallKind::Static;
    if (text == "virtual") return CallKind::Virtual;
    if (text == "interface") return CallKind::Interface;
    if (text == "special") return CallKind::Special;
    throw SchemaViolationError(path, "invalid call kind '" + text + "'");
}

std::string_view call_kind_text(CallKind kind) {
    switch (kind) {
    case CallKind::Static: return "static";
    case CallKind::Virtual: return "virtual";
    case CallKind::Interface: return "interface";
    case CallKind::Special: return "special";
    }
    return "virtual";
}

void check_type_name(const TypeName& name, const std::string& path) {
    if (name.empty())
        throw SchemaViolationError(path, "type name must be non-empty");
    if (std::any_of(name.begin(), name.end(), [](unsigned char c) { return std::isspace(c); }))
        throw SchemaViolationError(path, "type name '" + name + "' contains whitespace");
}

const json& require_field(const json& obj, const char* key, const std::string& path) {
    auto it = obj.find(key);
    if (it == obj.end())
        throw SchemaViolationError(path, std::string("missing field '") + key + "'");
    return *it;
}

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& path) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            throw SchemaViolationError(path, "unknown key '" + it.key() + "'");
    }
}

std::string get_string(const json& value, const std::string& path) {
    if (!value.is_string())
        throw SchemaViolationError(path, "expected a string");
    return value.get<std::string>();
}

bool get_bool(const json& value, const std::string& path) {
    if (!value.is_boolean())
        throw SchemaViolationError(path, "expected a boolean");
    return value.get<bool>();
}

std::vector<TypeName> get_type_list(const json& value, const std::string& path) {
    if (!value.is_array())
        throw SchemaViolationError(path, "expected an array of type names");
    std::vector<TypeName> out;
    out.reserve(value.size());
    for (std::size_t i = 0; i < value.size(); ++i) {
        std::string item = get_string(value[i], path + "[" + std::to_string(i) + "]");
        check_type_name(item, path + "[" + std::to_string(i) + "]");
        out.push_back(std::move(item));
    }
    return out;
}

CallSite parse_call_site(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw SchemaViolationError(path, "expected a call object");
    reject_unknown_keys(obj, {"kind", "owner", "name", "params"}, path);
    CallSite call;
    call.kind = parse_call_kind(get_string(require_field(obj, "kind", path), path + ".kind"),
                                path + ".kind");
    call.owner = get_string(require_field(obj, "owner", path), path + ".owner");
    check_type_name(call.owner, path + ".owner");
    call.name = get_string(require_field(obj, "name", path), path + ".name");
    if (call.name.empty())
        throw SchemaViolationError(path + ".name", "method name must be non-empty");
    call.params = get_type_list(require_field(obj, "params", path), path + ".params");
    return call;
}

MethodInfo parse_method(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw SchemaViolationError(path, "expected a method object");
    reject_unknown_keys(obj, {"name", "params", "return", "visibility", "static", "abstract", "calls"},
                        path);
    MethodInfo method;
    method.name = get_string(require_field(obj, "name", path), path + ".name");
    if (method.name.empty())
        throw SchemaViolationError(path + ".name", "method name must be non-empty");
    method.params = get_type_list(require_field(obj, "params", path), path + ".params");
    method.return_type = get_string(require_field(obj, "return", path), path + ".return");
    check_type_name(method.return_type, path + ".return");
    method.visibility = parse_visibility(
        get_string(require_field(obj, "visibility", path), path + ".visibility"),
        path + ".visibility");
    method.is_static = get_bool(require_field(obj, "static", path), path + ".static");
    method.is_abstract = get_bool(require_field(obj, "abstract", path), path + ".abstract");
    const json& calls = require_field(obj, "calls", path);
    if (!calls.is_array())
        throw SchemaViolationError(path + ".calls", "expected an array of call objects");
    for (std::size_t i = 0; i < calls.size(); ++i)
        method.calls.push_back(parse_call_site(calls[i], path + ".calls[" + std::to_string(i) + "]"));
    if (method.is_abstract && !method.calls.empty())
        throw SchemaViolationError(path + ".calls", "abstract method must have no call sites");
    return method;
}

ConstructorInfo parse_constructor(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw SchemaViolationError(path, "expected a constructor object");
    reject_unknown_keys(obj, {"visibility", "params"}, path);
    ConstructorInfo ctor;
    ctor.visibility = parse_visibility(
        get_string(require_field(obj, "visibility", path), path + ".visibility"),
        path + ".visibility");
    ctor.params = get_type_list(require_field(obj, "params", path), path + ".params");
    for (std::size_t i = 0; i < ctor.params.size(); ++i) {
        if (ctor.params[i] == "void")
            throw SchemaViolationError(path + ".params[" + std::to_string(i) + "]",
                                       "constructor parameter must not be void");
    }
    return ctor;
}

ClassInfo parse_class(const json& obj, const std::string& path) {
    if (!obj.is_object())
        throw SchemaViolationError(path, "expected a class object");
    reject_unknown_keys(obj,
                        {"name", "visibility", "kind", "abstract", "superclass", "interfaces",
                         "constructors", "methods", "source_path"},
                        path);
    ClassInfo cls;
    cls.name = get_string(require_field(obj, "name", path), path + ".name");
    check_type_name(cls.name, path + ".name");
    cls.visibility = parse_visibility(
        get_string(require_field(obj, "visibility", path), path + ".visibility"),
        path + ".visibility");
    std::string kind = get_string(require_field(obj, "kind", path), path + ".kind");
    if (kind == "class")
        cls.kind = ClassKind::Class;
    else if (kind == "interface")
        cls.kind = ClassKind::Interface;
    else
        throw SchemaViolationError(path + ".kind", "invalid class kind '" + kind + "'");
    cls.is_abstract = get_bool(require_field(obj, "abstract", path), path + ".abstract");

    const json& super = require_field(obj, "superclass", path);
    if (super.is_null()) {
        cls.superclass = std::nullopt;
    } else {
        cls.superclass = get_string(super, path + ".superclass");
        check_type_name(*cls.superclass, path + ".superclass");
    }
    cls.interfaces = get_type_list(require_field(obj, "interfaces", path), path + ".interfaces");

    const json& ctors = require_field(obj, "constructors", path);
    if (!ctors.is_array())
        throw SchemaViolationError(path + ".constructors", "expected an array");
    for (std::size_t i = 0; i < ctors.size(); ++i)
        cls.constructors.push_back(
            parse_constructor(ctors[i], path + ".constructors[" + std::to_string(i) + "]"));

    const json& methods = require_field(obj, "methods", path);
    if (!methods.is_array())
        throw SchemaViolationError(path + ".methods", "expected an array");
    for (std::size_t i = 0; i < methods.size(); ++i)
        cls.methods.push_back(parse_method(methods[i], path + ".methods[" + std::to_string(i) + "]"));

    if (auto it = obj.find("source_path"); it != obj.end()) {
        if (!it->is_null())
            cls.source_path = get_string(*it, path + ".source_path");
    }

    if (cls.kind == ClassKind::Interface) {
        if (!cls.is_abstract)
            throw SchemaViolationError(path + ".abstract", "interfaces must be abstract");
        if (!cls.constructors.empty())
            throw SchemaViolationError(path + ".constructors",
                                       "interfaces must have no constructors");
    }
    return cls;
}

// Per-class signature uniqueness: methods by (name, params), constructors by
// params. Method identity excludes the return type.
void check_signature_uniqueness(const ClassInfo& cls, const std::string& path) {
    std::set<std::pair<std::string, std::vector<TypeName>>> methodSigs;
    for (std::size_t i = 0; i < cls.methods.size(); ++i) {
        if (!methodSigs.insert({cls.methods[i].name, cls.methods[i].params}).second)
            throw SchemaViolationError(path + ".methods[" + std::to_string(i) + "]",
                                       "duplicate method signature '" + cls.methods[i].name + "'");
    }
    std::set<std::vector<TypeName>> ctorSigs;
    for (std::size_t i = 0; i < cls.constructors.size(); ++i) {
        if (!ctorSigs.insert(cls.constructors[i].params).second)
            throw SchemaViolationError(path + ".constructors[" + std::to_string(i) + "]",
                                       "duplicate constructor signature");
    }
}

// Cross-class checks once the full class set is known: records external
// references and enforces that interface-kind call sites target declared
// interfaces when the owner is in facts.
void validate_cross_references(ProgramFacts& facts) {
    std::unordered_set<std::string> declared;
    for (const ClassInfo& cls : facts.classes)
        declared.insert(cls.name);

    auto note_type = [&](const TypeName& t) {
        TypeName element = array_element_type(t);
        if (!is_primitive_type(element) && declared.find(element) == declared.end())
            facts.external_types.insert(element);
    };

    for (std::size_t ci = 0; ci < facts.classes.size(); ++ci) {
        const ClassInfo& cls = facts.classes[ci];
        std::string path = "classes[" + std::to_string(ci) + "]";
        if (cls.superclass)
            note_type(*cls.superclass);
        for (const TypeName& iface : cls.interfaces)
            note_type(iface);
        for (const ConstructorInfo& ctor : cls.constructors)
            for (const TypeName& param : ctor.params)
                note_type(param);
        for (std::size_t mi = 0; mi < cls.methods.size(); ++mi) {
            const MethodInfo& method = cls.methods[mi];
            for (const TypeName& param : method.params)
                note_type(param);
            note_type(method.return_type);
            for (std::size_t si = 0; si < method.calls.size(); ++si) {
                const CallSite& call = method.calls[si];
                note_type(call.owner);
                for (const TypeName& param : call.params)
                    note_type(param);
                if (call.kind == CallKind::Interface && declared.count(call.owner)) {
                    const ClassInfo* owner = facts.find_class(call.owner);
                    if (owner->kind != ClassKind::Interface)
                        throw SchemaViolationError(
                            path + ".methods[" + std::to_string(mi) + "].calls[" +
                                std::to_string(si) + "].owner",
                            "interface call on non-interface owner '" + call.owner + "'");
                }
            }
        }
    }
}

} // namespace

bool is_primitive_type(const TypeName& name) {
    return std::find(kPrimitives.begin(), kPrimitives.end(), name) != kPrimitives.end();
}

bool is_array_type(const TypeName& name) {
    return name.size() >= 2 && name.compare(name.size() - 2, 2, "[]") == 0;
}

TypeName array_element_type(const TypeName& name) {
    TypeName element = name;
    while (is_array_type(element))
        element.resize(element.size() - 2);
    return element;
}

std::string simple_class_name(const TypeName& name) {
    auto pos = name.rfind('.');
    return pos == std::string::npos ? name : name.substr(pos + 1);
}

std::string outer_simple_name(const TypeName& name) {
    std::string simple = simple_class_name(name);
    auto pos = simple.find('$');
    return pos == std::string::npos ? simple : simple.substr(0, pos);
}

std::string package_name(const TypeName& name) {
    auto pos = name.rfind('.');
    return pos == std::string::npos ? std::string{} : name.substr(0, pos);
}

std::string_view to_string(Visibility vis) {
    switch (vis) {
    case Visibility::Public: return "public";
    case Visibility::Protected: return "protected";
    case Visibility::Package: return "package";
    case Visibility::Private: return "private";
    }
    return "package";
}

const ClassInfo* ProgramFacts::find_class(const TypeName& name) const {
    for (const ClassInfo& cls : classes)
        if (cls.name == name)
            return &cls;
    return nullptr;
}

ProgramFacts parse_facts(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const json::parse_error& e) {
        throw MalformedDocumentError(e.what());
    }
    if (!doc.is_object())
        throw SchemaViolationError("$", "top level must be an object");
    reject_unknown_keys(doc, {"classes"}, "$");
    const json& classes = require_field(doc, "classes", "$");
    if (!classes.is_array())
        throw SchemaViolationError("classes", "expected an array");

    ProgramFacts facts;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        std::string path = "classes[" + std::to_string(i) + "]";
        ClassInfo cls = parse_class(classes[i], path);
        if (!seen.insert(cls.name).second)
            throw DuplicateClassError(cls.name);
        check_signature_uniqueness(cls, path);
        facts.classes.push_back(std::move(cls));
    }
    validate_cross_references(facts);
    return facts;
}

std::string serialize_facts(const ProgramFacts& facts) {
    json doc;
    json classes = json::array();
    for (const ClassInfo& cls : facts.classes) {
        json c;
        c["name"] = cls.name;
        c["visibility"] = std::string(to_string(cls.visibility));
        c["kind"] = cls.kind == ClassKind::Interface ? "interface" : "class";
        c["abstract"] = cls.is_abstract;
        c["superclass"] = cls.superclass ? json(*cls.superclass) : json(nullptr);
        c["interfaces"] = cls.interfaces;
        json ctors = json::array();
        for (const ConstructorInfo& ctor : cls.constructors) {
            ctors.push_back({{"visibility", std::string(to_string(ctor.visibility))},
                             {"params", ctor.params}});
        }
        c["constructors"] = std::move(ctors);
        json methods = json::array();
        for (const MethodInfo& method : cls.methods) {
            json m;
            m["name"] = method.name;
            m["params"] = method.params;
            m["return"] = method.return_type;
            m["visibility"] = std::string(to_string(method.visibility));
            m["static"] = method.is_static;
            m["abstract"] = method.is_abstract;
            json calls = json::array();
            for (const CallSite& call : method.calls) {
                calls.push_back({{"kind", std::string(call_kind_text(call.kind))},
                                 {"owner", call.owner},
                                 {"name", call.name},
                                 {"params", call.params}});
            }
            m["calls"] = std::move(calls);
            methods.push_back(std::move(m));
        }
        c["methods"] = std::move(methods);
        if (cls.source_path)
            c["source_path"] = *cls.source_path;
        classes.push_back(std::move(c));
    }
    doc["classes"] = std::move(classes);
    return doc.dump(2) + "\n";
}

} // namespace chaintest
