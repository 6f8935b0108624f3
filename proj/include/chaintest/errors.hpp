// errors.hpp - Error taxonomy shared across the analysis and orchestration layers.
//
// Input and analysis failures are reported as exceptions derived from
// ChainError; each carries a Kind so callers (notably the CLI) can map a
// failure class to an exit status without string matching. Recoverable
// backend failures use Expected<T> instead (see expected.hpp).

#pragma once

#include <stdexcept>
#include <string>

namespace chaintest {

enum class ErrorKind {
    MalformedDocument,
    SchemaViolation,
    DuplicateClass,
    CyclicHierarchy,
    UnknownClass,
    NoSuchMethod,
    UnknownReceiver,
    TokenBudgetExceeded,
    NoCodeFound,
};

class ChainError : public std::runtime_error {
public:
    ChainError(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct MalformedDocumentError : ChainError {
    explicit MalformedDocumentError(const std::string& message)
        : ChainError(ErrorKind::MalformedDocument, message) {}
};

struct SchemaViolationError : ChainError {
    // `path` names the offending location, e.g. "classes[2].methods[0].params".
    SchemaViolationError(const std::string& path, const std::string& message)
        : ChainError(ErrorKind::SchemaViolation, path + ": " + message), path_(path) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

struct DuplicateClassError : ChainError {
    explicit DuplicateClassError(const std::string& className)
        : ChainError(ErrorKind::DuplicateClass, "duplicate class: " + className) {}
};

struct CyclicHierarchyError : ChainError {
    explicit CyclicHierarchyError(const std::string& className)
        : ChainError(ErrorKind::CyclicHierarchy,
                     "cyclic hierarchy involving class: " + className) {}
};

struct UnknownClassError : ChainError {
    explicit UnknownClassError(const std::string& className)
        : ChainError(ErrorKind::UnknownClass, "unknown class: " + className) {}
};

struct NoSuchMethodError : ChainError {
    NoSuchMethodError(const std::string& className, const std::string& methodName)
        : ChainError(ErrorKind::NoSuchMethod,
                     "no method named '" + methodName + "' in class " + className) {}
};

struct UnknownReceiverError : ChainError {
    explicit UnknownReceiverError(const std::string& receiver)
        : ChainError(ErrorKind::UnknownReceiver, "unknown receiver type: " + receiver) {}
};

struct TokenBudgetExceededError : ChainError {
    TokenBudgetExceededError(std::size_t size, std::size_t budget)
        : ChainError(ErrorKind::TokenBudgetExceeded,
                     "prompt of " + std::to_string(size) +
                         " characters exceeds budget of " + std::to_string(budget)) {}
};

struct NoCodeFoundError : ChainError {
    NoCodeFoundError()
        : ChainError(ErrorKind::NoCodeFound, "model response contains no test code") {}
};

} // namespace chaintest
