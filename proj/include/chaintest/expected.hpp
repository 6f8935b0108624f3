// expected.hpp - Minimal result type for recoverable backend failures.

#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <utility>

namespace chaintest {

struct BackendError {
    std::string message;
};

// Either a value or a BackendError. Model and runner backends return this so
// the orchestrator can degrade gracefully instead of unwinding the session.
template <typename T>
class Expected {
public:
    Expected(T value) : value_(std::move(value)) {}
    Expected(BackendError error) : error_(std::move(error)) {}

    explicit operator bool() const noexcept { return value_.has_value(); }
    bool has_value() const noexcept { return value_.has_value(); }

    const T& value() const& {
        assert(value_.has_value());
        return *value_;
    }
    T&& value() && {
        assert(value_.has_value());
        return std::move(*value_);
    }

    const BackendError& error() const {
        assert(!value_.has_value());
        return error_;
    }

private:
    std::optional<T> value_;
    BackendError error_;
};

} // namespace chaintest
