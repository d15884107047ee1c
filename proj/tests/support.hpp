#pragma once

#include <doctest.h>

#include <optional>

#include "bgan/error.hpp"

// Runs f and returns the code of the bgan::Error it throws, if any.
template <typename F>
std::optional<bgan::ErrorCode> error_code_of(F&& f) {
    try {
        f();
    } catch (const bgan::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

#define CHECK_ERROR_CODE(expr, code) CHECK(error_code_of([&] { (void)(expr); }) == std::optional(code))
