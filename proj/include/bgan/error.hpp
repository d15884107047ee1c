#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bgan {

enum class ErrorCode {
    config,
    dimension,
    validation,
    training,
    convergence,
    io,
    internal,
};

/// Stable, greppable tag for an error code, e.g. "E_CONFIG".
std::string_view error_tag(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace bgan
