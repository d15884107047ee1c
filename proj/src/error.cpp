#include "bgan/error.hpp"

namespace bgan {

std::string_view error_tag(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::config: return "E_CONFIG";
        case ErrorCode::dimension: return "E_DIMENSION";
        case ErrorCode::validation: return "E_VALIDATION";
        case ErrorCode::training: return "E_TRAINING";
        case ErrorCode::convergence: return "E_CONVERGENCE";
        case ErrorCode::io: return "E_IO";
        case ErrorCode::internal: return "E_INTERNAL";
    }
    return "E_UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_tag(code)) + ": " + message), code_(code) {}

}  // namespace bgan
