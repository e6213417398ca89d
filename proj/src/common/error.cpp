#include "decent/common/error.hpp"

namespace decent {

const char* to_string(Errc code) noexcept {
    switch (code) {
        case Errc::parse_error: return "parse error";
        case Errc::unknown_attribute: return "unknown attribute";
        case Errc::invalid_argument: return "invalid argument";
        case Errc::malformed: return "malformed encoding";
        case Errc::policy_unsatisfied: return "policy unsatisfied";
        case Errc::revoked: return "revoked";
        case Errc::auth_failure: return "authentication failure";
        case Errc::bad_signature: return "bad signature";
        case Errc::not_found: return "not found";
        case Errc::refused: return "refused";
        case Errc::unavailable: return "unavailable";
        case Errc::io_error: return "i/o error";
    }
    return "unknown";
}

}  // namespace decent
