#pragma once

#include <stdexcept>
#include <string>

namespace decent {

enum class Errc {
    parse_error,
    unknown_attribute,
    invalid_argument,
    malformed,           // truncated or structurally invalid encoding
    policy_unsatisfied,
    revoked,             // a proxy refused the transform
    auth_failure,        // AEAD tag mismatch
    bad_signature,       // body signature does not verify (forged content)
    not_found,
    refused,
    unavailable,         // no replica answered
    io_error,
};

const char* to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace decent
