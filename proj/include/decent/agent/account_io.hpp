#pragma once

#include <filesystem>
#include <string>

#include "decent/agent/agent.hpp"

namespace decent::agent {

/// JSON text; binary fields are hex of their canonical encoding.
std::string account_to_json(const UserAccount& account);
/// Throws Error(malformed).
UserAccount account_from_json(std::string_view text);

void save_account(const std::filesystem::path& path, const UserAccount& account);
UserAccount load_account(const std::filesystem::path& path);

}  // namespace decent::agent
