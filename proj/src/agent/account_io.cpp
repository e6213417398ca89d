#include "decent/agent/account_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace decent::agent {

using nlohmann::json;

namespace {

template <typename T>
std::string hex_of(const T& value) {
    Writer w;
    if constexpr (requires { objects::encode(w, value); })
        objects::encode(w, value);
    else
        crypto::encode(w, value);
    return to_hex(w.bytes());
}

template <typename F>
auto parse_hex(const json& j, F&& decode) {
    auto bytes = from_hex(j.get<std::string>());
    Reader r(bytes);
    auto value = decode(r);
    r.expect_done();
    return value;
}

template <typename Fixed>
Fixed fixed_of(const json& j) {
    return Fixed::from(from_hex(j.get<std::string>()));
}

}  // namespace

std::string account_to_json(const UserAccount& a) {
    json j;
    j["format"] = "decent-account-v1";
    j["id"] = a.id.name;
    j["master"] = hex_of(a.master);
    j["names"] = json::object();
    for (const auto& [name, id] : a.names) j["names"][name] = id.hex();
    j["params"] = hex_of(a.params);
    j["writer_seed"] = a.writer.seed().hex();
    j["self_key"] = hex_of(a.self_key);
    j["root_ref"] = hex_of(a.root_ref);
    j["profile_id"] = a.profile_id.hex();
    j["wall_id"] = a.wall_id.hex();
    j["wall_sealed"] = hex_of(a.wall_sealed);
    j["wall_key"] = a.wall.key.hex();
    j["clock"] = a.clock;
    j["contacts"] = json::object();
    for (const auto& [name, c] : a.contacts) {
        json cj;
        if (c.root) cj["root"] = hex_of(*c.root);
        if (c.key) cj["key"] = hex_of(*c.key);
        cj["issued"] = c.issued;
        j["contacts"][name] = cj;
    }
    j["key_cache"] = json::object();
    for (const auto& [id, k] : a.key_cache) j["key_cache"][id.hex()] = k.hex();
    return j.dump(2);
}

UserAccount account_from_json(std::string_view text) {
    try {
        auto j = json::parse(text);
        if (j.at("format") != "decent-account-v1") throw Error(Errc::malformed, "unknown account format");
        UserAccount a;
        a.id = UserId{j.at("id").get<std::string>()};
        a.master = parse_hex(j.at("master"), crypto::decode_master_key);
        for (const auto& [name, id] : j.at("names").items()) a.names.emplace(name, fixed_of<policy::AttributeId>(id));
        a.params = parse_hex(j.at("params"), crypto::decode_public_params);
        a.writer = crypto::SigningKey::from_seed(fixed_of<crypto::SigningSeed>(j.at("writer_seed")));
        a.self_key = parse_hex(j.at("self_key"), crypto::decode_contact_key);
        a.root_ref = parse_hex(j.at("root_ref"), objects::decode_reference);
        a.profile_id = fixed_of<ObjectId>(j.at("profile_id"));
        a.wall_id = fixed_of<ObjectId>(j.at("wall_id"));
        a.wall_sealed = parse_hex(j.at("wall_sealed"), objects::decode_sealed);
        a.wall = objects::open_with_key(a.wall_sealed, fixed_of<crypto::SymKey>(j.at("wall_key")), a.writer.verify_key());
        a.clock = j.at("clock").get<std::uint64_t>();
        for (const auto& [name, cj] : j.at("contacts").items()) {
            ContactEntry c;
            c.peer = UserId{name};
            if (cj.contains("root")) c.root = parse_hex(cj["root"], objects::decode_reference);
            if (cj.contains("key")) c.key = parse_hex(cj["key"], crypto::decode_contact_key);
            c.issued = cj.at("issued").get<std::set<std::string>>();
            a.contacts.emplace(name, std::move(c));
        }
        for (const auto& [id, k] : j.at("key_cache").items())
            a.key_cache.emplace(ObjectId::from(from_hex(id)), fixed_of<crypto::SymKey>(k));
        return a;
    } catch (const json::exception& e) {
        throw Error(Errc::malformed, std::string("account file: ") + e.what());
    }
}

void save_account(const std::filesystem::path& path, const UserAccount& account) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        out << account_to_json(account) << '\n';
        if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

UserAccount load_account(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io_error, "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return account_from_json(buf.str());
}

}  // namespace decent::agent
