#include "decent/crypto/proxy.hpp"

#include "decent/common/error.hpp"

namespace decent::crypto {

namespace {

void write_user(Writer& w, const UserId& u) { w.str(u.name); }
UserId read_user(Reader& r) { return UserId{r.str()}; }

[[noreturn]] void refuse(const UserId& holder) {
    throw Error(Errc::revoked, "proxy has no entry for holder '" + holder.name + "'");
}

}  // namespace

Bytes encode(const ProxyRequest& req) {
    Writer w;
    write_user(w, req.holder);
    w.fixed(req.attribute).fixed(req.partial).varint(req.participants.size());
    for (auto p : req.participants) w.u32(p);
    return std::move(w).take();
}

ProxyRequest decode_proxy_request(ByteView data) {
    Reader r(data);
    ProxyRequest req;
    req.holder = read_user(r);
    req.attribute = r.fixed<AttributeId>();
    req.partial = r.fixed<Element>();
    auto n = r.varint();
    if (n > 1024) throw Error(Errc::malformed, "too many participants");
    for (std::uint64_t i = 0; i < n; ++i) req.participants.push_back(r.u32());
    r.expect_done();
    return req;
}

Bytes encode(const ProxyResponse& resp) {
    Writer w;
    if (resp.result) w.u8(0).fixed(*resp.result);
    else w.u8(1);
    return std::move(w).take();
}

ProxyResponse decode_proxy_response(ByteView data) {
    Reader r(data);
    ProxyResponse resp;
    switch (r.u8()) {
        case 0: resp.result = r.fixed<Element>(); break;
        case 1: break;
        default: throw Error(Errc::malformed, "unknown proxy response status");
    }
    r.expect_done();
    return resp;
}

Element proxy_transform(const ProxyState& proxy, const UserId& holder, const AttributeId& attr,
                        const Element& partial) {
    auto it = proxy.unblinding.find({holder, attr});
    if (it == proxy.unblinding.end()) refuse(holder);
    return group(proxy.group).exp(partial, it->second);
}

Element proxy_transform_share(const ProxyShareState& share, const UserId& holder, const AttributeId& attr,
                              const Element& partial, std::span<const std::uint32_t> participants) {
    auto it = share.shares.find({holder, attr});
    if (it == share.shares.end()) refuse(holder);
    const auto& g = group(share.group);
    auto lambda = lagrange_at_zero(g, share.index, participants);
    return g.exp(partial, g.mul(lambda, it->second));
}

void revoke(ProxyState& proxy, const UserId& holder, const AttributeSet& attrs) {
    for (const auto& a : attrs) proxy.unblinding.erase({holder, a});
}

void revoke(ProxyShareState& share, const UserId& holder, const AttributeSet& attrs) {
    for (const auto& a : attrs) share.shares.erase({holder, a});
}

std::vector<ProxyShareState> split_proxy(const ProxyState& proxy, std::uint32_t n, std::uint32_t t, Rng& rng) {
    if (t < 1 || t > n) throw Error(Errc::invalid_argument, "threshold must satisfy 1 <= t <= n");
    const auto& g = group(proxy.group);
    std::vector<ProxyShareState> out(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        out[i].group = proxy.group;
        out[i].index = i + 1;
        out[i].threshold = t;
    }
    std::vector<Scalar> coeffs(t);
    for (const auto& [key, secret] : proxy.unblinding) {
        coeffs[0] = secret;
        for (std::uint32_t j = 1; j < t; ++j) coeffs[j] = g.random_scalar(rng);
        for (std::uint32_t i = 0; i < n; ++i) {
            auto x = g.scalar(i + 1);
            auto acc = coeffs[t - 1];
            for (std::uint32_t j = t - 1; j-- > 0;) acc = g.add(g.mul(acc, x), coeffs[j]);
            out[i].shares.emplace(key, acc);
        }
    }
    return out;
}

std::optional<Element> LocalProxy::transform(const UserId& holder, const AttributeId& attr, const Element& partial) {
    auto it = state_->unblinding.find({holder, attr});
    if (it == state_->unblinding.end()) return std::nullopt;
    return group(state_->group).exp(partial, it->second);
}

ThresholdProxy::ThresholdProxy(GroupKind group_kind, std::vector<std::pair<std::uint32_t, Endpoint>> endpoints)
    : group_(&group(group_kind)), endpoints_(std::move(endpoints)) {
    if (endpoints_.empty()) throw Error(Errc::invalid_argument, "threshold proxy needs at least one endpoint");
}

std::optional<Element> ThresholdProxy::transform(const UserId& holder, const AttributeId& attr,
                                                 const Element& partial) {
    ProxyRequest req{holder, attr, partial, {}};
    for (const auto& [index, _] : endpoints_) req.participants.push_back(index);
    auto acc = group_->identity();
    for (const auto& [index, endpoint] : endpoints_) {
        auto part = endpoint(req);
        if (!part) return std::nullopt;
        acc = group_->combine(acc, *part);
    }
    return acc;
}

ThresholdProxy::Endpoint local_share_endpoint(const ProxyShareState& share) {
    return [&share](const ProxyRequest& req) -> std::optional<Element> {
        if (!share.shares.contains({req.holder, req.attribute})) return std::nullopt;
        return proxy_transform_share(share, req.holder, req.attribute, req.partial, req.participants);
    };
}

void encode(Writer& out, const ProxyState& state) {
    out.u8(static_cast<std::uint8_t>(state.group)).varint(state.unblinding.size());
    for (const auto& [key, scalar] : state.unblinding) {
        write_user(out, key.first);
        out.fixed(key.second).fixed(scalar);
    }
}

ProxyState decode_proxy_state(Reader& in) {
    ProxyState s;
    s.group = static_cast<GroupKind>(in.u8());
    (void)group(s.group);
    auto n = in.varint();
    for (std::uint64_t i = 0; i < n; ++i) {
        auto holder = read_user(in);
        auto attr = in.fixed<AttributeId>();
        s.unblinding.emplace(ProxyEntryKey{std::move(holder), attr}, in.fixed<Scalar>());
    }
    return s;
}

}  // namespace decent::crypto
