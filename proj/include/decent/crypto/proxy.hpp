#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "decent/common/ids.hpp"
#include "decent/crypto/group.hpp"
#include "decent/policy/policy.hpp"

namespace decent::crypto {

using policy::AttributeId;
using policy::AttributeSet;

using ProxyEntryKey = std::pair<UserId, AttributeId>;

/// The revocation proxy's secret: one unblinding exponent per issued (holder, attribute).
/// Revoked entries are erased.
struct ProxyState {
    GroupKind group = GroupKind::ristretto255;
    std::map<ProxyEntryKey, Scalar> unblinding;

    bool contains(const UserId& holder, const AttributeId& attr) const {
        return unblinding.contains({holder, attr});
    }
};

/// One of n threshold shares of a ProxyState.
struct ProxyShareState {
    GroupKind group = GroupKind::ristretto255;
    std::uint32_t index = 0;  // Shamir x-coordinate, 1-based
    std::uint32_t threshold = 0;
    std::map<ProxyEntryKey, Scalar> shares;
};

/// Request/response pair of the transform protocol; the simulator carries these over the
/// network.
struct ProxyRequest {
    UserId holder;
    AttributeId attribute;
    Element partial;
    /// Participating share indices for threshold proxies; empty for an unsplit proxy.
    std::vector<std::uint32_t> participants;
};

struct ProxyResponse {
    /// nullopt encodes REVOKED.
    std::optional<Element> result;
};

Bytes encode(const ProxyRequest& req);
ProxyRequest decode_proxy_request(ByteView data);
Bytes encode(const ProxyResponse& resp);
ProxyResponse decode_proxy_response(ByteView data);

/// partial^(unblinding). Throws Error(revoked) if the entry is absent.
Element proxy_transform(const ProxyState& proxy, const UserId& holder, const AttributeId& attr,
                        const Element& partial);

/// partial^(lambda_i * share_i) for the given participant set. Throws Error(revoked) if absent.
Element proxy_transform_share(const ProxyShareState& share, const UserId& holder, const AttributeId& attr,
                              const Element& partial, std::span<const std::uint32_t> participants);

/// Drops the entries; absent entries are ignored. Ciphertexts are never touched.
void revoke(ProxyState& proxy, const UserId& holder, const AttributeSet& attrs);
void revoke(ProxyShareState& share, const UserId& holder, const AttributeSet& attrs);

/// Shamir-splits every unblinding exponent into n shares with threshold t.
std::vector<ProxyShareState> split_proxy(const ProxyState& proxy, std::uint32_t n, std::uint32_t t, Rng& rng);

/// Client side of a proxy. Returns nullopt when the proxy refuses.
class ProxyHandle {
public:
    virtual ~ProxyHandle() = default;
    virtual std::optional<Element> transform(const UserId& holder, const AttributeId& attr, const Element& partial) = 0;
};

/// In-process proxy over a ProxyState the caller keeps alive.
class LocalProxy final : public ProxyHandle {
public:
    explicit LocalProxy(const ProxyState& state) : state_(&state) {}
    std::optional<Element> transform(const UserId& holder, const AttributeId& attr, const Element& partial) override;

private:
    const ProxyState* state_;
};

/// Combines responses from a set of share holders. With fewer than `threshold` endpoints the
/// product is a wrong element rather than an error; the caller notices when the payload fails
/// to open.
class ThresholdProxy final : public ProxyHandle {
public:
    /// Sends one share request; nullopt if that node refuses or is unreachable.
    using Endpoint = std::function<std::optional<Element>(const ProxyRequest&)>;

    ThresholdProxy(GroupKind group, std::vector<std::pair<std::uint32_t, Endpoint>> endpoints);

    std::optional<Element> transform(const UserId& holder, const AttributeId& attr, const Element& partial) override;

private:
    const Group* group_;
    std::vector<std::pair<std::uint32_t, Endpoint>> endpoints_;
};

/// In-process endpoint for one share; `share` must outlive the endpoint.
ThresholdProxy::Endpoint local_share_endpoint(const ProxyShareState& share);

void encode(Writer& out, const ProxyState& state);
ProxyState decode_proxy_state(Reader& in);

}  // namespace decent::crypto
