#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "decent/common/bytes.hpp"
#include "decent/common/error.hpp"

namespace decent::policy {

struct AttributeIdTag {};

/// Opaque 16-byte attribute identifier. Unique per (key authority, attribute); the semantic
/// name stays with the authority.
using AttributeId = FixedBytes<16, AttributeIdTag>;
using AttributeSet = std::set<AttributeId>;
using NameMap = std::map<std::string, AttributeId, std::less<>>;

struct Limits {
    std::size_t max_depth = 16;
    std::size_t max_fanout = 64;
};

/// Monotone boolean formula: leaves name attributes, inner nodes are k-of-n gates.
/// AND is n-of-n, OR is 1-of-n.
class PolicyTree {
public:
    static PolicyTree leaf(const AttributeId& id);
    /// Throws Error(invalid_argument) unless 1 <= k <= children.size().
    static PolicyTree threshold(std::uint32_t k, std::vector<PolicyTree> children);
    static PolicyTree all_of(std::vector<PolicyTree> children);
    static PolicyTree any_of(std::vector<PolicyTree> children);

    bool is_leaf() const { return k_ == 0; }
    const AttributeId& attribute() const { return attribute_; }
    std::uint32_t k() const { return k_; }
    const std::vector<PolicyTree>& children() const { return children_; }

    std::size_t leaf_count() const;
    /// A single leaf has depth 1.
    std::size_t depth() const;
    /// Attributes in leaf preorder; duplicates kept.
    std::vector<AttributeId> leaves() const;

    friend bool operator==(const PolicyTree&, const PolicyTree&) = default;

private:
    PolicyTree() = default;

    AttributeId attribute_{};
    std::uint32_t k_ = 0;
    std::vector<PolicyTree> children_;
};

/// True iff `held` satisfies `policy`.
bool evaluate(const PolicyTree& policy, const AttributeSet& held);

/// Reconstruction plan for a satisfied policy. Mirrors the tree, keeping for every selected
/// gate exactly k children; each selected node records its 1-based position under its parent,
/// which is the Shamir x-coordinate of its share.
struct SelectedNode {
    std::uint32_t position = 0;
    /// Leaf number in preorder when this node is a leaf.
    std::optional<std::uint32_t> leaf_index;
    std::vector<SelectedNode> children;
};

struct SelectedLeaf {
    std::uint32_t leaf_index;
    AttributeId attribute;
};

struct LeafSelection {
    SelectedNode root;
    std::vector<SelectedLeaf> leaves;
};

/// Minimum-cardinality set of held leaves satisfying `policy`, or nullopt if none exists.
std::optional<LeafSelection> select_leaves(const PolicyTree& policy, const AttributeSet& held);

class ParseError : public Error {
public:
    ParseError(Errc code, std::size_t position, const std::string& what)
        : Error(code, "at offset " + std::to_string(position) + ": " + what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Grammar:
///   expr   := term ('OR' term)*
///   term   := factor ('AND' factor)*
///   factor := IDENT | '(' expr ')' | INT 'of' '{' IDENT (',' IDENT)* '}'
/// Chains of the same operator flatten into one gate; parentheses nest.
PolicyTree parse_policy(std::string_view text, const NameMap& names, const Limits& limits = {});

/// Inverse of parse_policy for trees the grammar can express; other gates print as
/// `k of (a, b, ...)`, which is display-only.
std::string to_text(const PolicyTree& policy, const NameMap& names);

/// Canonical binary form: preorder, tag byte (0 leaf / 1 gate), varint k and child count,
/// 16-byte attribute ids.
void encode(Writer& out, const PolicyTree& policy);
Bytes encode(const PolicyTree& policy);
PolicyTree decode(Reader& in, const Limits& limits = {});
PolicyTree decode(ByteView data, const Limits& limits = {});

}  // namespace decent::policy
