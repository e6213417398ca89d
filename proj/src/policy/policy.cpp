#include "decent/policy/policy.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

namespace decent::policy {

PolicyTree PolicyTree::leaf(const AttributeId& id) {
    PolicyTree t;
    t.attribute_ = id;
    return t;
}

PolicyTree PolicyTree::threshold(std::uint32_t k, std::vector<PolicyTree> children) {
    if (children.empty()) throw Error(Errc::invalid_argument, "threshold gate needs at least one child");
    if (k < 1 || k > children.size())
        throw Error(Errc::invalid_argument, "threshold " + std::to_string(k) + " out of range for " +
                                                std::to_string(children.size()) + " children");
    PolicyTree t;
    t.k_ = k;
    t.children_ = std::move(children);
    return t;
}

PolicyTree PolicyTree::all_of(std::vector<PolicyTree> children) {
    auto n = static_cast<std::uint32_t>(children.size());
    return threshold(n, std::move(children));
}

PolicyTree PolicyTree::any_of(std::vector<PolicyTree> children) { return threshold(1, std::move(children)); }

std::size_t PolicyTree::leaf_count() const {
    if (is_leaf()) return 1;
    return std::accumulate(children_.begin(), children_.end(), std::size_t{0},
                           [](std::size_t acc, const PolicyTree& c) { return acc + c.leaf_count(); });
}

std::size_t PolicyTree::depth() const {
    std::size_t deepest = 0;
    for (const auto& c : children_) deepest = std::max(deepest, c.depth());
    return deepest + 1;
}

namespace {

void collect_leaves(const PolicyTree& t, std::vector<AttributeId>& out) {
    if (t.is_leaf()) {
        out.push_back(t.attribute());
        return;
    }
    for (const auto& c : t.children()) collect_leaves(c, out);
}

}  // namespace

std::vector<AttributeId> PolicyTree::leaves() const {
    std::vector<AttributeId> out;
    collect_leaves(*this, out);
    return out;
}

bool evaluate(const PolicyTree& policy, const AttributeSet& held) {
    if (policy.is_leaf()) return held.contains(policy.attribute());
    std::uint32_t satisfied = 0;
    for (const auto& child : policy.children()) {
        if (evaluate(child, held) && ++satisfied >= policy.k()) return true;
    }
    return false;
}

namespace {

struct Plan {
    std::size_t cost;  // leaves used
    SelectedNode node;
};

// `next_leaf` walks leaf numbers in preorder so indices stay aligned with the ciphertext
// even through unsatisfied subtrees.
std::optional<Plan> plan(const PolicyTree& t, const AttributeSet& held, std::uint32_t& next_leaf,
                         std::uint32_t position) {
    if (t.is_leaf()) {
        auto index = next_leaf++;
        if (!held.contains(t.attribute())) return std::nullopt;
        Plan p{1, {}};
        p.node.position = position;
        p.node.leaf_index = index;
        return p;
    }
    std::vector<Plan> satisfied;
    for (std::uint32_t i = 0; i < t.children().size(); ++i) {
        if (auto p = plan(t.children()[i], held, next_leaf, i + 1)) satisfied.push_back(std::move(*p));
    }
    if (satisfied.size() < t.k()) return std::nullopt;
    std::stable_sort(satisfied.begin(), satisfied.end(),
                     [](const Plan& a, const Plan& b) { return a.cost < b.cost; });
    satisfied.resize(t.k());
    std::sort(satisfied.begin(), satisfied.end(),
              [](const Plan& a, const Plan& b) { return a.node.position < b.node.position; });
    Plan out{0, {}};
    out.node.position = position;
    for (auto& p : satisfied) {
        out.cost += p.cost;
        out.node.children.push_back(std::move(p.node));
    }
    return out;
}

void gather(const SelectedNode& n, const std::vector<AttributeId>& all, std::vector<SelectedLeaf>& out) {
    if (n.leaf_index) {
        out.push_back({*n.leaf_index, all[*n.leaf_index]});
        return;
    }
    for (const auto& c : n.children) gather(c, all, out);
}

}  // namespace

std::optional<LeafSelection> select_leaves(const PolicyTree& policy, const AttributeSet& held) {
    std::uint32_t next_leaf = 0;
    auto p = plan(policy, held, next_leaf, 1);
    if (!p) return std::nullopt;
    LeafSelection out;
    out.root = std::move(p->node);
    gather(out.root, policy.leaves(), out.leaves);
    return out;
}

// ---------------------------------------------------------------------------------------------
// Text form

namespace {

enum class Tok { ident, integer, kw_and, kw_or, kw_of, kw_not, lparen, rparen, lbrace, rbrace, comma, end };

const char* describe(Tok t) {
    switch (t) {
        case Tok::ident: return "attribute name";
        case Tok::integer: return "integer";
        case Tok::kw_and: return "'AND'";
        case Tok::kw_or: return "'OR'";
        case Tok::kw_of: return "'of'";
        case Tok::kw_not: return "'NOT'";
        case Tok::lparen: return "'('";
        case Tok::rparen: return "')'";
        case Tok::lbrace: return "'{'";
        case Tok::rbrace: return "'}'";
        case Tok::comma: return "','";
        case Tok::end: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    std::string_view text;
    std::size_t pos;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        std::size_t start = i;
        auto single = [&](Tok k) {
            out.push_back({k, s.substr(i, 1), i});
            ++i;
        };
        switch (c) {
            case '(': single(Tok::lparen); continue;
            case ')': single(Tok::rparen); continue;
            case '{': single(Tok::lbrace); continue;
            case '}': single(Tok::rbrace); continue;
            case ',': single(Tok::comma); continue;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            out.push_back({Tok::integer, s.substr(start, i - start), start});
        } else if (ident_start(c)) {
            while (i < s.size() && ident_char(s[i])) ++i;
            auto word = s.substr(start, i - start);
            Tok kind = Tok::ident;
            if (word == "AND") kind = Tok::kw_and;
            else if (word == "OR") kind = Tok::kw_or;
            else if (word == "of") kind = Tok::kw_of;
            else if (word == "NOT") kind = Tok::kw_not;
            out.push_back({kind, word, start});
        } else {
            throw ParseError(Errc::parse_error, start, std::string("unexpected character '") + c + "'");
        }
    }
    out.push_back({Tok::end, {}, s.size()});
    return out;
}

class Parser {
public:
    Parser(std::string_view text, const NameMap& names) : tokens_(tokenize(text)), names_(names) {}

    PolicyTree parse() {
        auto t = expr();
        expect(Tok::end, "end of input");
        return t;
    }

private:
    const Token& peek() const { return tokens_[pos_]; }
    Token next() { return tokens_[pos_++]; }

    [[noreturn]] void fail(const std::string& expected) const {
        const auto& t = peek();
        if (t.kind == Tok::kw_not)
            throw ParseError(Errc::parse_error, t.pos, "negation is not supported (policies are monotone)");
        std::string found = t.kind == Tok::end ? "end of input" : "'" + std::string(t.text) + "'";
        throw ParseError(Errc::parse_error, t.pos, "expected " + expected + ", found " + found);
    }

    Token expect(Tok kind, const std::string& expected) {
        if (peek().kind != kind) fail(expected);
        return next();
    }

    PolicyTree expr() {
        std::vector<PolicyTree> terms;
        terms.push_back(term());
        while (peek().kind == Tok::kw_or) {
            next();
            terms.push_back(term());
        }
        if (terms.size() == 1) return std::move(terms.front());
        return PolicyTree::any_of(std::move(terms));
    }

    PolicyTree term() {
        std::vector<PolicyTree> factors;
        factors.push_back(factor());
        while (peek().kind == Tok::kw_and) {
            next();
            factors.push_back(factor());
        }
        if (factors.size() == 1) return std::move(factors.front());
        return PolicyTree::all_of(std::move(factors));
    }

    PolicyTree factor() {
        switch (peek().kind) {
            case Tok::ident: return attribute(next());
            case Tok::lparen: {
                next();
                auto inner = expr();
                expect(Tok::rparen, describe(Tok::rparen));
                return inner;
            }
            case Tok::integer: return threshold_clause();
            default: fail("attribute name, '(' or threshold clause");
        }
    }

    PolicyTree threshold_clause() {
        auto k_tok = next();
        std::uint64_t k = 0;
        for (char c : k_tok.text) {
            k = k * 10 + static_cast<std::uint64_t>(c - '0');
            if (k > UINT32_MAX) throw ParseError(Errc::parse_error, k_tok.pos, "threshold too large");
        }
        expect(Tok::kw_of, describe(Tok::kw_of));
        expect(Tok::lbrace, describe(Tok::lbrace));
        std::vector<PolicyTree> members;
        members.push_back(attribute(expect(Tok::ident, describe(Tok::ident))));
        while (peek().kind == Tok::comma) {
            next();
            members.push_back(attribute(expect(Tok::ident, describe(Tok::ident))));
        }
        expect(Tok::rbrace, "',' or '}'");
        if (k == 0 || k > members.size())
            throw ParseError(Errc::invalid_argument, k_tok.pos,
                             "threshold " + std::to_string(k) + " exceeds member count " +
                                 std::to_string(members.size()));
        return PolicyTree::threshold(static_cast<std::uint32_t>(k), std::move(members));
    }

    PolicyTree attribute(const Token& t) {
        auto it = names_.find(t.text);
        if (it == names_.end())
            throw ParseError(Errc::unknown_attribute, t.pos, "unknown attribute '" + std::string(t.text) + "'");
        return PolicyTree::leaf(it->second);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    const NameMap& names_;
};

void check_limits(const PolicyTree& t, const Limits& limits, std::size_t level) {
    if (level > limits.max_depth)
        throw Error(Errc::invalid_argument, "policy deeper than " + std::to_string(limits.max_depth));
    if (t.children().size() > limits.max_fanout)
        throw Error(Errc::invalid_argument, "gate fan-out above " + std::to_string(limits.max_fanout));
    for (const auto& c : t.children()) check_limits(c, limits, level + 1);
}

void print(const PolicyTree& t, const std::map<AttributeId, std::string>& rev, std::string& out, bool nested) {
    if (t.is_leaf()) {
        auto it = rev.find(t.attribute());
        out += it != rev.end() ? it->second : "#" + t.attribute().hex();
        return;
    }
    const auto n = t.children().size();
    const bool all_leaves = std::all_of(t.children().begin(), t.children().end(),
                                        [](const PolicyTree& c) { return c.is_leaf(); });
    if (n > 1 && (t.k() == n || t.k() == 1)) {
        const char* op = t.k() == n ? " AND " : " OR ";
        if (nested) out += '(';
        for (std::size_t i = 0; i < n; ++i) {
            if (i) out += op;
            print(t.children()[i], rev, out, true);
        }
        if (nested) out += ')';
        return;
    }
    out += std::to_string(t.k()) + " of ";
    out += all_leaves ? '{' : '(';
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ", ";
        print(t.children()[i], rev, out, true);
    }
    out += all_leaves ? '}' : ')';
}

}  // namespace

PolicyTree parse_policy(std::string_view text, const NameMap& names, const Limits& limits) {
    auto tree = Parser(text, names).parse();
    check_limits(tree, limits, 1);
    return tree;
}

std::string to_text(const PolicyTree& policy, const NameMap& names) {
    std::map<AttributeId, std::string> rev;
    for (const auto& [name, id] : names) rev.emplace(id, name);
    std::string out;
    print(policy, rev, out, false);
    return out;
}

void encode(Writer& out, const PolicyTree& policy) {
    if (policy.is_leaf()) {
        out.u8(0).fixed(policy.attribute());
        return;
    }
    out.u8(1).varint(policy.k()).varint(policy.children().size());
    for (const auto& c : policy.children()) encode(out, c);
}

Bytes encode(const PolicyTree& policy) {
    Writer w;
    encode(w, policy);
    return std::move(w).take();
}

namespace {

PolicyTree decode_node(Reader& in, const Limits& limits, std::size_t level) {
    if (level > limits.max_depth) throw Error(Errc::malformed, "policy encoding exceeds depth limit");
    switch (in.u8()) {
        case 0: return PolicyTree::leaf(in.fixed<AttributeId>());
        case 1: {
            auto k = in.varint();
            auto n = in.varint();
            if (n == 0 || n > limits.max_fanout || k == 0 || k > n)
                throw Error(Errc::malformed, "invalid threshold gate in policy encoding");
            std::vector<PolicyTree> children;
            children.reserve(n);
            for (std::uint64_t i = 0; i < n; ++i) children.push_back(decode_node(in, limits, level + 1));
            return PolicyTree::threshold(static_cast<std::uint32_t>(k), std::move(children));
        }
        default: throw Error(Errc::malformed, "unknown policy node tag");
    }
}

}  // namespace

PolicyTree decode(Reader& in, const Limits& limits) { return decode_node(in, limits, 1); }

PolicyTree decode(ByteView data, const Limits& limits) {
    Reader r(data);
    auto t = decode(r, limits);
    r.expect_done();
    return t;
}

}  // namespace decent::policy
