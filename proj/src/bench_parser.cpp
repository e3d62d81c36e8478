#include <cctype>
#include <unordered_map>

#include "splitsec/error.hpp"
#include "splitsec/netlist.hpp"

namespace splitsec {

namespace {

struct Declaration {
    enum class Type { Input, Output, Gate } type;
    std::string name; // signal name; for outputs the observed signal
    GateKind kind = GateKind::Buf;
    std::vector<std::string> args;
    std::size_t line = 0;
};

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && is_space(s.front()))
        s.remove_prefix(1);
    while (!s.empty() && is_space(s.back()))
        s.remove_suffix(1);
    return s;
}

bool valid_identifier(std::string_view s)
{
    if (s.empty())
        return false;
    for (char c : s)
        if (is_space(c) || c == '(' || c == ')' || c == ',' || c == '=' || c == '#')
            return false;
    return true;
}

bool iequals(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::toupper(static_cast<unsigned char>(a[i])) != std::toupper(static_cast<unsigned char>(b[i])))
            return false;
    return true;
}

// Splits "KEYWORD ( a, b, c )" into keyword and argument list.
bool split_call(std::string_view text, std::string_view &keyword, std::vector<std::string> &args)
{
    auto open = text.find('(');
    if (open == std::string_view::npos || text.back() != ')')
        return false;
    keyword = trim(text.substr(0, open));
    std::string_view inner = text.substr(open + 1, text.size() - open - 2);
    args.clear();
    if (trim(inner).empty())
        return true;
    while (true) {
        auto comma = inner.find(',');
        args.emplace_back(trim(inner.substr(0, comma)));
        if (comma == std::string_view::npos)
            break;
        inner.remove_prefix(comma + 1);
    }
    return true;
}

Declaration parse_line(std::string_view text, std::size_t line)
{
    Declaration d;
    d.line = line;
    std::string_view keyword;
    std::vector<std::string> args;

    auto eq = text.find('=');
    if (eq == std::string_view::npos) {
        if (!split_call(text, keyword, args))
            throw ParseError(line, "expected INPUT(x), OUTPUT(x) or 'x = GATE(...)'");
        if (iequals(keyword, "INPUT"))
            d.type = Declaration::Type::Input;
        else if (iequals(keyword, "OUTPUT"))
            d.type = Declaration::Type::Output;
        else
            throw ParseError(line, "unknown declaration '" + std::string(keyword) + "'");
        if (args.size() != 1 || !valid_identifier(args[0]))
            throw ParseError(line, std::string(keyword) + " takes exactly one signal name");
        d.name = args[0];
        return d;
    }

    d.type = Declaration::Type::Gate;
    d.name = std::string(trim(text.substr(0, eq)));
    if (!valid_identifier(d.name))
        throw ParseError(line, "invalid signal name '" + d.name + "'");
    if (!split_call(trim(text.substr(eq + 1)), keyword, args))
        throw ParseError(line, "expected GATE(a, b, ...) after '='");
    auto kind = kind_from_keyword(keyword);
    if (!kind || is_pad_kind(*kind))
        throw ParseError(line, "unsupported gate kind '" + std::string(keyword) + "'");
    for (const auto &a : args)
        if (!valid_identifier(a))
            throw ParseError(line, "invalid signal name '" + a + "' in fan-in of '" + d.name + "'");
    d.kind = *kind;
    d.args = std::move(args);
    return d;
}

} // namespace

NetlistGraph parse_bench(std::string_view text)
{
    std::vector<Declaration> decls;
    std::size_t line = 0;
    while (!text.empty()) {
        ++line;
        auto nl = text.find('\n');
        std::string_view raw = text.substr(0, nl);
        text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
        auto hash = raw.find('#');
        std::string_view body = trim(raw.substr(0, hash));
        if (!body.empty())
            decls.push_back(parse_line(body, line));
    }

    std::vector<Gate> gates;
    std::unordered_map<std::string, GateId> signals;
    std::unordered_map<std::string, std::size_t> output_lines;
    gates.reserve(decls.size());
    for (const auto &d : decls) {
        Gate gate;
        gate.id = static_cast<GateId>(gates.size());
        gate.line = d.line;
        switch (d.type) {
        case Declaration::Type::Input:
            gate.name = d.name;
            gate.kind = GateKind::Input;
            break;
        case Declaration::Type::Output:
            if (!output_lines.emplace(d.name, d.line).second)
                throw ParseError(d.line, "duplicate OUTPUT(" + d.name + ")");
            gate.name = output_pad_name(d.name);
            gate.kind = GateKind::Output;
            gate.fanin = 1;
            break;
        case Declaration::Type::Gate:
            gate.name = d.name;
            gate.kind = d.kind;
            gate.fanin = static_cast<std::uint32_t>(d.args.size());
            break;
        }
        if (d.type != Declaration::Type::Output && !signals.emplace(d.name, gate.id).second)
            throw ParseError(d.line, "duplicate definition of '" + d.name + "'");
        gates.push_back(std::move(gate));
    }

    std::vector<Edge> edges;
    auto resolve = [&](const std::string &name, std::size_t at) {
        auto it = signals.find(name);
        if (it == signals.end())
            throw ParseError(at, "undefined signal '" + name + "'");
        return it->second;
    };
    for (std::size_t i = 0; i < decls.size(); ++i) {
        const auto &d = decls[i];
        const auto sink = static_cast<GateId>(i);
        if (d.type == Declaration::Type::Output)
            edges.push_back({resolve(d.name, d.line), sink, 0});
        else if (d.type == Declaration::Type::Gate)
            for (std::uint32_t pin = 0; pin < d.args.size(); ++pin)
                edges.push_back({resolve(d.args[pin], d.line), sink, pin});
    }

    return NetlistGraph::build(std::move(gates), std::move(edges));
}

} // namespace splitsec
