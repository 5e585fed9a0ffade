#pragma once

// Tiny expression language for counterfunctions and moduli over naturals:
//
//   expr  := term (('+' | '-') term)*      '-' is truncated subtraction
//   term  := atom ('*' atom)*
//   atom  := NUMBER | VAR | NAME '(' expr (',' expr)* ')' | '(' expr ')'
//
// Builtins: max(a, ...), min(a, ...), sq(a). Further unary functions over n
// can be registered in a FunctionTable and composed by name.

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sqrtsg/nat.hpp"

namespace sqrtsg {

class FunctionTable;

class Expression {
public:
    /// Throws ContractError with the column of the offending token.
    static Expression parse(std::string_view text, std::vector<std::string> variables,
                            std::shared_ptr<const FunctionTable> functions = nullptr);

    /// args are bound to the variables in declaration order.
    Nat eval(std::span<const Nat> args) const;
    Nat operator()(Nat n) const { return eval(std::span<const Nat>(&n, 1)); }

    const std::string& text() const noexcept { return text_; }
    std::size_t arity() const noexcept { return variables_.size(); }

    struct Node;

private:
    Expression() = default;
    std::string text_;
    std::vector<std::string> variables_;
    std::shared_ptr<const Node> root_;
    std::shared_ptr<const FunctionTable> functions_;
};

/// Named unary functions over the variable n. A body may only refer to
/// functions defined before it, so definitions cannot recurse.
class FunctionTable {
public:
    void define(const std::string& name, std::string_view body);
    const Expression* find(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    std::map<std::string, Expression> functions_;
};

}  // namespace sqrtsg
