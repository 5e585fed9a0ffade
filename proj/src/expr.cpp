#include "sqrtsg/expr.hpp"

#include <algorithm>
#include <cctype>

#include "sqrtsg/errors.hpp"

namespace sqrtsg {

struct Expression::Node {
    enum class Kind { Const, Var, Add, Sub, Mul, Max, Min, Sq, Call };
    Kind kind = Kind::Const;
    Nat value = 0;
    std::size_t var = 0;
    const Expression* callee = nullptr;
    std::vector<std::shared_ptr<const Node>> args;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
    Parser(std::string_view text, const std::vector<std::string>& vars, const FunctionTable* fns)
        : text_(text), vars_(vars), fns_(fns) {}

    NodePtr parse() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ContractError("expression '" + std::string(text_) + "': " + msg + " at column " + std::to_string(pos_ + 1));
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(Node::Kind k, NodePtr a, NodePtr b) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->args = {std::move(a), std::move(b)};
        return n;
    }

    NodePtr sum() {
        NodePtr lhs = product();
        for (;;) {
            if (accept('+')) {
                lhs = binary(Node::Kind::Add, lhs, product());
            } else if (accept('-')) {
                lhs = binary(Node::Kind::Sub, lhs, product());
            } else {
                return lhs;
            }
        }
    }

    NodePtr product() {
        NodePtr lhs = atom();
        while (accept('*')) lhs = binary(Node::Kind::Mul, lhs, atom());
        return lhs;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Nat v = 0;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                v = nat_add(nat_mul(v, 10), static_cast<Nat>(text_[pos_] - '0'));
                ++pos_;
            }
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Const;
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            if (accept('(')) return call(name, start);
            const auto it = std::find(vars_.begin(), vars_.end(), name);
            if (it == vars_.end()) {
                pos_ = start;
                fail("unknown variable '" + name + "'");
            }
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::Var;
            n->var = static_cast<std::size_t>(it - vars_.begin());
            return n;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr call(const std::string& name, std::size_t start) {
        std::vector<NodePtr> args;
        args.push_back(sum());
        while (accept(',')) args.push_back(sum());
        if (!accept(')')) fail("expected ')' or ','");
        auto n = std::make_shared<Node>();
        n->args = std::move(args);
        if (name == "max" || name == "min") {
            n->kind = name == "max" ? Node::Kind::Max : Node::Kind::Min;
            return n;
        }
        if (n->args.size() != 1) {
            pos_ = start;
            fail("function '" + name + "' takes one argument");
        }
        if (name == "sq") {
            n->kind = Node::Kind::Sq;
            return n;
        }
        const Expression* fn = fns_ != nullptr ? fns_->find(name) : nullptr;
        if (fn == nullptr) {
            pos_ = start;
            fail("unknown function '" + name + "'");
        }
        n->kind = Node::Kind::Call;
        n->callee = fn;
        return n;
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    const FunctionTable* fns_;
    std::size_t pos_ = 0;
};

Nat eval_node(const Node& n, std::span<const Nat> args) {
    switch (n.kind) {
        case Node::Kind::Const:
            return n.value;
        case Node::Kind::Var:
            return args[n.var];
        case Node::Kind::Add:
            return nat_add(eval_node(*n.args[0], args), eval_node(*n.args[1], args));
        case Node::Kind::Sub:
            return trunc_sub(eval_node(*n.args[0], args), eval_node(*n.args[1], args));
        case Node::Kind::Mul:
            return nat_mul(eval_node(*n.args[0], args), eval_node(*n.args[1], args));
        case Node::Kind::Sq:
            return nat_sq(eval_node(*n.args[0], args));
        case Node::Kind::Max:
        case Node::Kind::Min: {
            Nat acc = eval_node(*n.args[0], args);
            for (std::size_t i = 1; i < n.args.size(); ++i) {
                const Nat v = eval_node(*n.args[i], args);
                acc = n.kind == Node::Kind::Max ? std::max(acc, v) : std::min(acc, v);
            }
            return acc;
        }
        case Node::Kind::Call:
            return (*n.callee)(eval_node(*n.args[0], args));
    }
    return 0;
}

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables,
                             std::shared_ptr<const FunctionTable> functions) {
    Expression e;
    e.text_ = std::string(text);
    e.variables_ = std::move(variables);
    e.functions_ = std::move(functions);
    Parser p(e.text_, e.variables_, e.functions_.get());
    e.root_ = p.parse();
    return e;
}

Nat Expression::eval(std::span<const Nat> args) const {
    if (args.size() != variables_.size()) throw ContractError("expression '" + text_ + "' called with wrong arity");
    return eval_node(*root_, args);
}

void FunctionTable::define(const std::string& name, std::string_view body) {
    if (name == "max" || name == "min" || name == "sq") throw ContractError("cannot redefine builtin '" + name + "'");
    if (functions_.count(name) != 0) throw ContractError("function '" + name + "' defined twice");
    // non-owning: the table outlives its own entries
    Expression e = Expression::parse(body, {"n"}, std::shared_ptr<const FunctionTable>(std::shared_ptr<void>(), this));
    functions_.emplace(name, std::move(e));
}

const Expression* FunctionTable::find(const std::string& name) const {
    const auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
}

std::vector<std::string> FunctionTable::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : functions_) out.push_back(k);
    return out;
}

}  // namespace sqrtsg
