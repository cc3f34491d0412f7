#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace groupmv {

// Classical feedforward expression: a bit reference, an XOR, or an odd-arity
// majority vote. Immutable; nodes are shared so copies are cheap.
class ClassicalExpr {
public:
    enum class Kind { Bit, Xor, Maj };

    static ClassicalExpr bit(int clbit) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Bit;
        n->clbit = clbit;
        return ClassicalExpr(std::move(n));
    }

    static ClassicalExpr xor_of(ClassicalExpr a, ClassicalExpr b) {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Xor;
        n->args = {std::move(a), std::move(b)};
        return ClassicalExpr(std::move(n));
    }

    static ClassicalExpr majority(std::vector<ClassicalExpr> args) {
        if (args.empty() || args.size() % 2 == 0)
            throw std::invalid_argument("majority arity must be odd");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Maj;
        n->args = std::move(args);
        return ClassicalExpr(std::move(n));
    }

    Kind kind() const { return node_->kind; }

    // Evaluates against recorded classical bits; -1 marks an unassigned bit
    // and reading one is a validation bug, not a recoverable condition.
    int eval(const std::vector<std::int8_t>& bits) const {
        switch (node_->kind) {
            case Kind::Bit: {
                if (node_->clbit < 0 || node_->clbit >= static_cast<int>(bits.size()) ||
                    bits[node_->clbit] < 0)
                    throw std::logic_error("classical expression reads an unassigned bit");
                return bits[node_->clbit];
            }
            case Kind::Xor:
                return node_->args[0].eval(bits) ^ node_->args[1].eval(bits);
            case Kind::Maj: {
                int ones = 0;
                for (const auto& a : node_->args) ones += a.eval(bits);
                int threshold = (static_cast<int>(node_->args.size()) + 1) / 2;
                return ones >= threshold ? 1 : 0;
            }
        }
        throw std::logic_error("unreachable");
    }

    void collect_bits(std::set<int>& out) const {
        if (node_->kind == Kind::Bit) {
            out.insert(node_->clbit);
            return;
        }
        for (const auto& a : node_->args) a.collect_bits(out);
    }

    bool well_formed() const {
        if (node_->kind == Kind::Bit) return node_->clbit >= 0;
        if (node_->kind == Kind::Maj && node_->args.size() % 2 == 0) return false;
        return std::all_of(node_->args.begin(), node_->args.end(),
                           [](const ClassicalExpr& a) { return a.well_formed(); });
    }

    std::string to_string() const {
        std::ostringstream out;
        print(out);
        return out.str();
    }

private:
    struct Node {
        Kind kind = Kind::Bit;
        int clbit = -1;
        std::vector<ClassicalExpr> args;
    };

    explicit ClassicalExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

    void print(std::ostringstream& out) const {
        switch (node_->kind) {
            case Kind::Bit:
                out << "c" << node_->clbit;
                break;
            case Kind::Xor:
                node_->args[0].print(out);
                out << " XOR ";
                node_->args[1].print(out);
                break;
            case Kind::Maj:
                out << "MAJ(";
                for (size_t i = 0; i < node_->args.size(); ++i) {
                    if (i) out << ",";
                    node_->args[i].print(out);
                }
                out << ")";
                break;
        }
    }

    std::shared_ptr<const Node> node_;
};

inline int eval_expr(const ClassicalExpr& expr, const std::vector<std::int8_t>& bits) {
    return expr.eval(bits);
}

enum class OpKind { H, X, Z, S, CX, Measure, Reset, CondX };

struct Operation {
    OpKind kind;
    int q0 = -1;                        // target for 1q ops, control for CX
    int q1 = -1;                        // CX target
    int clbit = -1;                     // Measure destination
    std::optional<ClassicalExpr> cond;  // CondX condition

    static Operation h(int q) { return {OpKind::H, q}; }
    static Operation x(int q) { return {OpKind::X, q}; }
    static Operation z(int q) { return {OpKind::Z, q}; }
    static Operation s(int q) { return {OpKind::S, q}; }
    static Operation cx(int control, int target) { return {OpKind::CX, control, target}; }
    static Operation measure(int q, int clbit) { return {OpKind::Measure, q, -1, clbit}; }
    static Operation reset(int q) { return {OpKind::Reset, q}; }
    static Operation cond_x(int q, ClassicalExpr expr) {
        Operation op{OpKind::CondX, q};
        op.cond = std::move(expr);
        return op;
    }
};

struct DepthInfo {
    int total_depth = 0;
    int two_qubit_depth = 0;
    int cx_count = 0;
    int measure_count = 0;

    // Restart-search ranking: two-qubit depth first, then total depth,
    // then CX count.
    bool better_than(const DepthInfo& o) const {
        if (two_qubit_depth != o.two_qubit_depth) return two_qubit_depth < o.two_qubit_depth;
        if (total_depth != o.total_depth) return total_depth < o.total_depth;
        return cx_count < o.cx_count;
    }
};

// Ordered list of operations over num_qubits qubits and num_clbits
// single-assignment classical bits.
struct DynamicCircuit {
    int num_qubits = 0;
    int num_clbits = 0;
    std::vector<Operation> ops;
    std::map<std::string, std::string> metadata;

    void append(Operation op) { ops.push_back(std::move(op)); }

    int alloc_clbit() { return num_clbits++; }

    std::vector<std::string> validate() const;
    DepthInfo depth() const;
    std::string to_text() const;
    static DynamicCircuit from_text(const std::string& text);
};

inline std::vector<std::string> DynamicCircuit::validate() const {
    std::vector<std::string> violations;
    auto bad_qubit = [&](int q) { return q < 0 || q >= num_qubits; };
    std::vector<int> writer(num_clbits, -1);  // op index that wrote each clbit
    for (size_t i = 0; i < ops.size(); ++i) {
        const auto& op = ops[i];
        std::ostringstream at;
        at << "op " << i << ": ";
        switch (op.kind) {
            case OpKind::H:
            case OpKind::X:
            case OpKind::Z:
            case OpKind::S:
            case OpKind::Reset:
                if (bad_qubit(op.q0)) violations.push_back(at.str() + "qubit out of range");
                break;
            case OpKind::CX:
                if (bad_qubit(op.q0) || bad_qubit(op.q1))
                    violations.push_back(at.str() + "qubit out of range");
                else if (op.q0 == op.q1)
                    violations.push_back(at.str() + "control equals target");
                break;
            case OpKind::Measure:
                if (bad_qubit(op.q0)) violations.push_back(at.str() + "qubit out of range");
                if (op.clbit < 0 || op.clbit >= num_clbits)
                    violations.push_back(at.str() + "classical bit out of range");
                else if (writer[op.clbit] >= 0)
                    violations.push_back(at.str() + "classical bit written twice");
                else
                    writer[op.clbit] = static_cast<int>(i);
                break;
            case OpKind::CondX: {
                if (bad_qubit(op.q0)) violations.push_back(at.str() + "qubit out of range");
                if (!op.cond || !op.cond->well_formed()) {
                    violations.push_back(at.str() + "malformed condition");
                    break;
                }
                std::set<int> reads;
                op.cond->collect_bits(reads);
                for (int b : reads) {
                    if (b < 0 || b >= num_clbits)
                        violations.push_back(at.str() + "condition bit out of range");
                    else if (writer[b] < 0)
                        violations.push_back(at.str() + "read-before-write on c" +
                                             std::to_string(b));
                }
                break;
            }
        }
    }
    return violations;
}

inline DepthInfo DynamicCircuit::depth() const {
    DepthInfo info;
    std::vector<int> qubit_busy(num_qubits, 0);
    std::vector<int> clbit_busy(num_clbits, 0);
    std::set<int> cx_layers;
    for (const auto& op : ops) {
        int start = 0;
        auto touch = [&](int q) { start = std::max(start, qubit_busy[q]); };
        switch (op.kind) {
            case OpKind::CX:
                touch(op.q0);
                touch(op.q1);
                break;
            case OpKind::CondX: {
                touch(op.q0);
                std::set<int> reads;
                op.cond->collect_bits(reads);
                for (int b : reads) start = std::max(start, clbit_busy[b]);
                break;
            }
            case OpKind::Measure:
                touch(op.q0);
                break;
            default:
                touch(op.q0);
                break;
        }
        int layer = start + 1;
        switch (op.kind) {
            case OpKind::CX:
                qubit_busy[op.q0] = qubit_busy[op.q1] = layer;
                cx_layers.insert(layer);
                ++info.cx_count;
                break;
            case OpKind::Measure:
                qubit_busy[op.q0] = layer;
                clbit_busy[op.clbit] = layer;
                ++info.measure_count;
                break;
            default:
                qubit_busy[op.q0] = layer;
                break;
        }
        info.total_depth = std::max(info.total_depth, layer);
    }
    info.two_qubit_depth = static_cast<int>(cx_layers.size());
    return info;
}

namespace detail {

inline std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

// expr := term (XOR term)* ; term := cN | MAJ(expr, expr, ...) | (expr)
inline ClassicalExpr parse_expr(const std::string& text);

inline std::vector<std::string> split_top_level(const std::string& s, char sep) {
    std::vector<std::string> parts;
    int depth = 0;
    std::string cur;
    for (char ch : s) {
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == sep && depth == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline ClassicalExpr parse_term(const std::string& raw) {
    std::string t = trim(raw);
    if (t.empty()) throw std::invalid_argument("empty classical expression term");
    if (t.front() == '(' && t.back() == ')') return parse_expr(t.substr(1, t.size() - 2));
    if (t.rfind("MAJ(", 0) == 0 && t.back() == ')') {
        std::string inner = t.substr(4, t.size() - 5);
        std::vector<ClassicalExpr> args;
        for (const auto& part : split_top_level(inner, ',')) args.push_back(parse_expr(part));
        return ClassicalExpr::majority(std::move(args));
    }
    if (t.front() == 'c') return ClassicalExpr::bit(std::stoi(t.substr(1)));
    throw std::invalid_argument("cannot parse classical expression term: " + t);
}

inline ClassicalExpr parse_expr(const std::string& text) {
    std::string t = trim(text);
    // split on top-level " XOR "
    std::vector<std::string> terms;
    int depth = 0;
    size_t last = 0;
    for (size_t i = 0; i + 5 <= t.size(); ++i) {
        if (t[i] == '(') ++depth;
        if (t[i] == ')') --depth;
        if (depth == 0 && t.compare(i, 5, " XOR ") == 0) {
            terms.push_back(t.substr(last, i - last));
            last = i + 5;
            i += 4;
        }
    }
    terms.push_back(t.substr(last));
    ClassicalExpr e = parse_term(terms[0]);
    for (size_t i = 1; i < terms.size(); ++i)
        e = ClassicalExpr::xor_of(std::move(e), parse_term(terms[i]));
    return e;
}

}  // namespace detail

inline std::string DynamicCircuit::to_text() const {
    std::ostringstream out;
    out << "qubits " << num_qubits << "\n";
    out << "clbits " << num_clbits << "\n";
    for (const auto& [k, v] : metadata) out << "# " << k << " = " << v << "\n";
    for (const auto& op : ops) {
        switch (op.kind) {
            case OpKind::H: out << "H " << op.q0; break;
            case OpKind::X: out << "X " << op.q0; break;
            case OpKind::Z: out << "Z " << op.q0; break;
            case OpKind::S: out << "S " << op.q0; break;
            case OpKind::CX: out << "CX " << op.q0 << " " << op.q1; break;
            case OpKind::Measure: out << "MEASURE " << op.q0 << " -> c" << op.clbit; break;
            case OpKind::Reset: out << "RESET " << op.q0; break;
            case OpKind::CondX:
                out << "CONDX " << op.q0 << " IF " << op.cond->to_string();
                break;
        }
        out << "\n";
    }
    return out.str();
}

inline DynamicCircuit DynamicCircuit::from_text(const std::string& text) {
    DynamicCircuit c;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = detail::trim(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            size_t eq = line.find('=');
            if (eq != std::string::npos)
                c.metadata[detail::trim(line.substr(1, eq - 1))] =
                    detail::trim(line.substr(eq + 1));
            continue;
        }
        std::istringstream ls(line);
        std::string tok;
        ls >> tok;
        if (tok == "qubits") {
            ls >> c.num_qubits;
        } else if (tok == "clbits") {
            ls >> c.num_clbits;
        } else if (tok == "H" || tok == "X" || tok == "Z" || tok == "S" || tok == "RESET") {
            int q;
            ls >> q;
            if (tok == "H") c.append(Operation::h(q));
            else if (tok == "X") c.append(Operation::x(q));
            else if (tok == "Z") c.append(Operation::z(q));
            else if (tok == "S") c.append(Operation::s(q));
            else c.append(Operation::reset(q));
        } else if (tok == "CX") {
            int a, b;
            ls >> a >> b;
            c.append(Operation::cx(a, b));
        } else if (tok == "MEASURE") {
            int q;
            std::string arrow, cl;
            ls >> q >> arrow >> cl;
            if (arrow != "->" || cl.empty() || cl[0] != 'c')
                throw std::invalid_argument("bad MEASURE line: " + line);
            c.append(Operation::measure(q, std::stoi(cl.substr(1))));
        } else if (tok == "CONDX") {
            int q;
            std::string kw;
            ls >> q >> kw;
            if (kw != "IF") throw std::invalid_argument("bad CONDX line: " + line);
            std::string rest;
            std::getline(ls, rest);
            c.append(Operation::cond_x(q, detail::parse_expr(rest)));
        } else {
            throw std::invalid_argument("unknown circuit line: " + line);
        }
    }
    return c;
}

}  // namespace groupmv
