#include "jqml/parser.hpp"

#include "jqml/lexer.hpp"

#include <charconv>
#include <set>

namespace jqml {

namespace {

std::optional<CompareOp> comparison_op(const Token& t) {
  if (t.kind != TokenKind::Name) return std::nullopt;
  if (t.text == "eq") return CompareOp::Eq;
  if (t.text == "ne") return CompareOp::Ne;
  if (t.text == "lt") return CompareOp::Lt;
  if (t.text == "le") return CompareOp::Le;
  if (t.text == "gt") return CompareOp::Gt;
  if (t.text == "ge") return CompareOp::Ge;
  return std::nullopt;
}

std::string describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::End: return "end of input";
    case TokenKind::String: return "string literal";
    case TokenKind::Variable: return "$" + t.text;
    default: return "'" + t.text + "'";
  }
}

Expr make(Expr::Node node, SourcePos pos) {
  Expr e;
  e.node = std::move(node);
  e.pos = pos;
  return e;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(lex(text)) {}

  Module module() {
    Module m;
    std::set<std::pair<std::string, std::size_t>> seen;
    while (peek().is_name("declare") && peek(1).is_name("function")) {
      FunctionDecl decl = function_decl();
      if (!seen.emplace(decl.name, decl.arity()).second) {
        fail(ErrorCode::DuplicateFunction,
             "function " + decl.name + "#" + std::to_string(decl.arity()) + " is declared twice",
             decl.pos);
      }
      m.functions.push_back(std::move(decl));
    }
    m.body = expr();
    expect_end();
    return m;
  }

  Expr standalone_expr() {
    Expr e = expr();
    expect_end();
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  const Token& take() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }

  [[noreturn]] void unexpected(std::string_view expected) const {
    fail(ErrorCode::ParseError,
         "expected " + std::string(expected) + ", found " + describe(peek()), peek().pos);
  }

  void expect_symbol(std::string_view s) {
    if (!peek().is_symbol(s)) unexpected("'" + std::string(s) + "'");
    take();
  }
  void expect_name(std::string_view s) {
    if (!peek().is_name(s)) unexpected("'" + std::string(s) + "'");
    take();
  }
  void expect_end() {
    if (peek().kind != TokenKind::End) unexpected("end of input");
  }
  std::string expect_variable() {
    if (peek().kind != TokenKind::Variable) unexpected("a variable");
    return take().text;
  }

  FunctionDecl function_decl() {
    FunctionDecl decl;
    decl.pos = peek().pos;
    take();
    take();
    if (peek().kind != TokenKind::Name) unexpected("a function name");
    decl.name = take().text;
    expect_symbol("(");
    std::set<std::string> names;
    if (!peek().is_symbol(")")) {
      do {
        SourcePos at = peek().pos;
        Param p;
        p.name = expect_variable();
        if (!names.insert(p.name).second) {
          fail(ErrorCode::ParseError, "duplicate parameter $" + p.name, at);
        }
        if (peek().is_name("as")) {
          take();
          p.type = sequence_type();
        }
        decl.params.push_back(std::move(p));
      } while (peek().is_symbol(",") && (take(), true));
    }
    expect_symbol(")");
    if (peek().is_name("as")) {
      take();
      decl.result = sequence_type();
    }
    expect_symbol("{");
    decl.body = expr();
    expect_symbol("}");
    if (peek().is_symbol(";")) take();
    return decl;
  }

  SequenceType sequence_type() {
    SequenceType type;
    const Token& t = peek();
    if (t.is_symbol("(")) {
      take();
      type = sequence_type();
      expect_symbol(")");
      type.occurrence = Occurrence::One;
    } else if (t.kind != TokenKind::Name) {
      unexpected("a sequence type");
    } else if (t.text == "item") {
      take();
      expect_symbol("(");
      expect_symbol(")");
      type.test = SequenceType::ItemTest::Item;
    } else if (t.text == "object") {
      take();
      type.test = SequenceType::ItemTest::Object;
    } else if (t.text == "array") {
      take();
      type.test = SequenceType::ItemTest::Array;
    } else if (t.text == "function") {
      take();
      expect_symbol("(");
      type.test = SequenceType::ItemTest::Function;
      if (peek().is_symbol("*")) {
        take();
        expect_symbol(")");
      } else {
        FunctionSignature sig;
        if (!peek().is_symbol(")")) {
          do {
            sig.params.push_back(sequence_type());
          } while (peek().is_symbol(",") && (take(), true));
        }
        expect_symbol(")");
        expect_name("as");
        sig.result = sequence_type();
        type.signature = std::make_shared<const FunctionSignature>(std::move(sig));
      }
    } else if (auto kind = kind_from_name(t.text)) {
      take();
      type.test = SequenceType::ItemTest::Atomic;
      type.atomic = *kind;
    } else {
      fail(ErrorCode::ParseError, "unknown type " + t.text, t.pos);
    }
    type.occurrence = Occurrence::One;
    if (peek().is_symbol("?")) {
      take();
      type.occurrence = Occurrence::ZeroOrOne;
    } else if (peek().is_symbol("*")) {
      take();
      type.occurrence = Occurrence::ZeroOrMore;
    } else if (peek().is_symbol("+")) {
      take();
      type.occurrence = Occurrence::OneOrMore;
    }
    return type;
  }

  // Expr := ExprSingle ("," ExprSingle)*
  Expr expr() {
    SourcePos pos = peek().pos;
    Expr first = expr_single();
    if (!peek().is_symbol(",")) return first;
    CommaExpr comma;
    comma.items.push_back(std::move(first));
    while (peek().is_symbol(",")) {
      take();
      comma.items.push_back(expr_single());
    }
    return make(std::move(comma), pos);
  }

  bool at_flwor_start() const {
    return (peek().is_name("for") || peek().is_name("let")) && peek(1).kind == TokenKind::Variable;
  }

  Expr expr_single() {
    if (at_flwor_start()) return flwor();
    if (peek().is_name("if") && peek(1).is_symbol("(")) return if_expr();
    return or_expr();
  }

  Expr flwor() {
    SourcePos pos = peek().pos;
    FlworExpr f;
    while (at_flwor_start()) {
      bool is_for = peek().is_name("for");
      take();
      do {
        if (is_for) {
          ForClause c;
          c.var = expect_variable();
          if (peek().is_name("at")) {
            take();
            c.position_var = expect_variable();
          }
          expect_name("in");
          c.in = expr_single();
          f.clauses.emplace_back(std::move(c));
        } else {
          LetClause c;
          c.var = expect_variable();
          expect_symbol(":=");
          c.value = expr_single();
          f.clauses.emplace_back(std::move(c));
        }
      } while (peek().is_symbol(",") && peek(1).kind == TokenKind::Variable && (take(), true));
    }
    if (peek().is_name("where")) {
      take();
      f.clauses.emplace_back(WhereClause{expr_single()});
    }
    if (peek().is_name("order")) {
      take();
      expect_name("by");
      OrderByClause c;
      c.key = expr_single();
      if (peek().is_name("ascending")) {
        take();
      } else if (peek().is_name("descending")) {
        take();
        c.descending = true;
      }
      f.clauses.emplace_back(std::move(c));
    }
    if (!peek().is_name("return")) {
      unexpected(f.clauses.size() == 1 || std::holds_alternative<OrderByClause>(f.clauses.back())
                     ? "'return'"
                     : "'for', 'let', 'where', 'order' or 'return'");
    }
    take();
    f.result = expr_single();
    return make(std::move(f), pos);
  }

  Expr if_expr() {
    SourcePos pos = take().pos;
    expect_symbol("(");
    IfExpr e;
    e.condition = expr();
    expect_symbol(")");
    expect_name("then");
    e.then_branch = expr_single();
    expect_name("else");
    e.else_branch = expr_single();
    return make(std::move(e), pos);
  }

  Expr or_expr() {
    Expr lhs = and_expr();
    while (peek().is_name("or")) {
      SourcePos pos = take().pos;
      lhs = make(LogicExpr{false, std::move(lhs), and_expr()}, pos);
    }
    return lhs;
  }

  Expr and_expr() {
    Expr lhs = not_expr();
    while (peek().is_name("and")) {
      SourcePos pos = take().pos;
      lhs = make(LogicExpr{true, std::move(lhs), not_expr()}, pos);
    }
    return lhs;
  }

  Expr not_expr() {
    if (peek().is_name("not") && !peek(1).is_symbol("#") && starts_operand(peek(1))) {
      SourcePos pos = take().pos;
      return make(NotExpr{not_expr()}, pos);
    }
    return comparison();
  }

  static bool starts_operand(const Token& t) {
    switch (t.kind) {
      case TokenKind::Name:
      case TokenKind::Variable:
      case TokenKind::ContextItem:
      case TokenKind::String:
      case TokenKind::Integer:
      case TokenKind::Decimal:
      case TokenKind::Double:
        return true;
      case TokenKind::Symbol:
        return t.text == "(" || t.text == "{" || t.text == "{|" || t.text == "[" || t.text == "-";
      case TokenKind::End:
        return false;
    }
    return false;
  }

  Expr comparison() {
    Expr lhs = range();
    if (auto op = comparison_op(peek())) {
      SourcePos pos = take().pos;
      lhs = make(ComparisonExpr{*op, std::move(lhs), range()}, pos);
      if (comparison_op(peek())) unexpected("an operator other than a comparison");
    }
    return lhs;
  }

  Expr range() {
    Expr lhs = additive();
    if (peek().is_name("to")) {
      SourcePos pos = take().pos;
      lhs = make(RangeExpr{std::move(lhs), additive()}, pos);
    }
    return lhs;
  }

  Expr additive() {
    Expr lhs = multiplicative();
    while (peek().is_symbol("+") || peek().is_symbol("-")) {
      const Token& t = take();
      ArithOp op = t.text == "+" ? ArithOp::Add : ArithOp::Sub;
      lhs = make(ArithmeticExpr{op, std::move(lhs), multiplicative()}, t.pos);
    }
    return lhs;
  }

  Expr multiplicative() {
    Expr lhs = unary();
    while (true) {
      const Token& t = peek();
      ArithOp op;
      if (t.is_symbol("*")) {
        op = ArithOp::Mul;
      } else if (t.is_name("div")) {
        op = ArithOp::Div;
      } else if (t.is_name("idiv")) {
        op = ArithOp::IDiv;
      } else if (t.is_name("mod")) {
        op = ArithOp::Mod;
      } else {
        return lhs;
      }
      SourcePos pos = take().pos;
      lhs = make(ArithmeticExpr{op, std::move(lhs), unary()}, pos);
    }
  }

  Expr unary() {
    if (peek().is_symbol("-")) {
      SourcePos pos = take().pos;
      return make(NegateExpr{unary()}, pos);
    }
    return postfix();
  }

  Expr postfix() {
    Expr e = primary();
    while (true) {
      if (peek().is_symbol("[")) {
        SourcePos pos = take().pos;
        Expr cond = expr();
        expect_symbol("]");
        e = make(PredicateExpr{std::move(e), std::move(cond)}, pos);
      } else if (peek().is_symbol(".")) {
        SourcePos pos = take().pos;
        e = make(LookupExpr{std::move(e), lookup_key()}, pos);
      } else if (peek().is_symbol("(")) {
        SourcePos pos = peek().pos;
        DynamicCallExpr call;
        call.target = std::move(e);
        call.args = arguments();
        e = make(std::move(call), pos);
      } else {
        return e;
      }
    }
  }

  Expr lookup_key() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Name:
      case TokenKind::String:
        take();
        return make(LiteralExpr{AtomicValue::string(t.text)}, t.pos);
      case TokenKind::Variable:
        take();
        return make(VarRefExpr{t.text}, t.pos);
      default:
        break;
    }
    if (t.is_symbol("(")) {
      take();
      Expr key = expr();
      expect_symbol(")");
      return key;
    }
    unexpected("an object key after '.'");
  }

  std::vector<Expr> arguments() {
    expect_symbol("(");
    std::vector<Expr> args;
    if (!peek().is_symbol(")")) {
      do {
        args.push_back(expr_single());
      } while (peek().is_symbol(",") && (take(), true));
    }
    expect_symbol(")");
    return args;
  }

  Expr primary() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    switch (t.kind) {
      case TokenKind::Integer: {
        take();
        return make(LiteralExpr{AtomicValue::integer(bigint_from_digits(t.text))}, pos);
      }
      case TokenKind::Decimal: {
        take();
        return make(LiteralExpr{AtomicValue::decimal(*Decimal::parse(t.text))}, pos);
      }
      case TokenKind::Double: {
        take();
        double value = 0;
        auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (res.ec != std::errc()) fail(ErrorCode::ParseError, "double literal out of range", pos);
        return make(LiteralExpr{AtomicValue::double_value(value)}, pos);
      }
      case TokenKind::String:
        take();
        return make(LiteralExpr{AtomicValue::string(t.text)}, pos);
      case TokenKind::Variable:
        take();
        return make(VarRefExpr{t.text}, pos);
      case TokenKind::ContextItem:
        take();
        return make(ContextItemExpr{}, pos);
      case TokenKind::Name:
        return name_primary();
      case TokenKind::Symbol:
        break;
      case TokenKind::End:
        unexpected("an expression");
    }
    if (t.is_symbol("(")) {
      take();
      if (peek().is_symbol(")")) {
        take();
        return make(CommaExpr{}, pos);
      }
      Expr inner = expr();
      expect_symbol(")");
      return inner;
    }
    if (t.is_symbol("{|")) {
      take();
      Expr inner = expr();
      expect_symbol("|}");
      return make(MergedObjectExpr{std::move(inner)}, pos);
    }
    if (t.is_symbol("{")) return object_constructor();
    if (t.is_symbol("[")) {
      take();
      ArrayExpr a;
      if (!peek().is_symbol("]")) a.content = expr();
      expect_symbol("]");
      return make(std::move(a), pos);
    }
    unexpected("an expression");
  }

  Expr name_primary() {
    const Token& t = peek();
    SourcePos pos = t.pos;
    const Token& next = peek(1);
    if (t.text == "if" && next.is_symbol("(")) return if_expr();
    if (next.is_symbol("#")) {
      take();
      take();
      if (peek().kind != TokenKind::Integer) unexpected("an arity after '#'");
      int arity = std::stoi(take().text);
      return make(FunctionRefExpr{t.text, arity, {}}, pos);
    }
    if (next.is_symbol("(")) {
      take();
      StaticCallExpr call;
      call.name = t.text;
      call.args = arguments();
      return make(std::move(call), pos);
    }
    if (t.text == "true" || t.text == "false") {
      take();
      return make(LiteralExpr{AtomicValue::boolean(t.text == "true")}, pos);
    }
    if (t.text == "null") {
      take();
      return make(LiteralExpr{AtomicValue::null()}, pos);
    }
    unexpected("an expression");
  }

  Expr object_constructor() {
    SourcePos pos = take().pos;
    ObjectExpr obj;
    if (!peek().is_symbol("}")) {
      do {
        ObjectEntry entry;
        if (peek().kind == TokenKind::Name && peek(1).is_symbol(":")) {
          const Token& key = take();
          entry.key = make(LiteralExpr{AtomicValue::string(key.text)}, key.pos);
        } else {
          entry.key = expr_single();
        }
        expect_symbol(":");
        entry.value = expr_single();
        obj.entries.push_back(std::move(entry));
      } while (peek().is_symbol(",") && (take(), true));
    }
    if (!peek().is_symbol("}")) unexpected("',' or '}'");
    take();
    return make(std::move(obj), pos);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- printing

void print_string_literal(const std::string& s, std::string& out) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          static const char* hex = "0123456789abcdef";
          out += "\\u00";
          out += hex[(c >> 4) & 0xF];
          out += hex[c & 0xF];
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

void print_literal(const AtomicValue& v, std::string& out) {
  switch (v.kind()) {
    case AtomicKind::String: print_string_literal(v.as_string(), out); return;
    case AtomicKind::Boolean: out += v.as_bool() ? "true" : "false"; return;
    case AtomicKind::Null: out += "null"; return;
    case AtomicKind::Decimal: {
      std::string s = v.as_decimal().to_string();
      if (s.find('.') == std::string::npos) s += ".0";
      out += s;
      return;
    }
    case AtomicKind::Double: {
      std::string s = format_double(v.as_double());
      if (s.find('e') == std::string::npos && s.find('E') == std::string::npos) s += "e0";
      out += s;
      return;
    }
    default:
      out += v.lexical();
      return;
  }
}

void print(const Expr& e, std::string& out);

void print_args(const std::vector<Expr>& args, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    print(args[i], out);
  }
  out += ')';
}

struct Printer {
  std::string& out;

  void operator()(const LiteralExpr& e) { print_literal(e.value, out); }
  void operator()(const VarRefExpr& e) { out += "$" + e.name; }
  void operator()(const ContextItemExpr&) { out += "$$"; }
  void operator()(const CommaExpr& e) { print_args(e.items, out); }
  void operator()(const FlworExpr& e) {
    out += '(';
    for (const Clause& clause : e.clauses) {
      if (const auto* f = std::get_if<ForClause>(&clause)) {
        out += "for $" + f->var;
        if (!f->position_var.empty()) out += " at $" + f->position_var;
        out += " in ";
        print(*f->in, out);
      } else if (const auto* l = std::get_if<LetClause>(&clause)) {
        out += "let $" + l->var + " := ";
        print(*l->value, out);
      } else if (const auto* w = std::get_if<WhereClause>(&clause)) {
        out += "where ";
        print(*w->condition, out);
      } else if (const auto* o = std::get_if<OrderByClause>(&clause)) {
        out += "order by ";
        print(*o->key, out);
        out += o->descending ? " descending" : " ascending";
      }
      out += ' ';
    }
    out += "return ";
    print(*e.result, out);
    out += ')';
  }
  void operator()(const IfExpr& e) {
    out += "(if (";
    print(*e.condition, out);
    out += ") then ";
    print(*e.then_branch, out);
    out += " else ";
    print(*e.else_branch, out);
    out += ')';
  }
  void binary(const Expr& lhs, std::string_view op, const Expr& rhs) {
    out += '(';
    print(lhs, out);
    out += ' ';
    out += op;
    out += ' ';
    print(rhs, out);
    out += ')';
  }
  void operator()(const LogicExpr& e) { binary(*e.lhs, e.is_and ? "and" : "or", *e.rhs); }
  void operator()(const NotExpr& e) {
    out += "(not ";
    print(*e.operand, out);
    out += ')';
  }
  void operator()(const ComparisonExpr& e) { binary(*e.lhs, compare_op_name(e.op), *e.rhs); }
  void operator()(const ArithmeticExpr& e) { binary(*e.lhs, arith_op_name(e.op), *e.rhs); }
  void operator()(const NegateExpr& e) {
    out += "(-";
    print(*e.operand, out);
    out += ')';
  }
  void operator()(const RangeExpr& e) { binary(*e.low, "to", *e.high); }
  void operator()(const ObjectExpr& e) {
    out += '{';
    for (std::size_t i = 0; i < e.entries.size(); ++i) {
      out += i ? ", " : " ";
      print(*e.entries[i].key, out);
      out += " : ";
      print(*e.entries[i].value, out);
    }
    out += e.entries.empty() ? "}" : " }";
  }
  void operator()(const MergedObjectExpr& e) {
    out += "{| ";
    print(*e.content, out);
    out += " |}";
  }
  void operator()(const ArrayExpr& e) {
    out += '[';
    if (e.content) print(*e.content, out);
    out += ']';
  }
  void operator()(const PredicateExpr& e) {
    print(*e.base, out);
    out += '[';
    print(*e.condition, out);
    out += ']';
  }
  void operator()(const LookupExpr& e) {
    print(*e.base, out);
    out += '.';
    if (e.key->is<LiteralExpr>() && e.key->as<LiteralExpr>().value.is_string()) {
      print(*e.key, out);
    } else if (e.key->is<VarRefExpr>()) {
      print(*e.key, out);
    } else {
      out += '(';
      print(*e.key, out);
      out += ')';
    }
  }
  void operator()(const StaticCallExpr& e) {
    out += e.name;
    print_args(e.args, out);
  }
  void operator()(const DynamicCallExpr& e) {
    print(*e.target, out);
    print_args(e.args, out);
  }
  void operator()(const FunctionRefExpr& e) { out += e.name + "#" + std::to_string(e.arity); }
};

void print(const Expr& e, std::string& out) { std::visit(Printer{out}, e.node); }

}  // namespace

Module parse_module(std::string_view text) { return Parser(text).module(); }

Expr parse_expression(std::string_view text) { return Parser(text).standalone_expr(); }

std::string print_expr(const Expr& expr) {
  std::string out;
  print(expr, out);
  return out;
}

std::string print_sequence_type(const SequenceType& type) { return type.to_string(); }

std::string print_module(const Module& module) {
  std::string out;
  for (const FunctionDecl& decl : module.functions) {
    out += "declare function " + decl.name + "(";
    for (std::size_t i = 0; i < decl.params.size(); ++i) {
      if (i) out += ", ";
      out += "$" + decl.params[i].name;
      if (decl.params[i].type) out += " as " + decl.params[i].type->to_string();
    }
    out += ")";
    if (decl.result) out += " as " + decl.result->to_string();
    out += " {\n  ";
    print(decl.body, out);
    out += "\n};\n";
  }
  print(module.body, out);
  out += '\n';
  return out;
}

}  // namespace jqml
