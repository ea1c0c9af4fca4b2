#include "atmocat/cql.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "atmocat/errors.hpp"

namespace atmocat {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool iequal(const std::string& a, const char* b) { return lower(a) == lower(b); }

struct Token {
  enum Kind { Ident, String, Number, Op, LParen, RParen, Comma, End } kind;
  std::string text;
  std::size_t pos;
};

struct Lexer {
  const std::string& src;
  std::size_t i = 0;

  explicit Lexer(const std::string& s) : src(s) {}

  Token next() {
    while (i < src.size() && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    std::size_t start = i;
    if (i >= src.size()) return {Token::End, "", start};
    char c = src[i];
    if (c == '(') { ++i; return {Token::LParen, "(", start}; }
    if (c == ')') { ++i; return {Token::RParen, ")", start}; }
    if (c == ',') { ++i; return {Token::Comma, ",", start}; }
    if (c == '\'') {
      ++i;
      std::string out;
      while (i < src.size()) {
        if (src[i] == '\'') {
          if (i + 1 < src.size() && src[i + 1] == '\'') {
            out += '\'';
            i += 2;
            continue;
          }
          ++i;
          return {Token::String, out, start};
        }
        out += src[i++];
      }
      throw CqlSyntaxError("unterminated string", start);
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        ((c == '-' || c == '+') && i + 1 < src.size() &&
         std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      std::string out;
      out += src[i++];
      bool seen_dot = false;
      while (i < src.size() &&
             (std::isdigit(static_cast<unsigned char>(src[i])) ||
              (src[i] == '.' && !seen_dot))) {
        seen_dot = seen_dot || src[i] == '.';
        out += src[i++];
      }
      return {Token::Number, out, start};
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string out;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
        out += src[i++];
      return {Token::Ident, out, start};
    }
    if (c == '=' ) { ++i; return {Token::Op, "=", start}; }
    if (c == '<') {
      ++i;
      if (i < src.size() && src[i] == '>') { ++i; return {Token::Op, "<>", start}; }
      if (i < src.size() && src[i] == '=') { ++i; return {Token::Op, "<=", start}; }
      return {Token::Op, "<", start};
    }
    if (c == '>') {
      ++i;
      if (i < src.size() && src[i] == '=') { ++i; return {Token::Op, ">=", start}; }
      return {Token::Op, ">", start};
    }
    throw CqlSyntaxError(std::string("unexpected character '") + c + "'", start);
  }
};

struct Parser {
  Lexer lex;
  Token cur;

  explicit Parser(const std::string& s) : lex(s) { cur = lex.next(); }

  void advance() { cur = lex.next(); }

  [[noreturn]] void fail(const std::string& what) { throw CqlSyntaxError(what, cur.pos); }

  bool at_keyword(const char* kw) {
    return cur.kind == Token::Ident && iequal(cur.text, kw);
  }

  CqlExprPtr parse_expr() { return parse_or(); }

  CqlExprPtr parse_or() {
    CqlExprPtr left = parse_and();
    while (at_keyword("or")) {
      advance();
      CqlExprPtr right = parse_and();
      left = std::make_shared<CqlExpr>(CqlExpr{CqlOr{left, right}});
    }
    return left;
  }

  CqlExprPtr parse_and() {
    CqlExprPtr left = parse_unary();
    while (at_keyword("and")) {
      advance();
      CqlExprPtr right = parse_unary();
      left = std::make_shared<CqlExpr>(CqlExpr{CqlAnd{left, right}});
    }
    return left;
  }

  CqlExprPtr parse_unary() {
    if (at_keyword("not")) {
      advance();
      return std::make_shared<CqlExpr>(CqlExpr{CqlNot{parse_unary()}});
    }
    if (cur.kind == Token::LParen) {
      advance();
      CqlExprPtr e = parse_expr();
      if (cur.kind != Token::RParen) fail("expected ')'");
      advance();
      return e;
    }
    return parse_predicate();
  }

  double expect_number() {
    if (cur.kind != Token::Number) fail("expected number");
    double v = std::stod(cur.text);
    advance();
    return v;
  }

  CqlExprPtr parse_predicate() {
    if (at_keyword("bbox")) {
      advance();
      if (cur.kind != Token::LParen) fail("expected '(' after BBOX");
      advance();
      CqlBbox b{};
      b.min_lon = expect_number();
      if (cur.kind != Token::Comma) fail("expected ','");
      advance();
      b.min_lat = expect_number();
      if (cur.kind != Token::Comma) fail("expected ','");
      advance();
      b.max_lon = expect_number();
      if (cur.kind != Token::Comma) fail("expected ','");
      advance();
      b.max_lat = expect_number();
      if (cur.kind != Token::RParen) fail("expected ')'");
      advance();
      return std::make_shared<CqlExpr>(CqlExpr{b});
    }
    if (cur.kind != Token::Ident) fail("expected predicate");
    std::string prop = cur.text;
    advance();
    if (at_keyword("like")) {
      advance();
      if (cur.kind != Token::String) fail("expected string pattern after LIKE");
      std::string pat = cur.text;
      advance();
      if (iequal(prop, "anytext"))
        return std::make_shared<CqlExpr>(CqlExpr{CqlAnyTextLike{pat}});
      return std::make_shared<CqlExpr>(CqlExpr{CqlLike{prop, pat}});
    }
    if (cur.kind != Token::Op) fail("expected comparison operator or LIKE");
    CmpOp op;
    if (cur.text == "=") op = CmpOp::Eq;
    else if (cur.text == "<>") op = CmpOp::Ne;
    else if (cur.text == "<") op = CmpOp::Lt;
    else if (cur.text == ">") op = CmpOp::Gt;
    else if (cur.text == "<=") op = CmpOp::Le;
    else if (cur.text == ">=") op = CmpOp::Ge;
    else fail("unknown operator " + cur.text);
    advance();
    if (cur.kind == Token::String) {
      CqlComparison c{prop, op, cur.text, false};
      advance();
      return std::make_shared<CqlExpr>(CqlExpr{c});
    }
    if (cur.kind == Token::Number) {
      CqlComparison c{prop, op, cur.text, true};
      advance();
      return std::make_shared<CqlExpr>(CqlExpr{c});
    }
    fail("expected literal");
  }
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  out += '\'';
  return out;
}

std::string fmt_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::optional<double> as_number(const std::string& s) {
  std::string t = s;
  if (t.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

bool compare(CmpOp op, int tri) {
  switch (op) {
    case CmpOp::Eq: return tri == 0;
    case CmpOp::Ne: return tri != 0;
    case CmpOp::Lt: return tri < 0;
    case CmpOp::Gt: return tri > 0;
    case CmpOp::Le: return tri <= 0;
    case CmpOp::Ge: return tri >= 0;
  }
  return false;
}

}  // namespace

const char* to_string(CmpOp op) {
  switch (op) {
    case CmpOp::Eq: return "=";
    case CmpOp::Ne: return "<>";
    case CmpOp::Lt: return "<";
    case CmpOp::Gt: return ">";
    case CmpOp::Le: return "<=";
    case CmpOp::Ge: return ">=";
  }
  return "=";
}

CqlExprPtr parse_cql(const std::string& text) {
  Parser p(text);
  CqlExprPtr e = p.parse_expr();
  if (p.cur.kind != Token::End) p.fail("trailing input");
  return e;
}

std::string pretty_cql(const CqlExpr& e) {
  return std::visit(
      [](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CqlComparison>) {
          return n.property + " " + to_string(n.op) + " " +
                 (n.is_number ? n.literal : quote(n.literal));
        } else if constexpr (std::is_same_v<T, CqlLike>) {
          return n.property + " LIKE " + quote(n.pattern);
        } else if constexpr (std::is_same_v<T, CqlAnyTextLike>) {
          return "AnyText LIKE " + quote(n.pattern);
        } else if constexpr (std::is_same_v<T, CqlAnd>) {
          return "(" + pretty_cql(*n.left) + " AND " + pretty_cql(*n.right) + ")";
        } else if constexpr (std::is_same_v<T, CqlOr>) {
          return "(" + pretty_cql(*n.left) + " OR " + pretty_cql(*n.right) + ")";
        } else if constexpr (std::is_same_v<T, CqlNot>) {
          return "NOT (" + pretty_cql(*n.inner) + ")";
        } else {
          return "BBOX(" + fmt_num(n.min_lon) + ", " + fmt_num(n.min_lat) + ", " +
                 fmt_num(n.max_lon) + ", " + fmt_num(n.max_lat) + ")";
        }
      },
      e.node);
}

bool cql_equal(const CqlExpr& a, const CqlExpr& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, CqlComparison>) {
          return x.property == y.property && x.op == y.op && x.literal == y.literal &&
                 x.is_number == y.is_number;
        } else if constexpr (std::is_same_v<T, CqlLike>) {
          return x.property == y.property && x.pattern == y.pattern;
        } else if constexpr (std::is_same_v<T, CqlAnyTextLike>) {
          return x.pattern == y.pattern;
        } else if constexpr (std::is_same_v<T, CqlAnd>) {
          return cql_equal(*x.left, *y.left) && cql_equal(*x.right, *y.right);
        } else if constexpr (std::is_same_v<T, CqlOr>) {
          return cql_equal(*x.left, *y.left) && cql_equal(*x.right, *y.right);
        } else if constexpr (std::is_same_v<T, CqlNot>) {
          return cql_equal(*x.inner, *y.inner);
        } else {
          return x.min_lon == y.min_lon && x.min_lat == y.min_lat &&
                 x.max_lon == y.max_lon && x.max_lat == y.max_lat;
        }
      },
      a.node);
}

bool like_match(const std::string& pattern, const std::string& text) {
  std::string p = lower(pattern), t = lower(text);
  // iterative wildcard match with % backtracking
  std::size_t pi = 0, ti = 0, star = std::string::npos, mark = 0;
  while (ti < t.size()) {
    if (pi < p.size() && (p[pi] == '_' || p[pi] == t[ti])) {
      ++pi;
      ++ti;
    } else if (pi < p.size() && p[pi] == '%') {
      star = pi++;
      mark = ti;
    } else if (star != std::string::npos) {
      pi = star + 1;
      ti = ++mark;
    } else {
      return false;
    }
  }
  while (pi < p.size() && p[pi] == '%') ++pi;
  return pi == p.size();
}

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (const auto& s : v) {
    if (!out.empty()) out += ' ';
    out += s;
  }
  return out;
}

}  // namespace

EvalRecord to_eval_record(const CatalogueRecord& r) {
  EvalRecord e;
  e.props["name"] = r.layer.name;
  e.props["title"] = r.meta.title;
  e.props["abstract"] = r.meta.abstract_;
  e.props["keywords"] = join(r.meta.keywords);
  e.props["format"] = join(r.meta.formats);
  e.props["srs"] = join(r.layer.supported_srs);
  e.props["service_title"] = r.service.title;
  e.props["service_abstract"] = r.service.abstract_;
  e.props["provider"] = r.service.provider_name;
  e.props["country"] = r.service.country;
  e.props["service_type"] = to_string(r.service.service_type);
  e.props["version"] = r.service.version;
  e.props["url"] = r.service.url;
  e.props["quality_score"] = std::to_string(r.layer.quality_score);
  e.props["score"] = std::to_string(r.service.score);
  e.any_text = r.meta.title + " " + r.meta.abstract_ + " " + join(r.meta.keywords);
  e.bbox = r.layer.bbox;
  return e;
}

bool evaluate(const CqlExpr& e, const EvalRecord& r) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CqlComparison>) {
          auto it = r.props.find(lower(n.property));
          if (it == r.props.end()) return false;
          const std::string& val = it->second;
          auto lv = as_number(val);
          auto rv = as_number(n.literal);
          if (lv && rv) {
            int tri = (*lv < *rv) ? -1 : (*lv > *rv) ? 1 : 0;
            return compare(n.op, tri);
          }
          std::string a = lower(val), b = lower(n.literal);
          return compare(n.op, a.compare(b) < 0 ? -1 : (a == b ? 0 : 1));
        } else if constexpr (std::is_same_v<T, CqlLike>) {
          auto it = r.props.find(lower(n.property));
          if (it == r.props.end()) return false;
          return like_match(n.pattern, it->second);
        } else if constexpr (std::is_same_v<T, CqlAnyTextLike>) {
          return like_match(n.pattern, r.any_text);
        } else if constexpr (std::is_same_v<T, CqlAnd>) {
          return evaluate(*n.left, r) && evaluate(*n.right, r);
        } else if constexpr (std::is_same_v<T, CqlOr>) {
          return evaluate(*n.left, r) || evaluate(*n.right, r);
        } else if constexpr (std::is_same_v<T, CqlNot>) {
          return !evaluate(*n.inner, r);
        } else {
          if (!r.bbox) return false;
          return r.bbox->intersects(
              BoundingBox{n.min_lon, n.min_lat, n.max_lon, n.max_lat});
        }
      },
      e.node);
}

}  // namespace atmocat
