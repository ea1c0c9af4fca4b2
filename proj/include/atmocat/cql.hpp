#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "atmocat/caps.hpp"
#include "atmocat/store.hpp"

namespace atmocat {

struct CqlExpr;
using CqlExprPtr = std::shared_ptr<const CqlExpr>;

enum class CmpOp { Eq, Ne, Lt, Gt, Le, Ge };
const char* to_string(CmpOp op);

struct CqlComparison {
  std::string property;
  CmpOp op;
  std::string literal;  // lexeme as written (unquoted for strings)
  bool is_number = false;
};

struct CqlLike {
  std::string property;
  std::string pattern;  // with % and _ wildcards
};

struct CqlAnyTextLike {
  std::string pattern;
};

struct CqlAnd {
  CqlExprPtr left, right;
};

struct CqlOr {
  CqlExprPtr left, right;
};

struct CqlNot {
  CqlExprPtr inner;
};

struct CqlBbox {
  double min_lon, min_lat, max_lon, max_lat;
};

struct CqlExpr {
  std::variant<CqlComparison, CqlLike, CqlAnyTextLike, CqlAnd, CqlOr, CqlNot, CqlBbox>
      node;
};

// Grammar: expr := or; or := and (OR and)*; and := unary (AND unary)*;
// unary := NOT unary | '(' expr ')' | predicate;
// predicate := ident cmpop literal | ident LIKE string
//            | AnyText LIKE string | BBOX '(' num ',' num ',' num ',' num ')'.
// Keywords case-insensitive, strings single-quoted with '' escaping,
// AND binds tighter than OR. Throws CqlSyntaxError with a position.
CqlExprPtr parse_cql(const std::string& text);

// Canonical fully-parenthesized text; reparses to an identical AST.
std::string pretty_cql(const CqlExpr& e);

bool cql_equal(const CqlExpr& a, const CqlExpr& b);

// Flattened view of one catalogue row for constraint evaluation.
struct EvalRecord {
  std::map<std::string, std::string> props;
  std::string any_text;  // title + abstract + keywords
  std::optional<BoundingBox> bbox;
};

EvalRecord to_eval_record(const CatalogueRecord& r);

// Missing properties make their predicate false, never an error. String
// comparison is case-insensitive; numeric comparison applies when both
// sides parse as numbers. LIKE is anchored, with % and _ wildcards.
bool evaluate(const CqlExpr& e, const EvalRecord& r);

// SQL-LIKE matching, exposed for reuse and tests.
bool like_match(const std::string& pattern, const std::string& text);

}  // namespace atmocat
