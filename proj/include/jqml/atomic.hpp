#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace jqml {

using BigInt = boost::multiprecision::cpp_int;

/// Decimal digit string to BigInt. The string constructor of cpp_int reads a
/// leading zero as an octal prefix, so never construct from raw digits.
BigInt bigint_from_digits(std::string_view digits);

/// Exact decimal: unscaled * 10^-scale, kept normalized (no trailing
/// fractional zeros, scale >= 0).
class Decimal {
 public:
  Decimal() = default;
  Decimal(BigInt unscaled, int scale);
  static Decimal from_integer(const BigInt& value) { return Decimal(value, 0); }

  /// Accepts `[+-]digits[.digits]` and, when `allow_exponent`, a trailing
  /// `[eE][+-]digits`.
  static std::optional<Decimal> parse(std::string_view text, bool allow_exponent = false);
  static std::optional<Decimal> from_double(double value);

  const BigInt& unscaled() const { return unscaled_; }
  int scale() const { return scale_; }
  bool is_integral() const { return scale_ == 0; }
  int sign() const { return unscaled_.sign(); }

  /// Truncates toward zero.
  BigInt to_integer() const;
  double to_double() const;
  std::string to_string() const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  Decimal operator-() const { return Decimal(-unscaled_, scale_); }
  /// Quotient rounded toward zero to `kDivisionDigits` fractional digits.
  static Decimal divide(const Decimal& a, const Decimal& b);
  static constexpr int kDivisionDigits = 18;

  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b) {
    return a.scale_ == b.scale_ && a.unscaled_ == b.unscaled_;
  }

 private:
  void normalize();

  BigInt unscaled_ = 0;
  int scale_ = 0;
};

struct Date {
  std::int32_t year = 1970;
  std::uint8_t month = 1;
  std::uint8_t day = 1;

  auto operator<=>(const Date&) const = default;
};

struct DateTime {
  Date date;
  std::uint8_t hour = 0;
  std::uint8_t minute = 0;
  std::uint8_t second = 0;
  std::uint32_t nanos = 0;

  auto operator<=>(const DateTime&) const = default;
};

using Bytes = std::vector<std::uint8_t>;

enum class AtomicKind : std::uint8_t {
  String,
  Boolean,
  Null,
  Byte,
  Short,
  Int,
  Integer,
  Long,
  Decimal,
  Double,
  Float,
  Date,
  DateTime,
  HexBinary,
};

inline constexpr AtomicKind kAllAtomicKinds[] = {
    AtomicKind::String, AtomicKind::Boolean, AtomicKind::Null,    AtomicKind::Byte,
    AtomicKind::Short,  AtomicKind::Int,     AtomicKind::Integer, AtomicKind::Long,
    AtomicKind::Decimal, AtomicKind::Double, AtomicKind::Float,   AtomicKind::Date,
    AtomicKind::DateTime, AtomicKind::HexBinary,
};

std::string_view kind_name(AtomicKind kind);
std::optional<AtomicKind> kind_from_name(std::string_view name);

bool is_integer_kind(AtomicKind kind);
bool is_numeric_kind(AtomicKind kind);

class AtomicValue {
 public:
  using Storage =
      std::variant<std::monostate, bool, BigInt, Decimal, double, std::string, Date, DateTime, Bytes>;

  AtomicValue() : kind_(AtomicKind::Null) {}

  static AtomicValue null() { return AtomicValue(); }
  static AtomicValue string(std::string value);
  static AtomicValue boolean(bool value);
  /// Throws RANGE_ERROR when `value` does not fit `kind`.
  static AtomicValue integer(BigInt value, AtomicKind kind = AtomicKind::Integer);
  static AtomicValue integer(std::int64_t value, AtomicKind kind = AtomicKind::Integer) {
    return integer(BigInt(value), kind);
  }
  static AtomicValue decimal(Decimal value);
  static AtomicValue double_value(double value);
  static AtomicValue float_value(double value);
  static AtomicValue date(Date value);
  static AtomicValue date_time(DateTime value);
  static AtomicValue hex_binary(Bytes value);

  AtomicKind kind() const { return kind_; }
  bool is_null() const { return kind_ == AtomicKind::Null; }
  bool is_numeric() const { return is_numeric_kind(kind_); }
  bool is_string() const { return kind_ == AtomicKind::String; }
  bool is_boolean() const { return kind_ == AtomicKind::Boolean; }

  bool as_bool() const { return std::get<bool>(value_); }
  const BigInt& as_integer() const { return std::get<BigInt>(value_); }
  const Decimal& as_decimal() const { return std::get<Decimal>(value_); }
  /// Raw double payload (double and float kinds).
  double as_double() const { return std::get<double>(value_); }
  const std::string& as_string() const { return std::get<std::string>(value_); }
  const Date& as_date() const { return std::get<Date>(value_); }
  const DateTime& as_date_time() const { return std::get<DateTime>(value_); }
  const Bytes& as_bytes() const { return std::get<Bytes>(value_); }

  /// Any numeric kind widened to double.
  double to_double() const;
  /// Any numeric kind as an exact decimal; fails for double/float.
  Decimal to_decimal() const;

  /// Canonical lexical form (what `string()` returns).
  std::string lexical() const;

  /// Identity of kind and payload. Not the query-level `eq`.
  bool operator==(const AtomicValue& other) const;

 private:
  AtomicValue(AtomicKind kind, Storage value) : kind_(kind), value_(std::move(value)) {}

  AtomicKind kind_;
  Storage value_;
};

/// Casts between atomic kinds. Throws NO_CAST_RULE, RANGE_ERROR or LEXICAL_ERROR.
AtomicValue atomic_cast(const AtomicValue& value, AtomicKind target);

/// Shortest round-trip rendering of a double ("NaN", "INF", "-INF" for
/// non-finite values).
std::string format_double(double value);

enum class CompareOp { Eq, Ne, Lt, Le, Gt, Ge };
enum class ArithOp { Add, Sub, Mul, Div, IDiv, Mod };

std::string_view compare_op_name(CompareOp op);
std::string_view arith_op_name(ArithOp op);

/// Ordering for value comparisons. Numerics compare by value across kinds;
/// null is equal to null and less than everything else. When
/// `promote_strings` is set, a string compared with a number is cast to
/// double first. Incomparable kinds throw TYPE_ERROR.
std::partial_ordering compare_atomic(const AtomicValue& a, const AtomicValue& b,
                                     bool promote_strings);

bool compare_atomic(CompareOp op, const AtomicValue& a, const AtomicValue& b);

/// Numeric arithmetic with the usual promotion ladder
/// integer -> decimal -> float -> double. Throws TYPE_ERROR for non-numeric
/// operands and DIVISION_BY_ZERO for exact division by zero.
AtomicValue arithmetic(ArithOp op, const AtomicValue& a, const AtomicValue& b);

AtomicValue negate(const AtomicValue& value);

/// Equality used by deep-equal: numerics by value (NaN equals NaN), no
/// cross-category promotion.
bool atomic_deep_equal(const AtomicValue& a, const AtomicValue& b);

}  // namespace jqml
