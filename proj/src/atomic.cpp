#include "jqml/atomic.hpp"

#include "jqml/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace jqml {

namespace {

BigInt pow10(int n) {
  BigInt result = 1;
  for (int i = 0; i < n; ++i) result *= 10;
  return result;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

// Matches [+-]?digits, returns the parsed value.
std::optional<BigInt> parse_integer_lexical(std::string_view text) {
  bool negative = false;
  if (!text.empty() && (text[0] == '+' || text[0] == '-')) {
    negative = text[0] == '-';
    text.remove_prefix(1);
  }
  if (text.empty() || !std::all_of(text.begin(), text.end(), is_digit)) return std::nullopt;
  BigInt value = bigint_from_digits(text);
  return negative ? BigInt(-value) : value;
}

// Matches the double lexical space, excluding non-finite spellings.
std::optional<double> parse_double_lexical(std::string_view text) {
  std::string_view body = text;
  if (!body.empty() && (body[0] == '+' || body[0] == '-')) body.remove_prefix(1);
  std::size_t i = 0;
  std::size_t int_digits = 0;
  std::size_t frac_digits = 0;
  while (i < body.size() && is_digit(body[i])) ++i, ++int_digits;
  if (i < body.size() && body[i] == '.') {
    ++i;
    while (i < body.size() && is_digit(body[i])) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return std::nullopt;
  if (i < body.size() && (body[i] == 'e' || body[i] == 'E')) {
    ++i;
    if (i < body.size() && (body[i] == '+' || body[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < body.size() && is_digit(body[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return std::nullopt;
  }
  if (i != body.size()) return std::nullopt;
  std::string_view parsable = text;
  if (parsable[0] == '+') parsable.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(parsable.data(), parsable.data() + parsable.size(), value);
  if (ec == std::errc::result_out_of_range) {
    // Underflow rounds to zero; overflow is a range error.
    if (std::abs(value) < 1.0) return 0.0;
    fail(ErrorCode::RangeError, "double literal out of range: " + std::string(text));
  }
  if (ec != std::errc() || ptr != parsable.data() + parsable.size()) return std::nullopt;
  return value;
}

int days_in_month(int year, int month) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
  return month == 2 && leap ? 29 : kDays[month - 1];
}

bool read_fixed(std::string_view text, std::size_t& i, std::size_t width, int& out) {
  if (i + width > text.size()) return false;
  int value = 0;
  for (std::size_t k = 0; k < width; ++k) {
    char c = text[i + k];
    if (!is_digit(c)) return false;
    value = value * 10 + (c - '0');
  }
  i += width;
  out = value;
  return true;
}

std::optional<Date> parse_date_prefix(std::string_view text, std::size_t& i) {
  bool negative = false;
  if (i < text.size() && text[i] == '-') {
    negative = true;
    ++i;
  }
  std::size_t start = i;
  while (i < text.size() && is_digit(text[i])) ++i;
  std::size_t year_digits = i - start;
  if (year_digits < 4 || year_digits > 9) return std::nullopt;
  int year = 0;
  for (std::size_t k = start; k < i; ++k) year = year * 10 + (text[k] - '0');
  if (negative) year = -year;
  int month = 0;
  int day = 0;
  if (i >= text.size() || text[i] != '-') return std::nullopt;
  ++i;
  if (!read_fixed(text, i, 2, month)) return std::nullopt;
  if (i >= text.size() || text[i] != '-') return std::nullopt;
  ++i;
  if (!read_fixed(text, i, 2, day)) return std::nullopt;
  if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month)) return std::nullopt;
  return Date{year, static_cast<std::uint8_t>(month), static_cast<std::uint8_t>(day)};
}

std::optional<Date> parse_date(std::string_view text) {
  std::size_t i = 0;
  auto date = parse_date_prefix(text, i);
  if (!date || i != text.size()) return std::nullopt;
  return date;
}

std::optional<DateTime> parse_date_time(std::string_view text) {
  std::size_t i = 0;
  auto date = parse_date_prefix(text, i);
  if (!date || i >= text.size() || text[i] != 'T') return std::nullopt;
  ++i;
  int hour = 0, minute = 0, second = 0;
  if (!read_fixed(text, i, 2, hour) || i >= text.size() || text[i++] != ':') return std::nullopt;
  if (!read_fixed(text, i, 2, minute) || i >= text.size() || text[i++] != ':') return std::nullopt;
  if (!read_fixed(text, i, 2, second)) return std::nullopt;
  std::uint32_t nanos = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t digits = 0;
    while (i < text.size() && is_digit(text[i])) {
      if (digits < 9) nanos = nanos * 10 + static_cast<std::uint32_t>(text[i] - '0');
      ++digits;
      ++i;
    }
    if (digits == 0) return std::nullopt;
    for (std::size_t k = digits; k < 9; ++k) nanos *= 10;
  }
  if (i != text.size()) return std::nullopt;
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;
  return DateTime{*date, static_cast<std::uint8_t>(hour), static_cast<std::uint8_t>(minute),
                  static_cast<std::uint8_t>(second), nanos};
}

std::optional<Bytes> parse_hex(std::string_view text) {
  if (text.size() % 2 != 0) return std::nullopt;
  Bytes bytes;
  bytes.reserve(text.size() / 2);
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (std::size_t i = 0; i < text.size(); i += 2) {
    int hi = nibble(text[i]);
    int lo = nibble(text[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    bytes.push_back(static_cast<std::uint8_t>(hi * 16 + lo));
  }
  return bytes;
}

std::string format_date(const Date& d) {
  char buf[32];
  if (d.year < 0) {
    std::snprintf(buf, sizeof buf, "-%04d-%02d-%02d", -d.year, d.month, d.day);
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
  }
  return buf;
}

std::string format_date_time(const DateTime& dt) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "T%02d:%02d:%02d", dt.hour, dt.minute, dt.second);
  std::string out = format_date(dt.date) + buf;
  if (dt.nanos != 0) {
    std::snprintf(buf, sizeof buf, ".%09u", dt.nanos);
    std::string frac = buf;
    while (frac.back() == '0') frac.pop_back();
    out += frac;
  }
  return out;
}

std::string format_float(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "INF" : "-INF";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<float>(value));
  return std::string(buf, ptr);
}

bool fits(const BigInt& value, AtomicKind kind) {
  switch (kind) {
    case AtomicKind::Byte: return value >= -128 && value <= 127;
    case AtomicKind::Short: return value >= -32768 && value <= 32767;
    case AtomicKind::Int:
      return value >= std::numeric_limits<std::int32_t>::min() &&
             value <= std::numeric_limits<std::int32_t>::max();
    case AtomicKind::Long:
      return value >= std::numeric_limits<std::int64_t>::min() &&
             value <= std::numeric_limits<std::int64_t>::max();
    default: return true;
  }
}

BigInt truncate_double(double value) {
  if (!std::isfinite(value)) {
    fail(ErrorCode::RangeError, "cannot convert " + format_double(value) + " to an integer");
  }
  return BigInt(std::trunc(value));
}

[[noreturn]] void lexical_error(std::string_view text, AtomicKind target) {
  fail(ErrorCode::LexicalError,
       "\"" + std::string(text) + "\" is not a valid " + std::string(kind_name(target)));
}

}  // namespace

// ---------------------------------------------------------------------------
// Decimal

Decimal::Decimal(BigInt unscaled, int scale) : unscaled_(std::move(unscaled)), scale_(scale) {
  if (scale_ < 0) {
    unscaled_ *= pow10(-scale_);
    scale_ = 0;
  }
  normalize();
}

void Decimal::normalize() {
  if (unscaled_ == 0) {
    scale_ = 0;
    return;
  }
  while (scale_ > 0 && unscaled_ % 10 == 0) {
    unscaled_ /= 10;
    --scale_;
  }
}

BigInt bigint_from_digits(std::string_view digits) {
  std::size_t first = digits.find_first_not_of('0');
  if (first == std::string_view::npos) return BigInt(0);
  return BigInt(std::string(digits.substr(first)));
}

std::optional<Decimal> Decimal::parse(std::string_view text, bool allow_exponent) {
  bool negative = false;
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  int scale = 0;
  std::size_t int_digits = 0;
  while (i < text.size() && is_digit(text[i])) digits += text[i++], ++int_digits;
  std::size_t frac_digits = 0;
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && is_digit(text[i])) digits += text[i++], ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return std::nullopt;
  scale = static_cast<int>(frac_digits);
  if (allow_exponent && i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    bool exp_negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      exp_negative = text[i] == '-';
      ++i;
    }
    std::size_t start = i;
    int exponent = 0;
    while (i < text.size() && is_digit(text[i])) {
      if (exponent > 100000) return std::nullopt;
      exponent = exponent * 10 + (text[i++] - '0');
    }
    if (i == start) return std::nullopt;
    scale += exp_negative ? exponent : -exponent;
  }
  if (i != text.size()) return std::nullopt;
  BigInt unscaled = bigint_from_digits(digits);
  if (negative) unscaled = -unscaled;
  return Decimal(std::move(unscaled), scale);
}

std::optional<Decimal> Decimal::from_double(double value) {
  if (!std::isfinite(value)) return std::nullopt;
  return parse(format_double(value), true);
}

BigInt Decimal::to_integer() const { return unscaled_ / pow10(scale_); }

double Decimal::to_double() const {
  std::string text = to_string();
  double value = 0;
  std::from_chars(text.data(), text.data() + text.size(), value);
  return value;
}

std::string Decimal::to_string() const {
  std::string digits = (unscaled_ < 0 ? BigInt(-unscaled_) : unscaled_).str();
  std::string out = unscaled_ < 0 ? "-" : "";
  if (scale_ == 0) return out + digits;
  if (static_cast<int>(digits.size()) <= scale_) {
    digits.insert(0, static_cast<std::size_t>(scale_) - digits.size() + 1, '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(scale_), ".");
  return out + digits;
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  int scale = std::max(a.scale_, b.scale_);
  return Decimal(a.unscaled_ * pow10(scale - a.scale_) + b.unscaled_ * pow10(scale - b.scale_),
                 scale);
}

Decimal operator-(const Decimal& a, const Decimal& b) { return a + (-b); }

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal(a.unscaled_ * b.unscaled_, a.scale_ + b.scale_);
}

Decimal Decimal::divide(const Decimal& a, const Decimal& b) {
  if (b.unscaled_ == 0) fail(ErrorCode::DivisionByZero, "decimal division by zero");
  int result_scale = std::max(kDivisionDigits, a.scale_);
  BigInt numerator = a.unscaled_ * pow10(b.scale_ + result_scale);
  BigInt denominator = b.unscaled_ * pow10(a.scale_);
  return Decimal(numerator / denominator, result_scale);
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  int scale = std::max(a.scale_, b.scale_);
  BigInt lhs = a.unscaled_ * pow10(scale - a.scale_);
  BigInt rhs = b.unscaled_ * pow10(scale - b.scale_);
  if (lhs < rhs) return std::strong_ordering::less;
  if (lhs > rhs) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

// ---------------------------------------------------------------------------
// Kinds

std::string_view kind_name(AtomicKind kind) {
  switch (kind) {
    case AtomicKind::String: return "string";
    case AtomicKind::Boolean: return "boolean";
    case AtomicKind::Null: return "null";
    case AtomicKind::Byte: return "byte";
    case AtomicKind::Short: return "short";
    case AtomicKind::Int: return "int";
    case AtomicKind::Integer: return "integer";
    case AtomicKind::Long: return "long";
    case AtomicKind::Decimal: return "decimal";
    case AtomicKind::Double: return "double";
    case AtomicKind::Float: return "float";
    case AtomicKind::Date: return "date";
    case AtomicKind::DateTime: return "dateTime";
    case AtomicKind::HexBinary: return "hexBinary";
  }
  return "?";
}

std::optional<AtomicKind> kind_from_name(std::string_view name) {
  for (AtomicKind kind : kAllAtomicKinds) {
    if (kind_name(kind) == name) return kind;
  }
  return std::nullopt;
}

bool is_integer_kind(AtomicKind kind) {
  switch (kind) {
    case AtomicKind::Byte:
    case AtomicKind::Short:
    case AtomicKind::Int:
    case AtomicKind::Integer:
    case AtomicKind::Long:
      return true;
    default:
      return false;
  }
}

bool is_numeric_kind(AtomicKind kind) {
  return is_integer_kind(kind) || kind == AtomicKind::Decimal || kind == AtomicKind::Double ||
         kind == AtomicKind::Float;
}

// ---------------------------------------------------------------------------
// AtomicValue

AtomicValue AtomicValue::string(std::string value) {
  return AtomicValue(AtomicKind::String, std::move(value));
}

AtomicValue AtomicValue::boolean(bool value) { return AtomicValue(AtomicKind::Boolean, value); }

AtomicValue AtomicValue::integer(BigInt value, AtomicKind kind) {
  if (!is_integer_kind(kind)) throw std::logic_error("AtomicValue::integer with non-integer kind");
  if (!fits(value, kind)) {
    fail(ErrorCode::RangeError, value.str() + " is out of range for " + std::string(kind_name(kind)));
  }
  return AtomicValue(kind, std::move(value));
}

AtomicValue AtomicValue::decimal(Decimal value) {
  return AtomicValue(AtomicKind::Decimal, std::move(value));
}

AtomicValue AtomicValue::double_value(double value) { return AtomicValue(AtomicKind::Double, value); }

AtomicValue AtomicValue::float_value(double value) {
  return AtomicValue(AtomicKind::Float, static_cast<double>(static_cast<float>(value)));
}

AtomicValue AtomicValue::date(Date value) { return AtomicValue(AtomicKind::Date, value); }

AtomicValue AtomicValue::date_time(DateTime value) {
  return AtomicValue(AtomicKind::DateTime, value);
}

AtomicValue AtomicValue::hex_binary(Bytes value) {
  return AtomicValue(AtomicKind::HexBinary, std::move(value));
}

double AtomicValue::to_double() const {
  if (is_integer_kind(kind_)) return as_integer().convert_to<double>();
  switch (kind_) {
    case AtomicKind::Decimal: return as_decimal().to_double();
    case AtomicKind::Double:
    case AtomicKind::Float: return as_double();
    default:
      fail(ErrorCode::TypeError, std::string(kind_name(kind_)) + " is not numeric");
  }
}

Decimal AtomicValue::to_decimal() const {
  if (is_integer_kind(kind_)) return Decimal::from_integer(as_integer());
  if (kind_ == AtomicKind::Decimal) return as_decimal();
  if (kind_ == AtomicKind::Double || kind_ == AtomicKind::Float) {
    auto d = Decimal::from_double(as_double());
    if (!d) fail(ErrorCode::RangeError, "cannot convert " + format_double(as_double()) + " to decimal");
    return *d;
  }
  fail(ErrorCode::TypeError, std::string(kind_name(kind_)) + " is not numeric");
}

std::string AtomicValue::lexical() const {
  if (is_integer_kind(kind_)) return as_integer().str();
  switch (kind_) {
    case AtomicKind::String: return as_string();
    case AtomicKind::Boolean: return as_bool() ? "true" : "false";
    case AtomicKind::Null: return "null";
    case AtomicKind::Decimal: return as_decimal().to_string();
    case AtomicKind::Double: return format_double(as_double());
    case AtomicKind::Float: return format_float(as_double());
    case AtomicKind::Date: return format_date(as_date());
    case AtomicKind::DateTime: return format_date_time(as_date_time());
    case AtomicKind::HexBinary: {
      static constexpr char kHex[] = "0123456789ABCDEF";
      std::string out;
      for (std::uint8_t b : as_bytes()) {
        out += kHex[b >> 4];
        out += kHex[b & 15];
      }
      return out;
    }
    default: return {};
  }
}

bool AtomicValue::operator==(const AtomicValue& other) const {
  if (kind_ != other.kind_) return false;
  if (kind_ == AtomicKind::Double || kind_ == AtomicKind::Float) {
    double a = as_double();
    double b = other.as_double();
    return a == b || (std::isnan(a) && std::isnan(b));
  }
  return value_ == other.value_;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "NaN";
  if (std::isinf(value)) return value > 0 ? "INF" : "-INF";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Casting

AtomicValue atomic_cast(const AtomicValue& value, AtomicKind target) {
  AtomicKind source = value.kind();
  if (source == target) return value;
  if (target == AtomicKind::String) return AtomicValue::string(value.lexical());

  auto no_rule = [&]() -> AtomicValue {
    fail(ErrorCode::NoCastRule, "cannot cast " + std::string(kind_name(source)) + " to " +
                                    std::string(kind_name(target)));
  };

  if (source == AtomicKind::String) {
    std::string_view text = trim(value.as_string());
    if (is_integer_kind(target)) {
      auto parsed = parse_integer_lexical(text);
      if (!parsed) lexical_error(text, target);
      return AtomicValue::integer(std::move(*parsed), target);
    }
    switch (target) {
      case AtomicKind::Decimal: {
        auto parsed = Decimal::parse(text);
        if (!parsed) lexical_error(text, target);
        return AtomicValue::decimal(std::move(*parsed));
      }
      case AtomicKind::Double:
      case AtomicKind::Float: {
        double parsed = 0;
        if (text == "NaN") {
          parsed = std::numeric_limits<double>::quiet_NaN();
        } else if (text == "INF") {
          parsed = std::numeric_limits<double>::infinity();
        } else if (text == "-INF") {
          parsed = -std::numeric_limits<double>::infinity();
        } else {
          auto d = parse_double_lexical(text);
          if (!d) lexical_error(text, target);
          parsed = *d;
          if (target == AtomicKind::Float && std::isfinite(parsed) &&
              std::isinf(static_cast<float>(parsed))) {
            fail(ErrorCode::RangeError, std::string(text) + " is out of range for float");
          }
        }
        return target == AtomicKind::Double ? AtomicValue::double_value(parsed)
                                            : AtomicValue::float_value(parsed);
      }
      case AtomicKind::Boolean:
        if (text == "true" || text == "1") return AtomicValue::boolean(true);
        if (text == "false" || text == "0") return AtomicValue::boolean(false);
        lexical_error(text, target);
      case AtomicKind::Date: {
        auto d = parse_date(text);
        if (!d) lexical_error(text, target);
        return AtomicValue::date(*d);
      }
      case AtomicKind::DateTime: {
        auto dt = parse_date_time(text);
        if (!dt) lexical_error(text, target);
        return AtomicValue::date_time(*dt);
      }
      case AtomicKind::HexBinary: {
        auto bytes = parse_hex(text);
        if (!bytes) lexical_error(text, target);
        return AtomicValue::hex_binary(std::move(*bytes));
      }
      default:
        return no_rule();
    }
  }

  if (value.is_numeric()) {
    if (is_integer_kind(target)) {
      if (is_integer_kind(source)) return AtomicValue::integer(value.as_integer(), target);
      if (source == AtomicKind::Decimal) {
        return AtomicValue::integer(value.as_decimal().to_integer(), target);
      }
      return AtomicValue::integer(truncate_double(value.as_double()), target);
    }
    switch (target) {
      case AtomicKind::Decimal: return AtomicValue::decimal(value.to_decimal());
      case AtomicKind::Double: return AtomicValue::double_value(value.to_double());
      case AtomicKind::Float: return AtomicValue::float_value(value.to_double());
      case AtomicKind::Boolean: {
        double d = value.to_double();
        return AtomicValue::boolean(d != 0 && !std::isnan(d));
      }
      default: return no_rule();
    }
  }

  if (source == AtomicKind::Boolean && is_numeric_kind(target)) {
    int bit = value.as_bool() ? 1 : 0;
    if (is_integer_kind(target)) return AtomicValue::integer(BigInt(bit), target);
    if (target == AtomicKind::Decimal) return AtomicValue::decimal(Decimal::from_integer(bit));
    return target == AtomicKind::Double ? AtomicValue::double_value(bit)
                                        : AtomicValue::float_value(bit);
  }
  if (source == AtomicKind::DateTime && target == AtomicKind::Date) {
    return AtomicValue::date(value.as_date_time().date);
  }
  if (source == AtomicKind::Date && target == AtomicKind::DateTime) {
    return AtomicValue::date_time(DateTime{value.as_date(), 0, 0, 0, 0});
  }
  return no_rule();
}

// ---------------------------------------------------------------------------
// Comparison and arithmetic

std::string_view compare_op_name(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "eq";
    case CompareOp::Ne: return "ne";
    case CompareOp::Lt: return "lt";
    case CompareOp::Le: return "le";
    case CompareOp::Gt: return "gt";
    case CompareOp::Ge: return "ge";
  }
  return "?";
}

std::string_view arith_op_name(ArithOp op) {
  switch (op) {
    case ArithOp::Add: return "+";
    case ArithOp::Sub: return "-";
    case ArithOp::Mul: return "*";
    case ArithOp::Div: return "div";
    case ArithOp::IDiv: return "idiv";
    case ArithOp::Mod: return "mod";
  }
  return "?";
}

namespace {

bool is_approximate(AtomicKind kind) {
  return kind == AtomicKind::Double || kind == AtomicKind::Float;
}

std::partial_ordering compare_numbers(const AtomicValue& a, const AtomicValue& b) {
  if (is_approximate(a.kind()) || is_approximate(b.kind())) {
    return a.to_double() <=> b.to_double();
  }
  if (is_integer_kind(a.kind()) && is_integer_kind(b.kind())) {
    const BigInt& x = a.as_integer();
    const BigInt& y = b.as_integer();
    if (x < y) return std::partial_ordering::less;
    if (x > y) return std::partial_ordering::greater;
    return std::partial_ordering::equivalent;
  }
  return a.to_decimal() <=> b.to_decimal();
}

[[noreturn]] void incomparable(const AtomicValue& a, const AtomicValue& b) {
  fail(ErrorCode::TypeError, "cannot compare " + std::string(kind_name(a.kind())) + " with " +
                                 std::string(kind_name(b.kind())));
}

}  // namespace

std::partial_ordering compare_atomic(const AtomicValue& a, const AtomicValue& b,
                                     bool promote_strings) {
  if (a.is_null() || b.is_null()) {
    if (a.is_null() && b.is_null()) return std::partial_ordering::equivalent;
    return a.is_null() ? std::partial_ordering::less : std::partial_ordering::greater;
  }
  if (a.is_numeric() && b.is_numeric()) return compare_numbers(a, b);
  if (promote_strings && ((a.is_string() && b.is_numeric()) || (a.is_numeric() && b.is_string()))) {
    const AtomicValue& text = a.is_string() ? a : b;
    AtomicValue promoted;
    try {
      promoted = atomic_cast(text, AtomicKind::Double);
    } catch (const Error&) {
      fail(ErrorCode::TypeError,
           "cannot compare string \"" + text.as_string() + "\" with a number");
    }
    return a.is_string() ? compare_numbers(promoted, b) : compare_numbers(a, promoted);
  }
  if (a.kind() != b.kind()) incomparable(a, b);
  switch (a.kind()) {
    case AtomicKind::String: {
      int c = a.as_string().compare(b.as_string());
      return c < 0 ? std::partial_ordering::less
                   : c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent;
    }
    case AtomicKind::Boolean: return a.as_bool() <=> b.as_bool();
    case AtomicKind::Date: return a.as_date() <=> b.as_date();
    case AtomicKind::DateTime: return a.as_date_time() <=> b.as_date_time();
    case AtomicKind::HexBinary: return a.as_bytes() <=> b.as_bytes();
    default: incomparable(a, b);
  }
}

bool compare_atomic(CompareOp op, const AtomicValue& a, const AtomicValue& b) {
  std::partial_ordering order = compare_atomic(a, b, true);
  switch (op) {
    case CompareOp::Eq: return order == std::partial_ordering::equivalent;
    case CompareOp::Ne: return order != std::partial_ordering::equivalent;
    case CompareOp::Lt: return order == std::partial_ordering::less;
    case CompareOp::Le:
      return order == std::partial_ordering::less || order == std::partial_ordering::equivalent;
    case CompareOp::Gt: return order == std::partial_ordering::greater;
    case CompareOp::Ge:
      return order == std::partial_ordering::greater || order == std::partial_ordering::equivalent;
  }
  return false;
}

AtomicValue arithmetic(ArithOp op, const AtomicValue& a, const AtomicValue& b) {
  if (!a.is_numeric() || !b.is_numeric()) {
    fail(ErrorCode::TypeError, "arithmetic '" + std::string(arith_op_name(op)) + "' on " +
                                   std::string(kind_name(a.kind())) + " and " +
                                   std::string(kind_name(b.kind())));
  }
  AtomicKind ka = a.kind();
  AtomicKind kb = b.kind();
  if (is_approximate(ka) || is_approximate(kb)) {
    double x = a.to_double();
    double y = b.to_double();
    bool as_float = ka != AtomicKind::Double && kb != AtomicKind::Double;
    auto wrap = [as_float](double v) {
      return as_float ? AtomicValue::float_value(v) : AtomicValue::double_value(v);
    };
    switch (op) {
      case ArithOp::Add: return wrap(x + y);
      case ArithOp::Sub: return wrap(x - y);
      case ArithOp::Mul: return wrap(x * y);
      case ArithOp::Div: return wrap(x / y);
      case ArithOp::Mod: return wrap(std::fmod(x, y));
      case ArithOp::IDiv:
        if (y == 0) fail(ErrorCode::DivisionByZero, "integer division by zero");
        return AtomicValue::integer(truncate_double(x / y));
    }
  }
  if (is_integer_kind(ka) && is_integer_kind(kb) && op != ArithOp::Div) {
    const BigInt& x = a.as_integer();
    const BigInt& y = b.as_integer();
    switch (op) {
      case ArithOp::Add: return AtomicValue::integer(BigInt(x + y));
      case ArithOp::Sub: return AtomicValue::integer(BigInt(x - y));
      case ArithOp::Mul: return AtomicValue::integer(BigInt(x * y));
      case ArithOp::IDiv:
        if (y == 0) fail(ErrorCode::DivisionByZero, "integer division by zero");
        return AtomicValue::integer(BigInt(x / y));
      case ArithOp::Mod:
        if (y == 0) fail(ErrorCode::DivisionByZero, "modulo by zero");
        return AtomicValue::integer(BigInt(x % y));
      case ArithOp::Div: break;
    }
  }
  Decimal x = a.to_decimal();
  Decimal y = b.to_decimal();
  switch (op) {
    case ArithOp::Add: return AtomicValue::decimal(x + y);
    case ArithOp::Sub: return AtomicValue::decimal(x - y);
    case ArithOp::Mul: return AtomicValue::decimal(x * y);
    case ArithOp::Div: return AtomicValue::decimal(Decimal::divide(x, y));
    case ArithOp::IDiv:
    case ArithOp::Mod: {
      if (y.sign() == 0) fail(ErrorCode::DivisionByZero, "integer division by zero");
      int scale = std::max(x.scale(), y.scale());
      BigInt xs = x.unscaled() * pow10(scale - x.scale());
      BigInt ys = y.unscaled() * pow10(scale - y.scale());
      BigInt quotient = xs / ys;
      if (op == ArithOp::IDiv) return AtomicValue::integer(std::move(quotient));
      return AtomicValue::decimal(x - y * Decimal::from_integer(quotient));
    }
  }
  return AtomicValue::null();
}

AtomicValue negate(const AtomicValue& value) {
  if (is_integer_kind(value.kind())) return AtomicValue::integer(BigInt(-value.as_integer()));
  switch (value.kind()) {
    case AtomicKind::Decimal: return AtomicValue::decimal(-value.as_decimal());
    case AtomicKind::Double: return AtomicValue::double_value(-value.as_double());
    case AtomicKind::Float: return AtomicValue::float_value(-value.as_double());
    default:
      fail(ErrorCode::TypeError, "cannot negate " + std::string(kind_name(value.kind())));
  }
}

bool atomic_deep_equal(const AtomicValue& a, const AtomicValue& b) {
  if (a.is_numeric() && b.is_numeric()) {
    if (is_approximate(a.kind()) || is_approximate(b.kind())) {
      double x = a.to_double();
      double y = b.to_double();
      return x == y || (std::isnan(x) && std::isnan(y));
    }
    return compare_numbers(a, b) == std::partial_ordering::equivalent;
  }
  if (a.kind() != b.kind()) return false;
  if (a.is_null()) return true;
  return compare_atomic(a, b, false) == std::partial_ordering::equivalent;
}

}  // namespace jqml
