#include "jqml/lexer.hpp"

#include <cctype>

namespace jqml {

namespace {

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
         static_cast<unsigned char>(c) >= 0x80;
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c));
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

void append_utf8(std::string& out, unsigned code) {
  if (code < 0x80) {
    out += static_cast<char>(code);
  } else if (code < 0x800) {
    out += static_cast<char>(0xC0 | (code >> 6));
    out += static_cast<char>(0x80 | (code & 0x3F));
  } else if (code < 0x10000) {
    out += static_cast<char>(0xE0 | (code >> 12));
    out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (code & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (code >> 18));
    out += static_cast<char>(0x80 | ((code >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((code >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (code & 0x3F));
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  std::vector<Token> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_space_and_comments();
      if (at_end()) break;
      tokens.push_back(next_token());
    }
    tokens.push_back(Token{TokenKind::End, "", here()});
    return tokens;
  }

 private:
  bool at_end() const { return i_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }
  SourcePos here() const { return SourcePos{line_, column_}; }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++i_;
  }

  void skip_space_and_comments() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '(' && peek(1) == ':') {
        SourcePos start = here();
        int depth = 0;
        do {
          if (at_end()) fail(ErrorCode::LexError, "unterminated comment", start);
          if (peek() == '(' && peek(1) == ':') {
            ++depth;
            advance();
            advance();
          } else if (peek() == ':' && peek(1) == ')') {
            --depth;
            advance();
            advance();
          } else {
            advance();
          }
        } while (depth > 0);
      } else {
        return;
      }
    }
  }

  std::string read_ncname() {
    std::string out;
    while (!at_end()) {
      char c = peek();
      if (is_name_char(c)) {
        out += c;
        advance();
      } else if (c == '-' && is_name_start(peek(1))) {
        out += c;
        advance();
      } else {
        break;
      }
    }
    return out;
  }

  Token next_token() {
    SourcePos pos = here();
    char c = peek();
    if (c == '$') {
      advance();
      if (peek() == '$') {
        advance();
        return Token{TokenKind::ContextItem, "$$", pos};
      }
      if (!is_name_start(peek())) fail(ErrorCode::LexError, "expected a variable name after $", pos);
      return Token{TokenKind::Variable, read_qname(), pos};
    }
    if (is_name_start(c)) return Token{TokenKind::Name, read_qname(), pos};
    if (is_digit(c)) return number(pos);
    if (c == '"') return string_literal(pos);

    static constexpr std::string_view kTwoChar[] = {":=", "{|", "|}"};
    for (std::string_view sym : kTwoChar) {
      if (peek() == sym[0] && peek(1) == sym[1]) {
        advance();
        advance();
        return Token{TokenKind::Symbol, std::string(sym), pos};
      }
    }
    static constexpr std::string_view kOneChar = "(){}[],:;.#+-*?";
    if (kOneChar.find(c) != std::string_view::npos) {
      advance();
      return Token{TokenKind::Symbol, std::string(1, c), pos};
    }
    fail(ErrorCode::LexError, std::string("illegal character '") + c + "'", pos);
  }

  std::string read_qname() {
    std::string name = read_ncname();
    if (peek() == ':' && is_name_start(peek(1))) {
      advance();
      name += ':';
      name += read_ncname();
    }
    return name;
  }

  Token number(SourcePos pos) {
    std::string out;
    TokenKind kind = TokenKind::Integer;
    while (is_digit(peek())) {
      out += peek();
      advance();
    }
    if (peek() == '.' && is_digit(peek(1))) {
      kind = TokenKind::Decimal;
      out += '.';
      advance();
      while (is_digit(peek())) {
        out += peek();
        advance();
      }
    }
    if ((peek() == 'e' || peek() == 'E') &&
        (is_digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && is_digit(peek(2))))) {
      kind = TokenKind::Double;
      out += peek();
      advance();
      if (peek() == '+' || peek() == '-') {
        out += peek();
        advance();
      }
      while (is_digit(peek())) {
        out += peek();
        advance();
      }
    }
    if (is_name_start(peek())) fail(ErrorCode::LexError, "malformed number literal", pos);
    return Token{kind, out, pos};
  }

  Token string_literal(SourcePos pos) {
    advance();
    std::string out;
    while (true) {
      if (at_end()) fail(ErrorCode::LexError, "unterminated string literal", pos);
      char c = peek();
      if (c == '"') {
        advance();
        break;
      }
      if (c != '\\') {
        out += c;
        advance();
        continue;
      }
      SourcePos escape_pos = here();
      advance();
      if (at_end()) fail(ErrorCode::LexError, "unterminated string literal", pos);
      char e = peek();
      advance();
      switch (e) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case '/': out += '/'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        case 'n': out += '\n'; break;
        case 'r': out += '\r'; break;
        case 't': out += '\t'; break;
        case 'u': {
          unsigned code = read_hex4(escape_pos);
          if (code >= 0xD800 && code < 0xDC00 && peek() == '\\' && peek(1) == 'u') {
            advance();
            advance();
            unsigned low = read_hex4(escape_pos);
            if (low >= 0xDC00 && low < 0xE000) {
              code = 0x10000 + ((code - 0xD800) << 10) + (low - 0xDC00);
            } else {
              fail(ErrorCode::LexError, "invalid surrogate pair", escape_pos);
            }
          }
          append_utf8(out, code);
          break;
        }
        default:
          fail(ErrorCode::LexError, std::string("invalid escape \\") + e, escape_pos);
      }
    }
    return Token{TokenKind::String, out, pos};
  }

  unsigned read_hex4(SourcePos pos) {
    unsigned code = 0;
    for (int k = 0; k < 4; ++k) {
      char h = peek();
      unsigned v;
      if (h >= '0' && h <= '9') {
        v = h - '0';
      } else if (h >= 'a' && h <= 'f') {
        v = h - 'a' + 10;
      } else if (h >= 'A' && h <= 'F') {
        v = h - 'A' + 10;
      } else {
        fail(ErrorCode::LexError, "invalid \\u escape", pos);
      }
      code = code * 16 + v;
      advance();
    }
    return code;
  }

  std::string_view text_;
  std::size_t i_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace

std::vector<Token> lex(std::string_view text) { return Lexer(text).run(); }

}  // namespace jqml
