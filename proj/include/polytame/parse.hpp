#pragma once

// Text formats. Coefficient and root lists are whitespace-separated entries,
// each either a real number or "(re,im)"; coefficients run from degree 0 up.

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "polytame/error.hpp"
#include "polytame/poly.hpp"

namespace polytame {

namespace detail {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const noexcept { return pos_ >= text_.size(); }
  char peek() const noexcept { return done() ? '\0' : text_[pos_]; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

  void advance() noexcept {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space() noexcept {
    while (!done() && std::isspace(static_cast<unsigned char>(peek()))) advance();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(Errc::parse_error, what, line_, column_);
  }

  void expect(char ch) {
    if (peek() != ch) fail(std::string("expected '") + ch + "'");
    advance();
  }

  double number() {
    const int line = line_, column = column_;
    const std::size_t begin = pos_;
    while (!done()) {
      const char ch = peek();
      if (std::isspace(static_cast<unsigned char>(ch)) || ch == '(' || ch == ')' || ch == ',') break;
      advance();
    }
    const auto token = text_.substr(begin, pos_ - begin);
    if (token.empty()) throw ParseError(Errc::parse_error, "expected a number", line, column);
    double value = 0.0;
    // from_chars rejects a leading '+'; accept it as an ordinary sign.
    const auto body = token.front() == '+' && token.size() > 1 ? token.substr(1) : token;
    const auto [end, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
    if (ec != std::errc{} || end != body.data() + body.size() || !std::isfinite(value)) {
      throw ParseError(Errc::parse_error, "bad number '" + std::string(token) + "'", line, column);
    }
    return value;
  }

  Complex complex_entry() {
    if (peek() != '(') return {number(), 0.0};
    advance();
    const double re = number();
    expect(',');
    const double im = number();
    expect(')');
    return {re, im};
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

}  // namespace detail

/// Reads every entry of a whitespace-separated list.
inline std::vector<Complex> parse_complex_list(std::string_view text) {
  detail::Cursor cur(text);
  std::vector<Complex> out;
  cur.skip_space();
  while (!cur.done()) {
    out.push_back(cur.complex_entry());
    if (!cur.done() && !std::isspace(static_cast<unsigned char>(cur.peek()))) {
      cur.fail("expected whitespace between entries");
    }
    cur.skip_space();
  }
  return out;
}

/// One number or "(re,im)" with nothing around it.
inline Complex parse_complex(std::string_view text) {
  detail::Cursor cur(text);
  const Complex z = cur.complex_entry();
  if (!cur.done()) cur.fail("trailing characters");
  return z;
}

inline Polynomial parse_polynomial(std::string_view text) {
  auto coeffs = parse_complex_list(text);
  if (coeffs.size() < 2) {
    detail::Cursor end(text);
    while (!end.done()) end.advance();
    end.fail("need at least two coefficients");
  }
  return Polynomial(std::move(coeffs));
}

/// Whole file, or standard input for "-".
inline std::string read_text(const std::string& path) {
  std::ostringstream out;
  if (path == "-") {
    out << std::cin.rdbuf();
    return out.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::precondition, "cannot open '" + path + "'");
  out << in.rdbuf();
  return out.str();
}

/// Splits at commas that are not inside parentheses.
inline std::vector<std::string> split_top_level(std::string_view text) {
  std::vector<std::string> out;
  int depth = 0;
  std::string current;
  for (char ch : text) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (ch == ',' && depth == 0) {
      out.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  out.push_back(current);
  return out;
}

}  // namespace polytame
