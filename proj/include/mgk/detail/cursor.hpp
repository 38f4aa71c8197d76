#pragma once

#include <cctype>
#include <string>
#include <string_view>

#include "mgk/errors.hpp"
#include "mgk/rational.hpp"

namespace mgk::detail {

// Hand-rolled scanner shared by the formula and game parsers.
class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() {
    skip_ws();
    return pos_ >= text_.size();
  }

  std::size_t position() const noexcept { return pos_; }

  bool peek(std::string_view token) {
    skip_ws();
    return text_.substr(pos_, token.size()) == token;
  }

  bool consume(std::string_view token) {
    if (!peek(token)) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }

  bool peek_identifier() {
    skip_ws();
    return pos_ < text_.size() && (std::isalpha(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_');
  }

  std::string identifier() {
    if (!peek_identifier()) fail("expected an identifier");
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    return std::string(text_.substr(start, pos_ - start));
  }

  /// p/q or an integer, required to lie in [0, 1].
  Rational unit_rational() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/')) {
      ++pos_;
    }
    if (start == pos_) fail("expected a rational");
    Rational r;
    try {
      r = parse_rational(text_.substr(start, pos_ - start));
    } catch (const InputError& e) {
      throw ParseError(e.what(), start);
    }
    if (r < 0 || r > 1) throw ParseError("threshold " + to_string(r) + " outside [0,1]", start);
    return r;
  }

  [[noreturn]] void fail(const std::string& message) {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError(message + ", found end of input", pos_);
    throw ParseError(message + ", found '" + std::string(1, text_[pos_]) + "'", pos_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace mgk::detail
