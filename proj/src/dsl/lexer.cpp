#include "fm/dsl/lexer.hpp"

#include <cctype>
#include <string>

namespace fm::dsl {

namespace {

bool ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

struct Cursor {
  std::string_view src;
  std::size_t pos = 0;
  int line = 1;
  int column = 1;

  bool done() const { return pos >= src.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos + ahead < src.size() ? src[pos + ahead] : '\0';
  }
  char take() {
    char c = src[pos++];
    if (c == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
    return c;
  }
};

}  // namespace

std::vector<Token> lex(std::string_view src, std::string_view file,
                       std::vector<Diagnostic>& diags) {
  std::vector<Token> out;
  Cursor cur{src};
  std::string fname(file);

  auto span_here = [&](int len) {
    return SourceSpan{fname, cur.line, cur.column, len};
  };
  auto push = [&](Tok kind, SourceSpan span, std::string text = {},
                  long long ival = 0) {
    out.push_back(Token{kind, std::move(text), ival, std::move(span)});
  };

  while (!cur.done()) {
    char c = cur.peek();
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      cur.take();
      continue;
    }
    if (c == '/' && cur.peek(1) == '/') {
      while (!cur.done() && cur.peek() != '\n') cur.take();
      continue;
    }

    SourceSpan start = span_here(1);

    if (ident_start(c)) {
      std::string text;
      while (!cur.done() && ident_char(cur.peek())) text += cur.take();
      start.length = static_cast<int>(text.size());
      push(Tok::Ident, start, std::move(text));
      continue;
    }

    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && std::isdigit(static_cast<unsigned char>(cur.peek(1))))) {
      std::string text;
      if (cur.peek() == '-') text += cur.take();
      while (!cur.done() && std::isdigit(static_cast<unsigned char>(cur.peek())))
        text += cur.take();
      start.length = static_cast<int>(text.size());
      if (!cur.done() && ident_char(cur.peek())) {
        std::string tail = text;
        while (!cur.done() && ident_char(cur.peek())) tail += cur.take();
        start.length = static_cast<int>(tail.size());
        diags.push_back({Severity::Error, std::string(diag::BAD_NUMBER), start,
                         "malformed number '" + tail + "'"});
        continue;
      }
      long long value = 0;
      try {
        value = std::stoll(text);
      } catch (const std::exception&) {
        diags.push_back({Severity::Error, std::string(diag::BAD_NUMBER), start,
                         "number out of range '" + text + "'"});
        continue;
      }
      push(Tok::Int, start, std::move(text), value);
      continue;
    }

    if (c == '"') {
      cur.take();
      std::string text;
      bool closed = false;
      while (!cur.done()) {
        char q = cur.take();
        if (q == '"') {
          closed = true;
          break;
        }
        if (q == '\n') break;  // strings do not span lines
        if (q == '\\' && !cur.done()) {
          char esc = cur.take();
          if (esc == '"' || esc == '\\') {
            text += esc;
          } else {
            text += '\\';
            text += esc;
          }
          continue;
        }
        text += q;
      }
      start.length = static_cast<int>(text.size()) + 2;
      if (!closed) {
        diags.push_back({Severity::Error, std::string(diag::UNTERMINATED_STRING),
                         start, "unterminated string"});
        continue;
      }
      push(Tok::String, start, std::move(text));
      continue;
    }

    auto two = [&](char a, char b) {
      return cur.peek() == a && cur.peek(1) == b;
    };

    if (two('-', '>')) {
      start.length = 2;
      cur.take();
      cur.take();
      push(Tok::Arrow, start, "->");
      continue;
    }
    if (two('=', '=')) {
      start.length = 2;
      cur.take();
      cur.take();
      push(Tok::EqEq, start, "==");
      continue;
    }
    if (two('!', '=')) {
      start.length = 2;
      cur.take();
      cur.take();
      push(Tok::Ne, start, "!=");
      continue;
    }
    if (two('<', '=')) {
      start.length = 2;
      cur.take();
      cur.take();
      push(Tok::Le, start, "<=");
      continue;
    }
    if (two('>', '=')) {
      start.length = 2;
      cur.take();
      cur.take();
      push(Tok::Ge, start, ">=");
      continue;
    }

    Tok single = Tok::End;
    switch (c) {
      case '{': single = Tok::LBrace; break;
      case '}': single = Tok::RBrace; break;
      case '(': single = Tok::LParen; break;
      case ')': single = Tok::RParen; break;
      case '[': single = Tok::LBracket; break;
      case ']': single = Tok::RBracket; break;
      case ';': single = Tok::Semi; break;
      case ',': single = Tok::Comma; break;
      case ':': single = Tok::Colon; break;
      case '.': single = Tok::Dot; break;
      case '=': single = Tok::Assign; break;
      case '<': single = Tok::Lt; break;
      case '>': single = Tok::Gt; break;
      default: break;
    }
    if (single != Tok::End) {
      cur.take();
      push(single, start, std::string(1, c));
      continue;
    }

    cur.take();
    diags.push_back({Severity::Error, std::string(diag::UNEXPECTED_CHAR), start,
                     std::string("unexpected character '") + c + "'"});
  }

  Token end;
  end.kind = Tok::End;
  end.span = SourceSpan{fname, cur.line, cur.column, 0};
  out.push_back(std::move(end));
  return out;
}

}  // namespace fm::dsl
