#include "phi/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>
#include <set>

#include "phi/errors.hpp"

namespace phi {
namespace {

struct LineNode {
  int line = 0;  // zero-based
  std::string text;
  std::vector<LineNode> children;

  int last_line() const { return children.empty() ? line : children.back().last_line(); }
};

enum class Tok { kLBracket, kRBracket, kLParen, kRParen, kGreater, kBang, kSlash, kDot, kQuote, kEllipsis, kName, kInt, kFloat, kString, kEnd };

struct Token {
  Tok kind;
  std::string text;
  DataValue value{};
};

bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '?';
}

class Lexer {
 public:
  Lexer(std::string_view text, const std::string& file, int line) : text_(text), file_(file), line_(line) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
      if (pos_ >= text_.size()) break;
      char c = text_[pos_];
      bool glued = pos_ > 0 && text_[pos_ - 1] != ' ';
      if (c == '[') { out.push_back({Tok::kLBracket, "["}); ++pos_; }
      else if (c == ']') { out.push_back({Tok::kRBracket, "]"}); ++pos_; }
      else if (c == '(') { out.push_back({Tok::kLParen, "("}); ++pos_; }
      else if (c == ')') { out.push_back({Tok::kRParen, ")"}); ++pos_; }
      else if (c == '>') { out.push_back({Tok::kGreater, ">"}); ++pos_; }
      else if (c == '!') { out.push_back({Tok::kBang, "!"}); ++pos_; }
      else if (c == '/') { out.push_back({Tok::kSlash, "/"}); ++pos_; }
      else if (c == '.') {
        if (text_.substr(pos_, 3) == "...") {
          out.push_back({Tok::kEllipsis, "..."});
          pos_ += 3;
        } else {
          out.push_back({Tok::kDot, "."});
          ++pos_;
        }
      } else if (c == '\'') {
        bool after_value = glued && !out.empty() &&
                           (out.back().kind == Tok::kName || out.back().kind == Tok::kRParen);
        if (after_value) {
          out.push_back({Tok::kQuote, "'"});
          ++pos_;
        } else {
          out.push_back(quoted('\''));
        }
      } else if (c == '"') {
        out.push_back(quoted('"'));
      } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                 (c == '-' && pos_ + 1 < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
        out.push_back(number());
      } else if (is_name_start(c)) {
        std::size_t start = pos_;
        while (pos_ < text_.size() && is_name_char(text_[pos_])) ++pos_;
        out.push_back({Tok::kName, std::string(text_.substr(start, pos_ - start))});
      } else if (c == '@' || c == '^' || c == '&' || c == '$' || c == '*' || c == '<') {
        out.push_back({Tok::kName, std::string(1, c)});
        ++pos_;
      } else {
        fail(std::string("unexpected character '") + c + "'");
      }
    }
    out.push_back({Tok::kEnd, ""});
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) { throw ParseError(file_, line_ + 1, msg); }

  Token quoted(char quote) {
    ++pos_;
    std::string s;
    while (true) {
      if (pos_ >= text_.size()) fail("unterminated string literal");
      char c = text_[pos_++];
      if (c == quote) break;
      if (c == '\\') {
        if (pos_ >= text_.size()) fail("unterminated string literal");
        char e = text_[pos_++];
        switch (e) {
          case 'n': s += '\n'; break;
          case 't': s += '\t'; break;
          case 'r': s += '\r'; break;
          case '\\': s += '\\'; break;
          case '"': s += '"'; break;
          case '\'': s += '\''; break;
          default: fail(std::string("unknown escape \\") + e);
        }
      } else {
        s += c;
      }
    }
    return {Tok::kString, s, DataValue(std::move(s))};
  }

  Token number() {
    std::size_t start = pos_;
    if (text_[pos_] == '-') ++pos_;
    auto digit_at = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    if (text_.substr(pos_, 2) == "0x" || text_.substr(pos_, 2) == "0X") {
      pos_ += 2;
      std::size_t hex_start = pos_;
      while (pos_ < text_.size() && std::isxdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::uint64_t v = 0;
      auto [p, ec] = std::from_chars(text_.data() + hex_start, text_.data() + pos_, v, 16);
      if (ec != std::errc() || hex_start == pos_) fail("malformed hex literal");
      std::int64_t sv = static_cast<std::int64_t>(v);
      if (text_[start] == '-') sv = -sv;
      return {Tok::kInt, std::string(text_.substr(start, pos_ - start)), DataValue(sv)};
    }
    while (digit_at(pos_)) ++pos_;
    bool is_float = false;
    if (pos_ < text_.size() && text_[pos_] == '.' && digit_at(pos_ + 1)) {
      is_float = true;
      ++pos_;
      while (digit_at(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t e = pos_ + 1;
      if (e < text_.size() && (text_[e] == '+' || text_[e] == '-')) ++e;
      if (digit_at(e)) {
        is_float = true;
        pos_ = e;
        while (digit_at(pos_)) ++pos_;
      }
    }
    std::string lexeme(text_.substr(start, pos_ - start));
    if (is_float) {
      double v = 0;
      auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
      if (ec != std::errc()) fail("malformed float literal " + lexeme);
      return {Tok::kFloat, lexeme, DataValue(v)};
    }
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
    if (ec != std::errc()) fail("integer literal out of range " + lexeme);
    return {Tok::kInt, lexeme, DataValue(v)};
  }

  std::string_view text_;
  const std::string& file_;
  int line_;
  std::size_t pos_ = 0;
};

struct Suffix {
  std::string name;
  bool constant = false;
  std::string atom_type;
};

class Parser {
 public:
  Parser(std::string_view text, const std::string& file) : text_(text), file_(file) {}

  Program run() {
    Program program;
    program.file = file_;
    std::vector<LineNode> roots = build_tree(program.line_count);
    for (const LineNode& node : roots) {
      if (!node.text.empty() && node.text[0] == '+') {
        program.items.push_back(Binding{"", false, meta(node)});
        continue;
      }
      Suffix suffix;
      TermPtr term = convert(node, program.items, suffix);
      if (!suffix.name.empty()) add_binding(program.items, Binding{suffix.name, suffix.constant, term}, node.line);
      else program.items.push_back(Binding{"", false, term});
    }
    return program;
  }

 private:
  [[noreturn]] void fail(int line, const std::string& msg) const { throw ParseError(file_, line + 1, msg); }

  std::vector<LineNode> build_tree(int& line_count) {
    std::vector<LineNode> roots;
    std::vector<LineNode*> stack;  // stack[d] is the open node at depth d
    int line = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      std::size_t eol = text_.find('\n', pos);
      if (eol == std::string_view::npos) eol = text_.size();
      std::string_view raw = text_.substr(pos, eol - pos);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      bool last = eol == text_.size();
      pos = eol + 1;
      int this_line = line++;
      if (last && raw.empty()) break;
      std::size_t indent = 0;
      while (indent < raw.size() && raw[indent] == ' ') ++indent;
      std::string_view body = raw.substr(indent);
      while (!body.empty() && (body.back() == ' ')) body.remove_suffix(1);
      if (body.empty() || body[0] == '#') continue;
      if (body[0] == '\t') fail(this_line, "tab in indentation");
      if (indent % 2 != 0) fail(this_line, "indentation must be a multiple of two spaces");
      std::size_t depth = indent / 2;
      if (depth > stack.size()) fail(this_line, "unexpected indentation");
      stack.resize(depth);
      LineNode node{this_line, std::string(body), {}};
      std::vector<LineNode>& siblings = depth == 0 ? roots : stack.back()->children;
      if (depth > 0 && !stack.back()->text.empty() && stack.back()->text[0] == '+') {
        fail(this_line, "meta lines cannot have children");
      }
      siblings.push_back(std::move(node));
      stack.push_back(&siblings.back());
      if (last) break;
    }
    line_count = line;
    return roots;
  }

  TermPtr meta(const LineNode& node) {
    std::string_view t = node.text;
    constexpr std::string_view kImport = "+import ";
    if (t.substr(0, kImport.size()) != kImport) fail(node.line, "unsupported meta " + std::string(t));
    std::string path(t.substr(kImport.size()));
    while (!path.empty() && path.front() == ' ') path.erase(path.begin());
    if (path.empty()) fail(node.line, "+import needs a path");
    return make_term(MetaImport{path}, span(node.line, node.line));
  }

  SourceSpan span(int first, int last) const { return SourceSpan{file_, first, last}; }

  void add_binding(std::vector<Binding>& target, Binding binding, int line) {
    for (const auto& b : target) {
      if (!b.name.empty() && b.name == binding.name) fail(line, "duplicate binding name '" + binding.name + "'");
    }
    target.push_back(std::move(binding));
  }

  // Token cursor over one line.
  struct Cursor {
    std::vector<Token> toks;
    std::size_t i = 0;
    int line = 0;
    const Token& peek(std::size_t ahead = 0) const {
      return toks[std::min(i + ahead, toks.size() - 1)];
    }
    const Token& next() { return toks[std::min(i++, toks.size() - 1)]; }
    bool at(Tok k) const { return peek().kind == k; }
  };

  static bool is_suffix_start(const Cursor& c) { return c.at(Tok::kGreater) || c.at(Tok::kSlash) || c.at(Tok::kEnd); }

  Suffix parse_suffix(Cursor& c) {
    Suffix s;
    if (c.at(Tok::kGreater)) {
      c.next();
      if (!c.at(Tok::kName)) fail(c.line, "expected a name after '>'");
      s.name = c.next().text;
      if (s.name == "^" || s.name == "&" || s.name == "$" || s.name == "*" || s.name == "<" || s.name == "Q") {
        fail(c.line, "'" + s.name + "' cannot be used as a binding name");
      }
      if (c.at(Tok::kBang)) {
        c.next();
        s.constant = true;
      }
    }
    if (c.at(Tok::kSlash)) {
      c.next();
      if (!c.at(Tok::kName)) fail(c.line, "expected an atom type after '/'");
      s.atom_type = c.next().text;
    }
    if (!c.at(Tok::kEnd)) fail(c.line, "unexpected '" + c.peek().text + "'");
    return s;
  }

  Formation parse_params(Cursor& c) {
    Formation f;
    c.next();  // [
    while (!c.at(Tok::kRBracket)) {
      if (!c.at(Tok::kName)) fail(c.line, "expected a parameter name");
      if (f.variadic) fail(c.line, "variadic parameter must be the last one");
      std::string name = c.next().text;
      if (!is_name_start(name[0])) fail(c.line, "bad parameter name '" + name + "'");
      for (const auto& p : f.params) {
        if (p == name) fail(c.line, "duplicate parameter '" + name + "'");
      }
      f.params.push_back(name);
      if (c.at(Tok::kEllipsis)) {
        c.next();
        f.variadic = true;
      }
    }
    c.next();  // ]
    return f;
  }

  // `( expr > name )` groups following a formation head.
  void parse_inline_bindings(Cursor& c, Formation& f) {
    while (c.at(Tok::kLParen)) {
      c.next();
      TermPtr term = parse_expression(c, f.bindings);
      if (!c.at(Tok::kGreater)) fail(c.line, "inline formation body needs '> name'");
      c.next();
      if (!c.at(Tok::kName)) fail(c.line, "expected a name after '>'");
      Binding b{c.next().text, false, term};
      if (c.at(Tok::kBang)) {
        c.next();
        b.constant = true;
      }
      if (!c.at(Tok::kRParen)) fail(c.line, "expected ')'");
      c.next();
      add_binding(f.bindings, std::move(b), c.line);
    }
  }

  TermPtr finish_formation(Formation f, int first, int last) {
    for (const auto& p : f.params) {
      if (f.find(p)) fail(first, "binding '" + p + "' clashes with a parameter");
    }
    return make_term(std::move(f), span(first, last));
  }

  TermPtr parse_primary(Cursor& c, std::vector<Binding>& target) {
    TermPtr base;
    const Token& t = c.peek();
    SourceSpan sp = span(c.line, c.line);
    switch (t.kind) {
      case Tok::kName: {
        std::string name = c.next().text;
        if (name == "TRUE" || name == "FALSE") base = make_term(Literal{DataValue(name == "TRUE")}, sp);
        else if (name == "<") fail(c.line, "'<' is only valid after a dot");
        else base = make_term(Dispatch{nullptr, name}, sp);
        break;
      }
      case Tok::kInt:
      case Tok::kFloat:
      case Tok::kString:
        base = make_term(Literal{c.next().value}, sp);
        break;
      case Tok::kLParen: {
        c.next();
        TermPtr inner = parse_expression(c, target);
        if (c.at(Tok::kGreater)) {
          c.next();
          if (!c.at(Tok::kName)) fail(c.line, "expected a name after '>'");
          Binding b{c.next().text, false, inner};
          if (c.at(Tok::kBang)) {
            c.next();
            b.constant = true;
          }
          if (!c.at(Tok::kRParen)) fail(c.line, "expected ')'");
          c.next();
          std::string name = b.name;
          add_binding(target, std::move(b), c.line);
          return make_term(Dispatch{nullptr, name}, sp);
        }
        if (!c.at(Tok::kRParen)) fail(c.line, "unbalanced parentheses");
        c.next();
        base = inner;
        break;
      }
      case Tok::kLBracket: {
        Formation f = parse_params(c);
        parse_inline_bindings(c, f);
        return finish_formation(std::move(f), c.line, c.line);
      }
      default:
        fail(c.line, t.kind == Tok::kRParen ? "unbalanced parentheses" : "unexpected '" + t.text + "'");
    }
    while (true) {
      if (c.at(Tok::kDot) && c.peek(1).kind == Tok::kName) {
        c.next();
        base = make_term(Dispatch{base, c.next().text}, sp);
      } else if (c.at(Tok::kQuote)) {
        c.next();
        base = make_term(Dispatch{base, "'"}, sp);
      } else {
        break;
      }
    }
    return base;
  }

  static bool starts_primary(const Cursor& c) {
    Tok k = c.peek().kind;
    return k == Tok::kName || k == Tok::kInt || k == Tok::kFloat || k == Tok::kString || k == Tok::kLParen ||
           k == Tok::kLBracket;
  }

  TermPtr parse_expression(Cursor& c, std::vector<Binding>& target) {
    if (!starts_primary(c)) fail(c.line, c.at(Tok::kEnd) ? "expected an expression" : "unexpected '" + c.peek().text + "'");
    TermPtr head = parse_primary(c, target);
    std::vector<TermPtr> args;
    while (starts_primary(c)) args.push_back(parse_primary(c, target));
    if (c.at(Tok::kDot)) fail(c.line, "dangling '.'");
    if (args.empty()) return head;
    return make_term(Application{head, std::move(args)}, span(c.line, c.line));
  }

  // Converts a child used as an argument, hoisting its name if it has one.
  TermPtr convert_arg(const LineNode& node, std::vector<Binding>& target) {
    Suffix s;
    TermPtr term = convert(node, target, s);
    if (s.name.empty()) return term;
    add_binding(target, Binding{s.name, s.constant, term}, node.line);
    return make_term(Dispatch{nullptr, s.name}, term->span);
  }

  TermPtr convert(const LineNode& node, std::vector<Binding>& target, Suffix& suffix) {
    if (!node.text.empty() && node.text[0] == '+') fail(node.line, "meta lines are only allowed at top level");
    Cursor c{Lexer(node.text, file_, node.line).run(), 0, node.line};
    int last = node.last_line();

    if (c.at(Tok::kLBracket)) {
      Formation f = parse_params(c);
      parse_inline_bindings(c, f);
      suffix = parse_suffix(c);
      f.atom_type = suffix.atom_type;
      for (const LineNode& child : node.children) {
        Suffix cs;
        TermPtr term = convert(child, f.bindings, cs);
        if (cs.name.empty()) fail(child.line, "object inside a formation body must be named with '>'");
        add_binding(f.bindings, Binding{cs.name, cs.constant, term}, child.line);
      }
      return finish_formation(std::move(f), node.line, last);
    }

    // Reversed dispatch: `name.` heading receiver and arguments.
    if (c.at(Tok::kName) && c.peek(1).kind == Tok::kDot &&
        (c.peek(2).kind == Tok::kEnd || c.peek(2).kind == Tok::kGreater || c.peek(2).kind == Tok::kSlash)) {
      std::string attr = c.next().text;
      c.next();
      suffix = parse_suffix(c);
      if (node.children.empty()) fail(node.line, "'" + attr + ".' needs a receiver on the next line");
      TermPtr receiver = convert_arg(node.children.front(), target);
      TermPtr head = make_term(Dispatch{receiver, attr}, span(node.line, last));
      if (node.children.size() == 1) return head;
      std::vector<TermPtr> args;
      for (std::size_t i = 1; i < node.children.size(); ++i) args.push_back(convert_arg(node.children[i], target));
      return make_term(Application{head, std::move(args)}, span(node.line, last));
    }

    TermPtr term = parse_expression(c, target);
    suffix = parse_suffix(c);
    if (node.children.empty()) return term;
    std::vector<TermPtr> args;
    TermPtr head = term;
    if (auto* app = term->as<Application>()) {
      head = app->head;
      args = app->args;
    }
    for (const LineNode& child : node.children) args.push_back(convert_arg(child, target));
    return make_term(Application{head, std::move(args)}, span(node.line, last));
  }

  std::string_view text_;
  std::string file_;
};

// ---------------------------------------------------------------------------

bool is_simple(const TermPtr& t) {
  if (t->as<Literal>()) return true;
  if (auto* d = t->as<Dispatch>()) return !d->receiver || is_simple(d->receiver);
  return false;
}

std::string inline_text(const TermPtr& t) {
  if (auto* l = t->as<Literal>()) return l->value.literal();
  auto* d = t->as<Dispatch>();
  if (!d->receiver) return d->attr;
  if (d->attr == "'") return inline_text(d->receiver) + "'";
  return inline_text(d->receiver) + "." + d->attr;
}

class Printer {
 public:
  std::string out;

  void emit(const TermPtr& t, const std::string& suffix, int indent) {
    std::string pad(indent, ' ');
    if (auto* m = t->as<MetaImport>()) {
      out += pad + "+import " + m->path + "\n";
      return;
    }
    if (auto* f = t->as<Formation>()) {
      std::string head = "[";
      for (std::size_t i = 0; i < f->params.size(); ++i) {
        if (i) head += ' ';
        head += f->params[i];
        if (f->variadic && i + 1 == f->params.size()) head += "...";
      }
      head += "]" + suffix;
      if (!f->atom_type.empty()) head += " /" + f->atom_type;
      out += pad + head + "\n";
      for (const auto& b : f->bindings) emit(b.term, " > " + b.name + (b.constant ? "!" : ""), indent + 2);
      return;
    }
    if (auto* a = t->as<Application>()) {
      std::vector<TermPtr> children;
      if (is_simple(a->head)) {
        out += pad + inline_text(a->head) + suffix + "\n";
      } else if (auto* d = a->head->as<Dispatch>(); d && d->receiver && d->attr != "'") {
        out += pad + d->attr + "." + suffix + "\n";
        children.push_back(d->receiver);
      } else {
        throw std::logic_error("application head cannot be printed");
      }
      children.insert(children.end(), a->args.begin(), a->args.end());
      for (const auto& c : children) emit(c, "", indent + 2);
      return;
    }
    if (is_simple(t)) {
      out += pad + inline_text(t) + suffix + "\n";
      return;
    }
    auto* d = t->as<Dispatch>();
    if (d->attr == "'") throw std::logic_error("copy suffix on a complex receiver cannot be printed");
    out += pad + d->attr + "." + suffix + "\n";
    emit(d->receiver, "", indent + 2);
  }
};

// ---------------------------------------------------------------------------

TermPtr with_source(const TermPtr& t, std::vector<std::string>& warnings);

TermPtr map_children(const TermPtr& t, std::vector<std::string>& warnings) {
  if (auto* a = t->as<Application>()) {
    Application copy{with_source(a->head, warnings), {}};
    for (const auto& arg : a->args) copy.args.push_back(with_source(arg, warnings));
    return make_term(std::move(copy), t->span);
  }
  if (auto* d = t->as<Dispatch>()) {
    if (!d->receiver) return t;
    return make_term(Dispatch{with_source(d->receiver, warnings), d->attr}, t->span);
  }
  return t;
}

TermPtr with_source(const TermPtr& t, std::vector<std::string>& warnings) {
  auto* f = t->as<Formation>();
  if (!f) return map_children(t, warnings);
  Formation copy = *f;
  for (auto& b : copy.bindings) b.term = with_source(b.term, warnings);
  if (f->find("source") || std::find(f->params.begin(), f->params.end(), "source") != f->params.end()) {
    warnings.push_back(t->span.file + ":" + std::to_string(t->span.first_line + 1) +
                       ": warning: formation already binds 'source'; synthetic source attribute suppressed");
  } else {
    copy.bindings.push_back(Binding{"source", false, make_term(Literal{DataValue(t->span.str())}, t->span)});
  }
  return make_term(std::move(copy), t->span);
}

}  // namespace

Program parse_program(std::string_view text, const std::string& file) { return Parser(text, file).run(); }

TermPtr attach_source(const TermPtr& term, std::vector<std::string>& warnings) {
  return with_source(term, warnings);
}

Program attach_source(const Program& program, std::vector<std::string>& warnings) {
  Program out = program;
  for (auto& item : out.items) item.term = with_source(item.term, warnings);
  return out;
}

std::string print_term(const TermPtr& term) {
  Printer p;
  p.emit(term, "", 0);
  return p.out;
}

std::string print_program(const Program& program) {
  Printer p;
  for (const auto& item : program.items) {
    std::string suffix = item.name.empty() ? "" : " > " + item.name + (item.constant ? "!" : "");
    p.emit(item.term, suffix, 0);
  }
  return p.out;
}

}  // namespace phi
