#include "sact/parse.hpp"

#include <cctype>
#include <set>
#include <sstream>

namespace sact {
namespace {

struct token {
  enum class kind { ident, lparen, rparen, lbrace, rbrace, comma, semi, colon, end };
  kind k;
  std::string text;
  source_loc loc;
};

const char* describe(token::kind k) {
  switch (k) {
    case token::kind::ident: return "identifier";
    case token::kind::lparen: return "'('";
    case token::kind::rparen: return "')'";
    case token::kind::lbrace: return "'{'";
    case token::kind::rbrace: return "'}'";
    case token::kind::comma: return "','";
    case token::kind::semi: return "';'";
    case token::kind::colon: return "':'";
    case token::kind::end: return "end of input";
  }
  return "?";
}

struct parse_abort {};

class parser {
 public:
  explicit parser(std::string_view src) : src_(src) {}

  parse_result run() {
    parse_result result;
    try {
      lex();
      global_protocol p = parse_protocol();
      expect(token::kind::end, "end of input after protocol");
      check_rec_scopes(p.body, {});
      if (!has_errors(diags_))
        result.protocol = std::move(p);
    } catch (const parse_abort&) {
      // diagnostic already recorded
    }
    result.diags = std::move(diags_);
    if (has_errors(result.diags))
      result.protocol.reset();
    return result;
  }

 private:
  std::string_view src_;
  std::vector<token> toks_;
  std::size_t pos_ = 0;
  std::vector<diagnostic> diags_;

  [[noreturn]] void fail(source_loc loc, std::string msg) {
    diags_.push_back({diagnostic::severity::error, std::move(msg), loc});
    throw parse_abort{};
  }

  void lex() {
    int line = 1, col = 1;
    std::size_t i = 0;
    auto advance = [&](char c) {
      if (c == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    };
    while (i < src_.size()) {
      char c = src_[i];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance(c);
        continue;
      }
      if (c == '/' && i + 1 < src_.size() && src_[i + 1] == '/') {
        while (i < src_.size() && src_[i] != '\n')
          advance(src_[i]);
        continue;
      }
      source_loc loc{line, col};
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string text;
        while (i < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[i])) || src_[i] == '_')) {
          text += src_[i];
          advance(src_[i]);
        }
        toks_.push_back({token::kind::ident, std::move(text), loc});
        continue;
      }
      token::kind k;
      switch (c) {
        case '(': k = token::kind::lparen; break;
        case ')': k = token::kind::rparen; break;
        case '{': k = token::kind::lbrace; break;
        case '}': k = token::kind::rbrace; break;
        case ',': k = token::kind::comma; break;
        case ';': k = token::kind::semi; break;
        case ':': k = token::kind::colon; break;
        default:
          fail(loc, std::string("unexpected character '") + c + "'");
      }
      toks_.push_back({k, std::string(1, c), loc});
      advance(c);
    }
    toks_.push_back({token::kind::end, "", {line, col}});
  }

  const token& peek(std::size_t ahead = 0) const {
    std::size_t idx = pos_ + ahead;
    return idx < toks_.size() ? toks_[idx] : toks_.back();
  }

  token next() {
    const token& t = peek();
    if (t.k != token::kind::end)
      ++pos_;
    return t;
  }

  bool at_ident(std::string_view word) const {
    return peek().k == token::kind::ident && peek().text == word;
  }

  token expect(token::kind k, std::string_view what) {
    if (peek().k != k)
      fail(peek().loc, "expected " + std::string(what) + ", found " +
                           (peek().k == token::kind::ident ? "'" + peek().text + "'"
                                                           : describe(peek().k)));
    return next();
  }

  token expect_word(std::string_view word) {
    if (!at_ident(word))
      fail(peek().loc, "expected '" + std::string(word) + "', found " +
                           (peek().k == token::kind::ident ? "'" + peek().text + "'"
                                                           : describe(peek().k)));
    return next();
  }

  global_protocol parse_protocol() {
    global_protocol p;
    p.loc = peek().loc;
    expect_word("global");
    expect_word("protocol");
    p.name = expect(token::kind::ident, "protocol name").text;
    expect(token::kind::lparen, "'('");
    while (true) {
      role_decl decl;
      decl.loc = peek().loc;
      expect_word("role");
      decl.name = expect(token::kind::ident, "role name").text;
      p.roles.push_back(std::move(decl));
      if (peek().k == token::kind::comma) {
        next();
        continue;
      }
      break;
    }
    expect(token::kind::rparen, "')'");
    p.body = parse_block();
    return p;
  }

  interaction_seq parse_block() {
    expect(token::kind::lbrace, "'{'");
    interaction_seq seq;
    while (peek().k != token::kind::rbrace && peek().k != token::kind::end)
      seq.push_back(parse_interaction());
    expect(token::kind::rbrace, "'}'");
    return seq;
  }

  global_interaction parse_interaction() {
    global_interaction item;
    item.loc = peek().loc;
    if (at_ident("choice")) {
      next();
      expect_word("at");
      choice c;
      c.at = expect(token::kind::ident, "role name").text;
      c.branches.push_back(parse_block());
      while (at_ident("or")) {
        next();
        c.branches.push_back(parse_block());
      }
      item.node = std::move(c);
      return item;
    }
    if (at_ident("rec")) {
      next();
      recursion r;
      r.var = expect(token::kind::ident, "recursion label").text;
      r.body = parse_block();
      item.node = std::move(r);
      return item;
    }
    if (at_ident("continue")) {
      next();
      continuation c;
      c.var = expect(token::kind::ident, "recursion label").text;
      expect(token::kind::semi, "';'");
      item.node = std::move(c);
      return item;
    }
    for (const char* word : {"parallel", "interrupt", "interruptible", "do"}) {
      if (at_ident(word))
        fail(peek().loc, "unsupported construct '" + std::string(word) + "'");
    }
    // message transfer: [label] '(' payload ')' from R to R (',' R)* ';'
    transfer t;
    if (peek().k == token::kind::ident)
      t.sig.label = next().text;
    expect(token::kind::lparen, "'('");
    if (peek().k != token::kind::rparen) {
      while (true) {
        t.sig.payload.push_back(parse_payload_item());
        if (peek().k == token::kind::comma) {
          next();
          continue;
        }
        break;
      }
    }
    expect(token::kind::rparen, "')'");
    expect_word("from");
    t.from = expect(token::kind::ident, "role name").text;
    expect_word("to");
    t.to.push_back(expect(token::kind::ident, "role name").text);
    while (peek().k == token::kind::comma) {
      next();
      t.to.push_back(expect(token::kind::ident, "role name").text);
    }
    expect(token::kind::semi, "';'");
    item.node = std::move(t);
    return item;
  }

  payload_item parse_payload_item() {
    token t = expect(token::kind::ident, "payload sort");
    auto s = sort_from_name(t.text);
    if (!s)
      fail(t.loc, "unknown payload sort '" + t.text + "'");
    payload_item item{*s, ""};
    if (peek().k == token::kind::colon) {
      next();
      item.name = expect(token::kind::ident, "payload name").text;
    }
    return item;
  }

  // Static scoping of recursion variables; collects every unbound use.
  void check_rec_scopes(const interaction_seq& seq, std::set<std::string> bound) {
    for (const auto& item : seq) {
      if (const auto* c = std::get_if<choice>(&item.node)) {
        for (const auto& branch : c->branches)
          check_rec_scopes(branch, bound);
      } else if (const auto* r = std::get_if<recursion>(&item.node)) {
        auto inner = bound;
        inner.insert(r->var);
        check_rec_scopes(r->body, std::move(inner));
      } else if (const auto* k = std::get_if<continuation>(&item.node)) {
        if (!bound.count(k->var))
          diags_.push_back({diagnostic::severity::error,
                            "unbound recursion variable " + k->var, item.loc});
      }
    }
  }
};

void print_seq(std::ostream& out, const interaction_seq& seq, int depth);

void print_indent(std::ostream& out, int depth) {
  for (int i = 0; i < depth; ++i)
    out << "  ";
}

void print_interaction(std::ostream& out, const global_interaction& item, int depth) {
  print_indent(out, depth);
  if (const auto* t = std::get_if<transfer>(&item.node)) {
    out << to_string(t->sig) << " from " << t->from << " to ";
    for (std::size_t i = 0; i < t->to.size(); ++i) {
      if (i > 0)
        out << ", ";
      out << t->to[i];
    }
    out << ";\n";
  } else if (const auto* c = std::get_if<choice>(&item.node)) {
    out << "choice at " << c->at << " {\n";
    for (std::size_t i = 0; i < c->branches.size(); ++i) {
      if (i > 0) {
        print_indent(out, depth);
        out << "} or {\n";
      }
      print_seq(out, c->branches[i], depth + 1);
    }
    print_indent(out, depth);
    out << "}\n";
  } else if (const auto* r = std::get_if<recursion>(&item.node)) {
    out << "rec " << r->var << " {\n";
    print_seq(out, r->body, depth + 1);
    print_indent(out, depth);
    out << "}\n";
  } else {
    out << "continue " << std::get<continuation>(item.node).var << ";\n";
  }
}

void print_seq(std::ostream& out, const interaction_seq& seq, int depth) {
  for (const auto& item : seq)
    print_interaction(out, item, depth);
}

}  // namespace

parse_result parse_global(std::string_view source) {
  return parser(source).run();
}

std::string pretty_print(const global_protocol& p) {
  std::ostringstream out;
  out << "global protocol " << p.name << "(";
  for (std::size_t i = 0; i < p.roles.size(); ++i) {
    if (i > 0)
      out << ", ";
    out << "role " << p.roles[i].name;
  }
  out << ") {\n";
  print_seq(out, p.body, 1);
  out << "}\n";
  return out.str();
}

}  // namespace sact
