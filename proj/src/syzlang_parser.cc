// Copyright 2026 The Retro Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Lexer, parser and printer for the description subset.

#include <cctype>

#include "retro/error.h"
#include "retro/strings.h"
#include "retro/syzlang.h"

namespace retro {
namespace {

enum class Tok { kIdent, kNumber, kString, kPunct, kNewline, kEnd };

struct Token {
  Tok kind;
  std::string text;
  int line;
};

bool IsIdentChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::vector<Token> Lex(const SourceFile &source) {
  std::vector<Token> tokens;
  const std::string &s = source.text;
  int line = 1;
  size_t i = 0;
  auto error = [&](const std::string &what) {
    Fail(ErrorCode::kParse,
         source.path + ":" + std::to_string(line) + ": " + what);
  };
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      tokens.push_back({Tok::kNewline, "", line});
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < s.size() &&
                std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      const size_t begin = i++;
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      tokens.push_back({Tok::kNumber, s.substr(begin, i - begin), line});
    } else if (IsIdentChar(c)) {
      const size_t begin = i;
      while (i < s.size() && IsIdentChar(s[i])) ++i;
      std::string word = s.substr(begin, i - begin);
      const bool line_start = tokens.empty() || tokens.back().kind == Tok::kNewline;
      if (line_start && (word == "include" || word == "incdir" || word == "define")) {
        // Arguments may be paths like <linux/fs.h>.
        while (i < s.size() && s[i] != '\n') ++i;
        continue;
      }
      tokens.push_back({Tok::kIdent, std::move(word), line});
    } else if (c == '"' || c == '\'' || c == '`') {
      const size_t begin = i++;
      while (i < s.size() && s[i] != c && s[i] != '\n') ++i;
      if (i >= s.size() || s[i] != c) error("unterminated string literal");
      ++i;
      tokens.push_back({Tok::kString, s.substr(begin, i - begin), line});
    } else if (std::string_view("()[]{},:=").find(c) != std::string_view::npos) {
      tokens.push_back({Tok::kPunct, std::string(1, c), line});
      ++i;
    } else {
      error(std::string("unexpected character '") + c + "'");
    }
  }
  tokens.push_back({Tok::kEnd, "", line});
  return tokens;
}

Direction ParseDirectionWord(std::string_view word, bool *ok) {
  *ok = true;
  if (word == "in") return Direction::kIn;
  if (word == "out") return Direction::kOut;
  if (word == "inout") return Direction::kInOut;
  *ok = false;
  return Direction::kUnspecified;
}

class Parser {
 public:
  Parser(const SourceFile &source, std::string_view commit)
      : source_(source), commit_(commit), tokens_(Lex(source)) {}

  std::vector<Entity> Run() {
    std::vector<Entity> out;
    while (true) {
      SkipNewlines();
      if (Peek().kind == Tok::kEnd) break;
      if (Peek().kind != Tok::kIdent) Error("expected a declaration");
      const Token &first = Peek();
      if (first.text == "include" || first.text == "incdir" ||
          first.text == "define") {
        while (Peek().kind != Tok::kNewline && Peek().kind != Tok::kEnd) ++pos_;
        continue;
      }
      out.push_back(Declaration());
    }
    return out;
  }

 private:
  const Token &Peek(size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token &Next() {
    const Token &t = Peek();
    if (pos_ < tokens_.size() - 1) ++pos_;
    return t;
  }
  bool IsPunct(std::string_view p, size_t ahead = 0) const {
    return Peek(ahead).kind == Tok::kPunct && Peek(ahead).text == p;
  }
  [[noreturn]] void Error(const std::string &what) const {
    Fail(ErrorCode::kParse, source_.path + ":" + std::to_string(Peek().line) +
                                ": " + what);
  }
  void Expect(std::string_view p) {
    if (!IsPunct(p)) Error("expected '" + std::string(p) + "'");
    Next();
  }
  std::string ExpectIdent(std::string_view what) {
    if (Peek().kind != Tok::kIdent) Error("expected " + std::string(what));
    return Next().text;
  }
  void SkipNewlines() {
    while (Peek().kind == Tok::kNewline) Next();
  }
  void EndOfLine() {
    if (Peek().kind == Tok::kEnd) return;
    if (Peek().kind != Tok::kNewline) Error("expected end of line");
    Next();
  }

  Entity Begin(std::string name, EntityKind kind, int line) {
    Entity e;
    e.name = std::move(name);
    e.kind = kind;
    e.source_path = source_.path;
    e.source_line = line;
    e.source_commit = std::string(commit_);
    return e;
  }

  TypeExpr Type() {
    TypeExpr t;
    const Token &tok = Peek();
    if (tok.kind == Tok::kNumber) {
      t.head = Next().text;
      t.literal = true;
      if (IsPunct(":") && Peek(1).kind == Tok::kNumber) {
        Next();
        t.head += ":" + Next().text;
      }
      return t;
    }
    if (tok.kind == Tok::kString) {
      t.head = Next().text;
      t.literal = true;
      return t;
    }
    if (tok.kind != Tok::kIdent) Error("expected a type");
    t.head = Next().text;
    if (IsPunct("[")) {
      Next();
      SkipNewlines();
      if (!IsPunct("]")) {
        while (true) {
          t.args.push_back(Type());
          SkipNewlines();
          if (IsPunct(",")) {
            Next();
            SkipNewlines();
            continue;
          }
          break;
        }
      }
      Expect("]");
    }
    return t;
  }

  // Comma separated attribute list after the opening bracket.
  std::vector<TypeExpr> AttrList(std::string_view close) {
    std::vector<TypeExpr> attrs;
    if (!IsPunct(close)) {
      while (true) {
        attrs.push_back(Type());
        if (!IsPunct(",")) break;
        Next();
      }
    }
    Expect(close);
    return attrs;
  }

  Member MemberDecl(bool has_name) {
    Member m;
    if (has_name) m.name = ExpectIdent("a member name");
    m.type = Type();
    if (IsPunct("(")) {
      Next();
      for (const TypeExpr &a : AttrList(")")) {
        bool is_dir = false;
        const Direction d = a.args.empty() ? ParseDirectionWord(a.head, &is_dir)
                                           : Direction::kUnspecified;
        if (is_dir) {
          m.direction = d;
        } else {
          m.attrs.push_back(PrintTypeExpr(a));
        }
      }
    }
    return m;
  }

  std::vector<std::string> Values() {
    std::vector<std::string> values;
    while (true) {
      const Token &t = Peek();
      if (t.kind != Tok::kIdent && t.kind != Tok::kNumber &&
          t.kind != Tok::kString) {
        Error("expected a value");
      }
      values.push_back(Next().text);
      if (!IsPunct(",")) break;
      Next();
    }
    return values;
  }

  Entity Declaration() {
    const int line = Peek().line;
    const std::string word = Next().text;
    if (word == "resource" && Peek().kind == Tok::kIdent) {
      Entity e = Begin(Next().text, EntityKind::kResource, line);
      Expect("[");
      e.base = Type();
      Expect("]");
      if (IsPunct(":")) {
        Next();
        e.values = Values();
      }
      EndOfLine();
      return e;
    }
    if (word == "type" && Peek().kind == Tok::kIdent) {
      Entity e = Begin(Next().text, EntityKind::kTypeAlias, line);
      if (IsPunct("[")) {
        Next();
        while (true) {
          e.params.push_back(ExpectIdent("a template parameter"));
          if (!IsPunct(",")) break;
          Next();
        }
        Expect("]");
      }
      e.base = Type();
      EndOfLine();
      return e;
    }
    if (IsPunct("(")) {
      Entity e = Begin(word, EntityKind::kSyscall, line);
      Next();
      if (!IsPunct(")")) {
        while (true) {
          e.members.push_back(MemberDecl(true));
          if (!IsPunct(",")) break;
          Next();
        }
      }
      Expect(")");
      if (Peek().kind == Tok::kIdent) e.produces = Next().text;
      if (IsPunct("(")) {
        Next();
        for (const TypeExpr &a : AttrList(")")) e.attrs.push_back(PrintTypeExpr(a));
      }
      EndOfLine();
      return e;
    }
    if (IsPunct("{") || (IsPunct("[") && Peek(1).kind == Tok::kNewline)) {
      const bool is_struct = IsPunct("{");
      const std::string close = is_struct ? "}" : "]";
      Entity e = Begin(word, is_struct ? EntityKind::kStruct : EntityKind::kUnion,
                       line);
      Next();
      SkipNewlines();
      while (!IsPunct(close)) {
        if (Peek().kind == Tok::kEnd) Error("unterminated " + word);
        e.members.push_back(MemberDecl(true));
        EndOfLine();
        SkipNewlines();
      }
      Next();
      if (IsPunct("[")) {
        Next();
        for (const TypeExpr &a : AttrList("]")) e.attrs.push_back(PrintTypeExpr(a));
      }
      EndOfLine();
      return e;
    }
    if (IsPunct("=")) {
      Entity e = Begin(word, EntityKind::kFlagset, line);
      Next();
      e.values = Values();
      EndOfLine();
      return e;
    }
    Error("unrecognized declaration '" + word + "'");
  }

  const SourceFile &source_;
  std::string_view commit_;
  std::vector<Token> tokens_;
  size_t pos_ = 0;
};

std::string JoinMembers(const std::vector<Member> &members, bool inline_form) {
  std::string out;
  for (size_t i = 0; i < members.size(); ++i) {
    const Member &m = members[i];
    if (inline_form && i) out += ", ";
    if (!inline_form) out += "\t";
    out += m.name + " " + PrintTypeExpr(m.type);
    std::vector<std::string> attrs;
    if (m.direction != Direction::kUnspecified) {
      attrs.emplace_back(ToString(m.direction));
    }
    attrs.insert(attrs.end(), m.attrs.begin(), m.attrs.end());
    if (!attrs.empty()) out += " (" + Join(attrs, ", ") + ")";
    if (!inline_form) out += "\n";
  }
  return out;
}

}  // namespace

std::string PrintTypeExpr(const TypeExpr &type) {
  std::string out = type.head;
  if (!type.args.empty()) {
    out += "[";
    for (size_t i = 0; i < type.args.size(); ++i) {
      if (i) out += ", ";
      out += PrintTypeExpr(type.args[i]);
    }
    out += "]";
  }
  return out;
}

std::string PrintEntity(const Entity &e) {
  std::string out;
  switch (e.kind) {
    case EntityKind::kResource:
      out = "resource " + e.name + "[" + PrintTypeExpr(e.base) + "]";
      if (!e.values.empty()) out += ": " + Join(e.values, ", ");
      break;
    case EntityKind::kSyscall:
      out = e.name + "(" + JoinMembers(e.members, true) + ")";
      if (e.produces) out += " " + *e.produces;
      if (!e.attrs.empty()) out += " (" + Join(e.attrs, ", ") + ")";
      break;
    case EntityKind::kStruct:
    case EntityKind::kUnion: {
      const bool is_struct = e.kind == EntityKind::kStruct;
      out = e.name + (is_struct ? " {\n" : " [\n") + JoinMembers(e.members, false) +
            (is_struct ? "}" : "]");
      if (!e.attrs.empty()) out += " [" + Join(e.attrs, ", ") + "]";
      break;
    }
    case EntityKind::kFlagset:
      out = e.name + " = " + Join(e.values, ", ");
      break;
    case EntityKind::kTypeAlias:
      out = "type " + e.name;
      if (!e.params.empty()) out += "[" + Join(e.params, ", ") + "]";
      out += " " + PrintTypeExpr(e.base);
      break;
  }
  return out;
}

std::vector<Entity> ParseEntities(const SourceFile &source,
                                  std::string_view source_commit) {
  return Parser(source, source_commit).Run();
}

DescriptionCorpus ParseDescriptions(std::span<const SourceFile> sources,
                                    bool legacy_inout,
                                    std::string_view source_commit) {
  std::vector<EntityPtr> entities;
  for (const SourceFile &source : sources) {
    for (Entity &e : ParseEntities(source, source_commit)) {
      entities.push_back(std::make_shared<const Entity>(std::move(e)));
    }
  }
  return DescriptionCorpus::Build(std::move(entities), legacy_inout);
}

}  // namespace retro
