#include "chaosmine/process_tree.hpp"

#include <cctype>

#include "chaosmine/error.hpp"

namespace chaosmine {

namespace {

constexpr std::size_t kLanguageLimit = 2'000'000;

using Language = std::set<std::vector<std::string>>;

void check_limit(const Language& language) {
  if (language.size() > kLanguageLimit) {
    throw InvalidArgument("bounded language exceeds " + std::to_string(kLanguageLimit) + " traces");
  }
}

Language concatenate(const Language& left, const Language& right, std::size_t max_length) {
  Language out;
  for (const auto& l : left) {
    for (const auto& r : right) {
      if (l.size() + r.size() > max_length) continue;
      auto joined = l;
      joined.insert(joined.end(), r.begin(), r.end());
      out.insert(std::move(joined));
    }
    check_limit(out);
  }
  return out;
}

void interleave(const std::vector<std::string>& a, std::size_t i, const std::vector<std::string>& b,
                std::size_t j, std::vector<std::string>& prefix, Language& out) {
  if (i == a.size() && j == b.size()) {
    out.insert(prefix);
    return;
  }
  if (i < a.size()) {
    prefix.push_back(a[i]);
    interleave(a, i + 1, b, j, prefix, out);
    prefix.pop_back();
  }
  if (j < b.size()) {
    prefix.push_back(b[j]);
    interleave(a, i, b, j + 1, prefix, out);
    prefix.pop_back();
  }
}

Language shuffle(const Language& left, const Language& right, std::size_t max_length) {
  Language out;
  std::vector<std::string> prefix;
  for (const auto& l : left) {
    for (const auto& r : right) {
      if (l.size() + r.size() > max_length) continue;
      interleave(l, 0, r, 0, prefix, out);
    }
    check_limit(out);
  }
  return out;
}

Language enumerate(const ProcessTree& node, std::size_t max_length) {
  switch (node.kind) {
    case NodeKind::activity:
      if (max_length == 0) return {};
      return {{node.label}};
    case NodeKind::silent:
      return {{}};
    case NodeKind::exclusive_choice: {
      Language out;
      for (const auto& child : node.children) out.merge(enumerate(child, max_length));
      check_limit(out);
      return out;
    }
    case NodeKind::sequence: {
      Language out{{}};
      for (const auto& child : node.children) out = concatenate(out, enumerate(child, max_length), max_length);
      return out;
    }
    case NodeKind::parallel: {
      Language out{{}};
      for (const auto& child : node.children) out = shuffle(out, enumerate(child, max_length), max_length);
      return out;
    }
    case NodeKind::loop: {
      const Language body = enumerate(node.children[0], max_length);
      const Language redo = enumerate(node.children[1], max_length);
      const Language step = concatenate(redo, body, max_length);
      Language out = body;
      Language frontier = body;
      while (!frontier.empty()) {
        Language next;
        for (const auto& trace : concatenate(frontier, step, max_length)) {
          if (!out.contains(trace)) next.insert(trace);
        }
        out.insert(next.begin(), next.end());
        check_limit(out);
        frontier = std::move(next);
      }
      return out;
    }
  }
  return {};
}

class TreeParser {
 public:
  explicit TreeParser(std::string_view text) : text_(text) {}

  ProcessTree parse() {
    ProcessTree tree = node();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    tree.validate();
    return tree;
  }

 private:
  [[noreturn]] void fail(const std::string& message) const {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i < pos_ && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ParseError(message, line, column);
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) fail("unterminated quoted name");
    ++pos_;
    if (out.empty()) fail("empty activity name");
    return out;
  }

  std::string bare() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(' || c == ')' || c == ',' || c == '"' || std::isspace(static_cast<unsigned char>(c))) break;
      ++pos_;
    }
    if (pos_ == start) fail("expected a node");
    return std::string(text_.substr(start, pos_ - start));
  }

  ProcessTree node() {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '"') return ProcessTree::activity(quoted());
    std::string word = bare();
    if (!peek('(')) {
      if (word == "tau") return ProcessTree::silent();
      return ProcessTree::activity(std::move(word));
    }
    ProcessTree tree;
    if (word == "seq") {
      tree.kind = NodeKind::sequence;
    } else if (word == "xor") {
      tree.kind = NodeKind::exclusive_choice;
    } else if (word == "par") {
      tree.kind = NodeKind::parallel;
    } else if (word == "loop") {
      tree.kind = NodeKind::loop;
    } else {
      fail("unknown operator '" + word + "'");
    }
    expect('(');
    tree.children.push_back(node());
    while (peek(',')) {
      ++pos_;
      tree.children.push_back(node());
    }
    expect(')');
    return tree;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

bool needs_quotes(const std::string& name) {
  if (name == "tau" || name == "seq" || name == "xor" || name == "par" || name == "loop") return true;
  for (char c : name) {
    if (c == '(' || c == ')' || c == ',' || c == '"' || c == '\\' ||
        std::isspace(static_cast<unsigned char>(c))) {
      return true;
    }
  }
  return false;
}

void format_into(const ProcessTree& tree, std::string& out) {
  switch (tree.kind) {
    case NodeKind::silent:
      out += "tau";
      return;
    case NodeKind::activity:
      if (!needs_quotes(tree.label)) {
        out += tree.label;
        return;
      }
      out += '"';
      for (char c : tree.label) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      out += '"';
      return;
    default:
      break;
  }
  out += keyword(tree.kind);
  out += '(';
  for (std::size_t i = 0; i < tree.children.size(); ++i) {
    if (i > 0) out += ", ";
    format_into(tree.children[i], out);
  }
  out += ')';
}

}  // namespace

void ProcessTree::validate() const {
  switch (kind) {
    case NodeKind::activity:
      if (label.empty()) throw InvalidArgument("activity leaves need a label");
      [[fallthrough]];
    case NodeKind::silent:
      if (!children.empty()) throw InvalidArgument("leaves cannot have children");
      return;
    case NodeKind::loop:
      if (children.size() != 2) throw InvalidArgument("loop takes exactly (body, redo)");
      break;
    default:
      if (children.size() < 2) {
        throw InvalidArgument(std::string(keyword(kind)) + " needs at least two children");
      }
  }
  for (const auto& child : children) child.validate();
}

std::set<std::string> ProcessTree::labels() const {
  std::set<std::string> out;
  if (kind == NodeKind::activity) out.insert(label);
  for (const auto& child : children) out.merge(child.labels());
  return out;
}

std::size_t ProcessTree::node_count() const {
  std::size_t n = 1;
  for (const auto& child : children) n += child.node_count();
  return n;
}

std::string_view keyword(NodeKind kind) {
  switch (kind) {
    case NodeKind::sequence: return "seq";
    case NodeKind::exclusive_choice: return "xor";
    case NodeKind::parallel: return "par";
    case NodeKind::loop: return "loop";
    case NodeKind::activity: return "activity";
    case NodeKind::silent: return "tau";
  }
  return "unknown";
}

ProcessTree parse_tree(std::string_view text) { return TreeParser(text).parse(); }

std::string format_tree(const ProcessTree& tree) {
  std::string out;
  format_into(tree, out);
  return out;
}

std::set<std::vector<std::string>> bounded_language(const ProcessTree& tree, std::size_t max_length) {
  return enumerate(tree, max_length);
}

}  // namespace chaosmine
