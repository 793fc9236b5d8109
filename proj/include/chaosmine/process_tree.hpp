#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace chaosmine {

enum class NodeKind { sequence, exclusive_choice, parallel, loop, activity, silent };

// Block-structured process model. Operators hold their children in order; a
// loop holds exactly (body, redo) and denotes body (redo body)*.
struct ProcessTree {
  NodeKind kind = NodeKind::silent;
  std::string label;  // activity leaves only
  std::vector<ProcessTree> children;

  static ProcessTree activity(std::string name) { return {NodeKind::activity, std::move(name), {}}; }
  static ProcessTree silent() { return {NodeKind::silent, {}, {}}; }
  static ProcessTree sequence(std::vector<ProcessTree> children) {
    return {NodeKind::sequence, {}, std::move(children)};
  }
  static ProcessTree choice(std::vector<ProcessTree> children) {
    return {NodeKind::exclusive_choice, {}, std::move(children)};
  }
  static ProcessTree parallel(std::vector<ProcessTree> children) {
    return {NodeKind::parallel, {}, std::move(children)};
  }
  static ProcessTree loop(ProcessTree body, ProcessTree redo) {
    return {NodeKind::loop, {}, {std::move(body), std::move(redo)}};
  }

  bool is_leaf() const noexcept { return kind == NodeKind::activity || kind == NodeKind::silent; }

  // Throws InvalidArgument when an operator has the wrong arity or a leaf
  // carries children.
  void validate() const;

  // Activity labels occurring in the tree.
  std::set<std::string> labels() const;
  std::size_t node_count() const;

  friend bool operator==(const ProcessTree&, const ProcessTree&) = default;
};

std::string_view keyword(NodeKind kind);

// Nested prefix notation, e.g. `seq(a, xor(b, c), par(d, e), loop(f, g))`.
// `tau` is the silent leaf. Names that are keywords or contain separators are
// written in double quotes with backslash escapes.
ProcessTree parse_tree(std::string_view text);
std::string format_tree(const ProcessTree& tree);

// All traces of length <= max_length accepted by the tree, by direct
// enumeration of the operator semantics.
std::set<std::vector<std::string>> bounded_language(const ProcessTree& tree, std::size_t max_length);

}  // namespace chaosmine
