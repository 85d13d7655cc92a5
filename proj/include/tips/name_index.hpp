#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace tips {

// ASCII simple case folding; bytes outside A-Z pass through unchanged.
std::string case_fold(std::string_view s);
bool starts_with_folded(std::string_view text, std::string_view prefix);

/// Case-insensitive prefix trie over display names.
///
/// Keys are stored case-folded; each terminal node keeps the original
/// spelling. Children are kept in byte order so a depth-first walk yields
/// names sorted by their folded form.
class NameIndex {
 public:
  NameIndex();
  NameIndex(const NameIndex& other);
  NameIndex& operator=(const NameIndex& other);
  NameIndex(NameIndex&&) noexcept = default;
  NameIndex& operator=(NameIndex&&) noexcept = default;
  ~NameIndex() = default;

  // Returns false when a name with the same folded form is already present.
  bool insert(std::string_view name);

  std::vector<std::string> complete(std::string_view prefix) const;

  // The original spelling whose folded form equals fold(name), if any.
  const std::string* find_exact(std::string_view name) const;

  std::size_t size() const { return size_; }

 private:
  struct Node {
    std::map<unsigned char, std::unique_ptr<Node>> children;
    std::string display;  // nonempty iff a name ends here
  };

  static std::unique_ptr<Node> clone(const Node& n);
  const Node* descend(std::string_view folded) const;
  static void collect(const Node& n, std::vector<std::string>& out);

  std::unique_ptr<Node> root_;
  std::size_t size_ = 0;
};

}  // namespace tips
