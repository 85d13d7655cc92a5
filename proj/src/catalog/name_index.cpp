#include "tips/name_index.hpp"

namespace tips {

std::string case_fold(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool starts_with_folded(std::string_view text, std::string_view prefix) {
  return case_fold(text).starts_with(case_fold(prefix));
}

NameIndex::NameIndex() : root_(std::make_unique<Node>()) {}

NameIndex::NameIndex(const NameIndex& other) : root_(clone(*other.root_)), size_(other.size_) {}

NameIndex& NameIndex::operator=(const NameIndex& other) {
  if (this != &other) {
    root_ = clone(*other.root_);
    size_ = other.size_;
  }
  return *this;
}

std::unique_ptr<NameIndex::Node> NameIndex::clone(const Node& n) {
  auto copy = std::make_unique<Node>();
  copy->display = n.display;
  for (const auto& [c, child] : n.children) copy->children.emplace(c, clone(*child));
  return copy;
}

bool NameIndex::insert(std::string_view name) {
  if (name.empty()) return false;
  Node* node = root_.get();
  for (char c : case_fold(name)) {
    auto& slot = node->children[static_cast<unsigned char>(c)];
    if (!slot) slot = std::make_unique<Node>();
    node = slot.get();
  }
  if (!node->display.empty()) return false;
  node->display = std::string(name);
  ++size_;
  return true;
}

const NameIndex::Node* NameIndex::descend(std::string_view folded) const {
  const Node* node = root_.get();
  for (char c : folded) {
    auto it = node->children.find(static_cast<unsigned char>(c));
    if (it == node->children.end()) return nullptr;
    node = it->second.get();
  }
  return node;
}

void NameIndex::collect(const Node& n, std::vector<std::string>& out) {
  // A terminal sorts before its extensions, matching byte order of the folded keys.
  if (!n.display.empty()) out.push_back(n.display);
  for (const auto& [c, child] : n.children) collect(*child, out);
}

std::vector<std::string> NameIndex::complete(std::string_view prefix) const {
  std::vector<std::string> out;
  if (const Node* node = descend(case_fold(prefix))) collect(*node, out);
  return out;
}

const std::string* NameIndex::find_exact(std::string_view name) const {
  const Node* node = descend(case_fold(name));
  if (node == nullptr || node->display.empty()) return nullptr;
  return &node->display;
}

}  // namespace tips
