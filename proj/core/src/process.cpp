#include "rctc/process.hpp"

#include "rctc/term.hpp"

namespace rctc {

namespace {
const std::shared_ptr<const Node>& nil_node() {
  static const auto node = std::make_shared<const Node>(Nil{});
  return node;
}
}  // namespace

Process::Process() : node_(nil_node()) {}

bool operator==(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return true;
  return static_cast<const Node::variant&>(*a.node_) == static_cast<const Node::variant&>(*b.node_);
}

std::strong_ordering operator<=>(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  return static_cast<const Node::variant&>(*a.node_) <=> static_cast<const Node::variant&>(*b.node_);
}

namespace mk {
Process nil() { return Process(); }
Process constant(std::string name) {
  return Process(std::make_shared<const Node>(Const{std::move(name)}));
}
Process prefix(std::vector<Action> acts, Process body, std::optional<Key> key) {
  return Process(std::make_shared<const Node>(Prefix{std::move(acts), key, std::move(body)}));
}
Process prefix(Action act, Process body, std::optional<Key> key) {
  return prefix(std::vector<Action>{std::move(act)}, std::move(body), key);
}
Process suffix(Process body, std::vector<Action> acts, std::optional<Key> key) {
  return Process(std::make_shared<const Node>(Suffix{std::move(body), std::move(acts), key}));
}
Process sum(Process l, Process r) {
  return Process(std::make_shared<const Node>(Sum{std::move(l), std::move(r)}));
}
Process par(Process l, Process r) {
  return Process(std::make_shared<const Node>(Par{std::move(l), std::move(r)}));
}
Process seq(Process l, Process r) {
  return Process(std::make_shared<const Node>(Seq{std::move(l), std::move(r)}));
}
Process restrict(Process body, LabelSet labels) {
  return Process(std::make_shared<const Node>(Restrict{std::move(body), std::move(labels)}));
}
Process relabel(Process body, RelabelMap map) {
  return Process(std::make_shared<const Node>(Relabel{std::move(body), std::move(map)}));
}
}  // namespace mk

const Process& Definitions::lookup(const std::string& name) const {
  auto it = defs_.find(name);
  if (it == defs_.end()) throw UnresolvedConstant(name);
  return it->second;
}

void Definitions::define(const std::string& name, Process body) {
  max_key_ = std::max(max_key_, ::rctc::max_key(body));
  defs_[name] = std::move(body);
}

}  // namespace rctc
