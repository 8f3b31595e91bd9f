/*
 Copyright 2026 The salad Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include "salad/tensor/tape.hpp"

#include <algorithm>

#include "salad/errors.hpp"

namespace salad::tensor {

const Tensor& Var::value() const { return tape_->value(index_); }
const Tensor& Var::grad() const { return tape_->grad(index_); }
bool Var::requires_grad() const { return tape_->requires_grad(index_); }

Var Tape::leaf(Tensor value, bool requires_grad) {
  Node node;
  node.value = std::move(value);
  node.requires_grad = requires_grad;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(Tensor value, std::initializer_list<Var> parents,
                 BackwardFn backward) {
  return record(std::move(value), std::vector<Var>(parents),
                std::move(backward));
}

Var Tape::record(Tensor value, const std::vector<Var>& parents,
                 BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  node.parents.reserve(parents.size());
  for (Var p : parents) {
    check_owner(p);
    node.parents.push_back(p.index());
    node.requires_grad = node.requires_grad || requires_grad(p.index());
  }
  if (node.requires_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::grad(std::size_t i) const {
  // Lazily materialized zeros keep grad() total over every node.
  auto& node = const_cast<Node&>(nodes_[i]);
  if (!node.has_grad) {
    node.grad = Tensor::zeros(node.value.shape());
    node.has_grad = true;
  }
  return node.grad;
}

Tensor& Tape::grad_buffer(std::size_t i) {
  Node& node = nodes_[i];
  if (!node.has_grad) {
    node.grad = Tensor::zeros(node.value.shape());
    node.has_grad = true;
  }
  return node.grad;
}

void Tape::backward(Var root) {
  check_owner(root);
  if (root.value().size() != 1) {
    throw DimensionError("backward() root must be a scalar, got shape " +
                         shape_string(root.value().shape()));
  }
  for (std::size_t i = 0; i <= root.index(); ++i) {
    Node& node = nodes_[i];
    if (node.backward) {
      node.grad = Tensor();
      node.has_grad = false;
    }
  }
  grad_buffer(root.index())[0] += 1.0;
  last_visits_ = 0;
  for (std::size_t i = root.index() + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.requires_grad || !node.has_grad || !node.backward) continue;
    node.backward(*this, i);
    ++last_visits_;
  }
}

void Tape::zero_grad() {
  for (Node& node : nodes_) {
    node.grad = Tensor();
    node.has_grad = false;
  }
}

void Tape::check_owner(Var v) const {
  if (v.tape() != this || v.index() >= nodes_.size()) {
    throw Error("variable does not belong to this tape");
  }
}

}  // namespace salad::tensor
