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

#ifndef SALAD_TENSOR_TAPE_HPP
#define SALAD_TENSOR_TAPE_HPP

#include <cstddef>
#include <deque>
#include <functional>
#include <initializer_list>
#include <vector>

#include "salad/tensor/tensor.hpp"

namespace salad::tensor {

class Tape;

// Handle to a node on a Tape. Cheap to copy; valid while its Tape lives.
class Var {
 public:
  Var() = default;

  const Tensor& value() const;
  const Tensor& grad() const;
  bool requires_grad() const;
  bool valid() const { return tape_ != nullptr; }
  std::size_t index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

// Reverse-mode autodiff record. Nodes are appended in evaluation order, so
// every parent precedes its children; backward() walks them once in reverse.
class Tape {
 public:
  // Accumulates the gradient of node `self` into its parents.
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var leaf(Tensor value, bool requires_grad = true);
  Var constant(Tensor value) { return leaf(std::move(value), false); }

  // Appends an op result. The backward function is dropped when no parent
  // requires a gradient.
  Var record(Tensor value, std::initializer_list<Var> parents,
             BackwardFn backward);
  Var record(Tensor value, const std::vector<Var>& parents,
             BackwardFn backward);

  // Seeds d(root)/d(root) = 1 and propagates. Root must hold one element.
  // Gradients accumulate across calls until zero_grad().
  // Leaf gradients accumulate across calls; interior ones are reset.
  void backward(Var root);
  void zero_grad();

  const Tensor& value(std::size_t i) const { return nodes_[i].value; }
  const Tensor& grad(std::size_t i) const;
  bool requires_grad(std::size_t i) const { return nodes_[i].requires_grad; }
  bool has_grad(std::size_t i) const { return nodes_[i].has_grad; }
  const std::vector<std::size_t>& parents(std::size_t i) const {
    return nodes_[i].parents;
  }

  // Zero-initialized on first access.
  Tensor& grad_buffer(std::size_t i);

  std::size_t size() const { return nodes_.size(); }

  // Number of backward functions invoked by the last backward() call.
  std::size_t last_backward_visits() const { return last_visits_; }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool has_grad = false;
    bool requires_grad = false;
    std::vector<std::size_t> parents;
    BackwardFn backward;
  };

  void check_owner(Var v) const;

  std::deque<Node> nodes_;
  std::size_t last_visits_ = 0;
};

}  // namespace salad::tensor

#endif  // SALAD_TENSOR_TAPE_HPP
