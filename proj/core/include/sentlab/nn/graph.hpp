#pragma once

#include "sentlab/nn/tensor.hpp"

#include <functional>
#include <unordered_map>
#include <vector>

namespace sentlab::nn {

class Graph;

/// Handle to a node recorded on a Graph.
struct Var {
    Graph* graph = nullptr;
    std::size_t id = 0;

    const Tensor& value() const;
    std::size_t rows() const { return value().rows(); }
    std::size_t cols() const { return value().cols(); }
};

/// Tape of primitive ops for one forward pass. Nodes are appended in
/// evaluation order, so the reverse sweep is a plain backwards loop that
/// visits each recorded op once.
class Graph {
public:
    /// Accumulates the op's output gradient into the gradients of its inputs.
    using Backward = std::function<void(Graph&, std::size_t self)>;

    Graph() = default;
    Graph(const Graph&) = delete;
    Graph& operator=(const Graph&) = delete;

    Var constant(Tensor value);
    /// Leaf bound to a Parameter; binding the same Parameter twice returns
    /// the same node. The Parameter must outlive the graph.
    Var parameter(Parameter& p);

    /// Appends an op. The node requires grad iff any input does; `backward`
    /// is dropped otherwise.
    Var record(Tensor value, std::vector<std::size_t> inputs, Backward backward);

    const Tensor& value(std::size_t id) const { return nodes_[id].value; }
    Tensor& grad(std::size_t id) { return nodes_[id].grad; }
    bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
    std::size_t size() const { return nodes_.size(); }

    /// Seeds d(root)/d(root) = 1 (root must hold one element), sweeps the
    /// tape in reverse and adds the results into each bound Parameter::grad.
    void backward(Var root);

private:
    struct Node {
        Tensor value;
        Tensor grad;
        std::vector<std::size_t> inputs;
        Backward backward;
        Parameter* param = nullptr;
        bool requires_grad = false;
    };

    std::vector<Node> nodes_;
    std::unordered_map<const Parameter*, std::size_t> bound_;
};

} // namespace sentlab::nn
