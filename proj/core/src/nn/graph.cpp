#include "sentlab/nn/graph.hpp"

#include "sentlab/error.hpp"

namespace sentlab::nn {

const Tensor& Var::value() const { return graph->value(id); }

Var Graph::constant(Tensor value) {
    nodes_.push_back(Node{std::move(value), {}, {}, {}, nullptr, false});
    return {this, nodes_.size() - 1};
}

Var Graph::parameter(Parameter& p) {
    if (const auto it = bound_.find(&p); it != bound_.end()) return {this, it->second};
    nodes_.push_back(Node{p.value, {}, {}, {}, &p, true});
    bound_.emplace(&p, nodes_.size() - 1);
    return {this, nodes_.size() - 1};
}

Var Graph::record(Tensor value, std::vector<std::size_t> inputs, Backward backward) {
    bool rg = false;
    for (const auto i : inputs) rg = rg || nodes_[i].requires_grad;
    if (!rg) backward = nullptr;
    nodes_.push_back(Node{std::move(value), {}, std::move(inputs), std::move(backward), nullptr, rg});
    return {this, nodes_.size() - 1};
}

void Graph::backward(Var root) {
    if (root.graph != this) throw ShapeError("backward: variable belongs to another graph");
    if (nodes_[root.id].value.size() != 1) throw ShapeError("backward: root must be a scalar");
    for (std::size_t i = 0; i <= root.id; ++i)
        if (nodes_[i].requires_grad) nodes_[i].grad = Tensor(nodes_[i].value.shape(), 0.0);
    if (!nodes_[root.id].requires_grad) return;
    nodes_[root.id].grad[0] = 1.0;
    for (std::size_t i = root.id + 1; i-- > 0;) {
        auto& node = nodes_[i];
        if (!node.requires_grad) continue;
        if (node.backward) node.backward(*this, i);
        if (node.param) {
            auto& g = node.param->grad;
            for (std::size_t k = 0; k < g.size(); ++k) g[k] += node.grad[k];
        }
    }
}

} // namespace sentlab::nn
