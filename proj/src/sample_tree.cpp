#include "qmp/sample_tree.hpp"

#include <bit>
#include <cmath>

#include "qmp/core.hpp"

namespace qmp {

SampleTree::SampleTree(std::span<const double> values) : n_(values.size()) {
    if (n_ == 0) {
        throw DimensionError("SampleTree: empty input");
    }
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw ValueError("SampleTree: non-finite entry");
        }
    }
    padded_ = std::bit_ceil(n_);
    depth_ = static_cast<std::size_t>(std::countr_zero(padded_));
    leaves_.assign(padded_, 0.0);
    std::copy(values.begin(), values.end(), leaves_.begin());
    nodes_.assign(2 * padded_ - 1, 0.0);
    for (std::size_t i = 0; i < padded_; ++i) {
        nodes_[leaf_node(i)] = leaves_[i] * leaves_[i];
    }
    node_writes_ = padded_;
    rebuild();
}

double SampleTree::value(std::size_t i) const {
    if (i >= n_) {
        throw DimensionError("SampleTree: index out of range");
    }
    return leaves_[i];
}

void SampleTree::update(std::size_t index, double new_value) {
    if (index >= n_) {
        throw DimensionError("SampleTree: index out of range");
    }
    if (!std::isfinite(new_value)) {
        throw ValueError("SampleTree: non-finite value");
    }
    leaves_[index] = new_value;
    std::size_t node = leaf_node(index);
    nodes_[node] = new_value * new_value;
    ++node_writes_;
    while (node != 0) {
        node = (node - 1) / 2;
        nodes_[node] = nodes_[2 * node + 1] + nodes_[2 * node + 2];
        ++node_writes_;
    }
}

std::size_t SampleTree::axpy_update(double coeff, std::span<const double> atom) {
    if (atom.size() != n_) {
        throw DimensionError("SampleTree::axpy_update: atom length mismatch");
    }
    if (coeff == 0.0) {
        return 0;
    }
    std::size_t updates = 0;
    for (std::size_t k = 0; k < n_; ++k) {
        if (atom[k] != 0.0) {
            update(k, leaves_[k] - coeff * atom[k]);
            ++updates;
        }
    }
    return updates;
}

std::size_t SampleTree::sample_index(double u) const {
    if (!(nodes_[0] > 0.0)) {
        throw EmptyDistributionError("SampleTree: cannot sample from a zero vector");
    }
    double target = u * nodes_[0];
    std::size_t node = 0;
    while (node < padded_ - 1) {
        std::size_t left = 2 * node + 1;
        std::size_t right = left + 1;
        if (nodes_[right] == 0.0) {
            node = left;
        } else if (nodes_[left] == 0.0 || target >= nodes_[left]) {
            target -= nodes_[left];
            node = right;
        } else {
            node = left;
        }
    }
    return node - (padded_ - 1);
}

void SampleTree::rebuild() {
    for (std::size_t node = padded_ - 1; node-- > 0;) {
        nodes_[node] = nodes_[2 * node + 1] + nodes_[2 * node + 2];
        ++node_writes_;
    }
}

}  // namespace qmp
