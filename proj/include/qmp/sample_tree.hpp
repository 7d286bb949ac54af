#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace qmp {

/// Raised when sampling from a tree whose root (squared norm) is zero.
class EmptyDistributionError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Binary tree over a real vector r where every node stores the sum of
/// squares of the leaves below it and the leaves also keep the signed r_i.
///
/// The leaf count is padded to a power of two with zero leaves. Nodes live in
/// heap order: node 0 is the root, node i has children 2i+1 and 2i+2, and leaf
/// i sits at node (padded - 1 + i). A point update rewrites exactly
/// ceil(log2 n) + 1 nodes; the root is ||r||^2.
class SampleTree {
public:
    /// Bottom-up build: one write per node, O(n) total.
    explicit SampleTree(std::span<const double> values);

    std::size_t size() const { return n_; }
    std::size_t padded_size() const { return padded_; }
    std::size_t depth() const { return depth_; }

    double norm_squared() const { return nodes_[0]; }
    double value(std::size_t i) const;
    std::span<const double> values() const { return {leaves_.data(), n_}; }

    /// Sum of squares stored at heap node `node`.
    double node_sum(std::size_t node) const { return nodes_.at(node); }
    std::span<const double> node_sums() const { return nodes_; }

    void update(std::size_t index, double new_value);

    /// leaf_k <- leaf_k - coeff * atom_k for every nonzero atom_k.
    /// Returns the number of leaf updates performed.
    std::size_t axpy_update(double coeff, std::span<const double> atom);

    /// Index i with probability r_i^2 / ||r||^2.
    ///
    /// Uses a single uniform draw u in [0,1): the target mass u * root is
    /// located by descending the tree, subtracting the left subtree's mass
    /// whenever the walk turns right. Zero-mass subtrees are never entered.
    std::size_t sample_index(double u) const;

    template <class URBG>
    std::size_t sample_index(URBG &rng) const {
        return sample_index(std::generate_canonical<double, 64>(rng));
    }

    /// Recomputes every internal node from the leaves.
    void rebuild();

    /// Total node writes since construction (instrumentation).
    std::uint64_t node_writes() const { return node_writes_; }

private:
    std::size_t leaf_node(std::size_t i) const { return padded_ - 1 + i; }

    std::size_t n_;
    std::size_t padded_;
    std::size_t depth_;
    std::vector<double> leaves_;
    std::vector<double> nodes_;
    std::uint64_t node_writes_ = 0;
};

}  // namespace qmp
