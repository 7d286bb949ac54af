#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmp {

/// Shape or index violation (length mismatch, index out of range, empty input).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value outside its admissible domain (non-finite entry, non-unit atom, bad parameter).
class ValueError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A real-valued signal s of length n >= 1 with finite components.
class Signal {
public:
    explicit Signal(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    std::span<const double> values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool operator==(const Signal &) const = default;

private:
    std::vector<double> values_;
};

/// An n x m matrix of unit-norm atoms, stored column-major by atom.
///
/// Columns whose norm is within `kNormTolerance` of one are rescaled to unit
/// norm on construction; anything further off is rejected with ValueError.
class Dictionary {
public:
    static constexpr double kNormTolerance = 1e-9;

    /// `column_major` holds atom 0 first, then atom 1, and so on.
    Dictionary(std::size_t n, std::size_t m, std::vector<double> column_major);

    /// Builds from a list of columns; every column must have the same length.
    static Dictionary from_columns(const std::vector<std::vector<double>> &columns);

    std::size_t n() const { return n_; }
    std::size_t m() const { return m_; }

    std::span<const double> atom(std::size_t j) const;

    /// Number of exactly-nonzero entries of atom j.
    std::size_t atom_support(std::size_t j) const;

    std::span<const double> data() const { return data_; }

    bool operator==(const Dictionary &) const = default;

private:
    std::size_t n_;
    std::size_t m_;
    std::vector<double> data_;
};

/// Sparse coefficient vector x in R^m; only nonzero entries are stored.
class SparseSolution {
public:
    explicit SparseSolution(std::size_t m = 0) : m_(m) {}

    std::size_t dimension() const { return m_; }
    std::size_t support_size() const { return entries_.size(); }
    const std::map<std::size_t, double> &entries() const { return entries_; }

    double get(std::size_t j) const;

    /// x_j <- x_j + delta. An entry that becomes exactly zero is dropped.
    void add(std::size_t j, double delta);

    /// x_j <- value; a zero value removes the entry.
    void set(std::size_t j, double value);

    bool operator==(const SparseSolution &) const = default;

private:
    void check_index(std::size_t j) const;

    std::size_t m_;
    std::map<std::size_t, double> entries_;
};

/// Stopping condition "||x||_0 > L or ||r||_2 <= eps", plus a hard iteration cap.
struct StoppingRule {
    std::size_t max_support = 1;
    double residual_tolerance = 0.0;
    /// 0 means "use max_support".
    std::size_t max_iterations = 0;

    std::size_t iteration_cap() const { return max_iterations == 0 ? max_support : max_iterations; }
    void validate() const;

    bool operator==(const StoppingRule &) const = default;
};

double inner_product(std::span<const double> a, std::span<const double> b);

double norm_squared(std::span<const double> a);

/// ||r||^2 - z^2, the residual energy left after removing z along a unit atom.
/// Results in (-1e-12, 0) are clamped to zero.
double residual_energy_drop(double r_norm_sq, double z);

/// D x, touching only the columns in the support of x.
std::vector<double> reconstruct(const Dictionary &dict, const SparseSolution &x);

}  // namespace qmp
