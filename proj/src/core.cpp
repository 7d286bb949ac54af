#include "qmp/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace qmp {

namespace {

void require_finite(std::span<const double> values, const char *what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            std::ostringstream msg;
            msg << what << ": non-finite entry at index " << i;
            throw ValueError(msg.str());
        }
    }
}

}  // namespace

Signal::Signal(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) {
        throw DimensionError("Signal: length must be at least 1");
    }
    require_finite(values_, "Signal");
}

Dictionary::Dictionary(std::size_t n, std::size_t m, std::vector<double> column_major)
    : n_(n), m_(m), data_(std::move(column_major)) {
    if (n_ == 0 || m_ == 0) {
        throw DimensionError("Dictionary: n and m must be at least 1");
    }
    if (data_.size() != n_ * m_) {
        throw DimensionError("Dictionary: expected n*m entries");
    }
    require_finite(data_, "Dictionary");
    for (std::size_t j = 0; j < m_; ++j) {
        std::span<double> col(data_.data() + j * n_, n_);
        double norm = std::sqrt(norm_squared(col));
        if (std::abs(norm - 1.0) > kNormTolerance) {
            std::ostringstream msg;
            msg << "Dictionary: atom " << j << " has norm " << norm << ", expected 1";
            throw ValueError(msg.str());
        }
        // a few ulps off is left alone so stored dictionaries reload bit for bit
        if (std::abs(norm - 1.0) > 8 * std::numeric_limits<double>::epsilon()) {
            for (double &v : col) {
                v /= norm;
            }
        }
    }
}

Dictionary Dictionary::from_columns(const std::vector<std::vector<double>> &columns) {
    if (columns.empty()) {
        throw DimensionError("Dictionary: no columns");
    }
    std::size_t n = columns.front().size();
    std::vector<double> data;
    data.reserve(n * columns.size());
    for (const auto &col : columns) {
        if (col.size() != n) {
            throw DimensionError("Dictionary: ragged columns");
        }
        data.insert(data.end(), col.begin(), col.end());
    }
    return Dictionary(n, columns.size(), std::move(data));
}

std::span<const double> Dictionary::atom(std::size_t j) const {
    if (j >= m_) {
        throw DimensionError("Dictionary: atom index out of range");
    }
    return {data_.data() + j * n_, n_};
}

std::size_t Dictionary::atom_support(std::size_t j) const {
    std::size_t count = 0;
    for (double v : atom(j)) {
        count += v != 0.0;
    }
    return count;
}

double SparseSolution::get(std::size_t j) const {
    check_index(j);
    auto it = entries_.find(j);
    return it == entries_.end() ? 0.0 : it->second;
}

void SparseSolution::add(std::size_t j, double delta) {
    check_index(j);
    if (delta == 0.0) {
        return;
    }
    auto [it, inserted] = entries_.try_emplace(j, 0.0);
    it->second += delta;
    if (it->second == 0.0) {
        entries_.erase(it);
    }
}

void SparseSolution::set(std::size_t j, double value) {
    check_index(j);
    if (value == 0.0) {
        entries_.erase(j);
    } else {
        entries_[j] = value;
    }
}

void SparseSolution::check_index(std::size_t j) const {
    if (j >= m_) {
        throw DimensionError("SparseSolution: index out of range");
    }
}

void StoppingRule::validate() const {
    if (max_support < 1) {
        throw ValueError("StoppingRule: max_support must be >= 1");
    }
    if (!(residual_tolerance >= 0.0)) {
        throw ValueError("StoppingRule: residual_tolerance must be >= 0");
    }
}

double inner_product(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionError("inner_product: length mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double norm_squared(std::span<const double> a) {
    double sum = 0.0;
    for (double v : a) {
        sum += v * v;
    }
    return sum;
}

double residual_energy_drop(double r_norm_sq, double z) {
    double result = r_norm_sq - z * z;
    if (result < 0.0 && result > -1e-12) {
        return 0.0;
    }
    return result;
}

std::vector<double> reconstruct(const Dictionary &dict, const SparseSolution &x) {
    if (x.dimension() != dict.m()) {
        throw DimensionError("reconstruct: solution dimension does not match atom count");
    }
    std::vector<double> out(dict.n(), 0.0);
    for (const auto &[j, coeff] : x.entries()) {
        auto col = dict.atom(j);
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] += coeff * col[i];
        }
    }
    return out;
}

}  // namespace qmp
