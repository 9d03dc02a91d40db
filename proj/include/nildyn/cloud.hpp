#pragma once

#include "nildyn/errors.hpp"
#include "nildyn/systems/torus.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace nildyn {

struct CloudProvenance {
    std::string system;
    std::string generator;
    std::uint64_t budget = 0;
    std::uint64_t seed = 0;
};

/// Finite sample of a subset of X^m: `arity` canonical points of dimension
/// `dim` per tuple, stored contiguously.
class PointCloud {
public:
    PointCloud(std::size_t dim, std::size_t arity, CloudProvenance provenance = {})
        : dim_(dim), arity_(arity), provenance_(std::move(provenance)) {
        if (dim == 0 || arity == 0) throw std::invalid_argument("PointCloud needs positive dim and arity");
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t arity() const noexcept { return arity_; }
    std::size_t size() const noexcept { return data_.size() / (dim_ * arity_); }
    bool empty() const noexcept { return data_.empty(); }
    const CloudProvenance& provenance() const noexcept { return provenance_; }
    CloudProvenance& provenance() noexcept { return provenance_; }

    void reserve(std::size_t tuples) { data_.reserve(tuples * dim_ * arity_); }

    void add(std::span<const Point> tuple) {
        if (tuple.size() != arity_) throw DimensionMismatch("PointCloud::add: tuple arity mismatch");
        for (const auto& p : tuple) {
            if (p.size() != dim_) throw DimensionMismatch("PointCloud::add: point dimension mismatch");
            data_.insert(data_.end(), p.begin(), p.end());
        }
    }
    void add(const Point& single) { add(std::span<const Point>(&single, 1)); }

    /// All coordinates of tuple i (arity * dim values).
    std::span<const double> tuple(std::size_t i) const {
        return {data_.data() + i * dim_ * arity_, dim_ * arity_};
    }
    /// Point j of tuple i.
    Point component(std::size_t i, std::size_t j) const {
        auto t = tuple(i);
        return Point(t.begin() + static_cast<std::ptrdiff_t>(j * dim_),
                     t.begin() + static_cast<std::ptrdiff_t>((j + 1) * dim_));
    }

    const std::vector<double>& raw() const noexcept { return data_; }

private:
    std::size_t dim_;
    std::size_t arity_;
    std::vector<double> data_;
    CloudProvenance provenance_;
};

} // namespace nildyn
