#pragma once

// Uniform cell-centred velocity grid on [-v_max, v_max], distribution states
// living on it, and the midpoint quadrature shared by every diagnostic.

#include <Eigen/Core>

#include <cmath>
#include <concepts>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>

#include "kaclab/errors.hpp"

namespace kaclab {

template <typename Scalar>
using ArrayX = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

template <typename Scalar>
class VelocityGrid {
public:
    using Array = ArrayX<Scalar>;

    VelocityGrid(Scalar v_max, Index n_cells)
    {
        if (!(v_max > Scalar(0)) || !std::isfinite(static_cast<double>(v_max)))
            throw ValidationError("v_max: must be a finite positive number, got " +
                                  std::to_string(static_cast<double>(v_max)));
        if (n_cells < 4)
            throw ValidationError("n_cells: must be at least 4, got " + std::to_string(n_cells));

        auto data = std::make_shared<Data>();
        data->v_max = v_max;
        data->dv = Scalar(2) * v_max / Scalar(n_cells);
        const Scalar half = data->dv / Scalar(2);
        // Integer multiples of dv/2 keep centers and faces exactly antisymmetric.
        data->centers.resize(n_cells);
        for (Index i = 0; i < n_cells; ++i)
            data->centers[i] = Scalar(2 * i + 1 - n_cells) * half;
        data->faces.resize(n_cells - 1);
        for (Index k = 0; k < n_cells - 1; ++k)
            data->faces[k] = Scalar(2 * (k + 1) - n_cells) * half;
        data_ = std::move(data);
    }

    Scalar v_max() const { return data_->v_max; }
    Index size() const { return data_->centers.size(); }
    Scalar dv() const { return data_->dv; }

    /// Cell centers v_i, i = 0..n-1.
    const Array& centers() const { return data_->centers; }
    /// Interior faces v_{i+1/2}, i = 0..n-2 (the two boundary faces carry no flux).
    const Array& faces() const { return data_->faces; }

    friend bool operator==(const VelocityGrid& a, const VelocityGrid& b)
    {
        return a.data_ == b.data_ ||
               (a.v_max() == b.v_max() && a.size() == b.size());
    }

private:
    struct Data {
        Scalar v_max{};
        Scalar dv{};
        Array centers;
        Array faces;
    };
    std::shared_ptr<const Data> data_;
};

template <typename Scalar>
VelocityGrid<Scalar> make_uniform_grid(Scalar v_max, Index n_cells)
{
    return VelocityGrid<Scalar>(v_max, n_cells);
}

/// Cell values of f on a grid plus the simulation time. Values are validated
/// to be finite and nonnegative on construction.
template <typename Scalar>
class DistributionState {
public:
    using Array = ArrayX<Scalar>;

    DistributionState(VelocityGrid<Scalar> grid, Array values, Scalar time = Scalar(0))
        : grid_(std::move(grid)), values_(std::move(values)), time_(time)
    {
        if (values_.size() != grid_.size())
            throw ValidationError("values: expected " + std::to_string(grid_.size()) +
                                  " cells, got " + std::to_string(values_.size()));
        if (!(time_ >= Scalar(0)))
            throw ValidationError("time: must be nonnegative");
        for (Index i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(static_cast<double>(values_[i])))
                throw NumericalError("values: non-finite value at cell " + std::to_string(i));
            if (values_[i] < Scalar(0))
                throw ValidationError("values: negative value at cell " + std::to_string(i));
        }
    }

    static DistributionState zeros(const VelocityGrid<Scalar>& grid)
    {
        return DistributionState(grid, Array::Zero(grid.size()));
    }

    const VelocityGrid<Scalar>& grid() const { return grid_; }
    const Array& values() const { return values_; }
    Scalar operator[](Index i) const { return values_[i]; }
    Index size() const { return values_.size(); }
    Scalar time() const { return time_; }

    DistributionState with_time(Scalar t) const { return DistributionState(grid_, values_, t); }

private:
    VelocityGrid<Scalar> grid_;
    Array values_;
    Scalar time_;
};

/// Midpoint rule sum_i w_i f_i dv with per-cell weights.
template <typename Scalar, typename Derived>
Scalar integrate(const DistributionState<Scalar>& state, const Eigen::ArrayBase<Derived>& weight)
{
    if (weight.size() != state.size())
        throw ValidationError("weight: size does not match the grid");
    return (weight * state.values()).sum() * state.grid().dv();
}

/// Midpoint rule sum_i w(v_i) f_i dv with a weight function of velocity.
template <typename Scalar, typename Weight>
    requires(std::invocable<Weight, Scalar> &&
             !std::is_base_of_v<Eigen::EigenBase<std::decay_t<Weight>>, std::decay_t<Weight>>)
Scalar integrate(const DistributionState<Scalar>& state, Weight&& weight)
{
    const auto& v = state.grid().centers();
    Scalar sum(0);
    for (Index i = 0; i < state.size(); ++i)
        sum += weight(v[i]) * state[i];
    return sum * state.grid().dv();
}

/// Constant-1 weight.
template <typename Scalar>
Scalar integrate(const DistributionState<Scalar>& state)
{
    return state.values().sum() * state.grid().dv();
}

}  // namespace kaclab
