#pragma once

#include <vector>

#include "kaclab/entropy.hpp"
#include "kaclab/moments.hpp"

namespace kaclab {

/// Diagnostics of one output time.
template <typename Scalar>
struct TimeSeriesRecord {
    Scalar time{};
    MomentSet<Scalar> moments;
    EntropyReport<Scalar> entropy;
    Scalar l1_dist_eq{};     ///< ||f - f_eq||_1
    Scalar A_face{};         ///< face-based coefficient used by the scheme
    Scalar dt_used{};        ///< last accepted step size
    long accepted_steps = 0; ///< since the previous record
    long rejected_steps = 0; ///< since the previous record
    /// Largest H(after) - H(before) over the accepted steps since the previous record.
    Scalar max_entropy_increase{};
};

template <typename Scalar>
using TimeSeries = std::vector<TimeSeriesRecord<Scalar>>;

}  // namespace kaclab
