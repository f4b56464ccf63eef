#pragma once

#include <string_view>
#include <vector>

#include "hankelrec/common.hpp"

namespace hankelrec {

enum class SamplingMode { with_replacement, without_replacement };

std::string_view to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(std::string_view text);

/// Observed positions of a length-n signal.  Indices keep their draw order;
/// with replacement they may repeat and each repeat counts as a sample.
struct SampleSet {
    Index n = 0;
    std::vector<Index> indices;
    SamplingMode mode = SamplingMode::without_replacement;

    Index size() const { return static_cast<Index>(indices.size()); }

    /// Per-position sample count (0 for unobserved entries).
    RVec multiplicity() const;

    /// Throws ArgumentError on out-of-range or (without replacement) repeated indices.
    void validate() const;
};

} // namespace hankelrec
