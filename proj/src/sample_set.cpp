#include "hankelrec/sample_set.hpp"

#include <string>

namespace hankelrec {

std::string_view to_string(SamplingMode mode) {
    return mode == SamplingMode::with_replacement ? "with" : "without";
}

SamplingMode sampling_mode_from_string(std::string_view text) {
    if (text == "with" || text == "with_replacement") {
        return SamplingMode::with_replacement;
    }
    if (text == "without" || text == "without_replacement") {
        return SamplingMode::without_replacement;
    }
    throw ArgumentError("unknown sampling mode '" + std::string(text) + "'");
}

RVec SampleSet::multiplicity() const {
    RVec mult = RVec::Zero(n);
    for (Index a : indices) {
        if (a < 0 || a >= n) {
            throw ArgumentError("sample index " + std::to_string(a) + " outside [0, " + std::to_string(n) + ")");
        }
        mult[a] += 1.0;
    }
    return mult;
}

void SampleSet::validate() const {
    const RVec mult = multiplicity();
    if (mode == SamplingMode::without_replacement && (mult.array() > 1.0).any()) {
        throw ArgumentError("repeated sample index in a without-replacement sample set");
    }
}

} // namespace hankelrec
