#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "ibrt/probability.hpp"

namespace ibrt {

inline constexpr double kDefaultDelta1 = 1e-2;
inline constexpr double kDefaultDelta2 = 1e-2;

struct ReductionReport {
    DecoderRoot root;
    std::vector<std::size_t> removed;                          ///< input indices of deleted clusters
    std::vector<std::pair<std::size_t, std::size_t>> merged;   ///< (survivor, absorbed), input indices
    bool changed = false;
};

/// Deletes clusters with mass below delta1, renormalizes, then merges pairs
/// whose decoders differ by less than delta2 in L-infinity. The lower index
/// survives and keeps its decoder; masses add. Throws EmptyRoot if nothing survives.
ReductionReport reduce_root(const DecoderRoot& root, double delta1 = kDefaultDelta1,
                            double delta2 = kDefaultDelta2);

std::size_t effective_cardinality(const DecoderRoot& root, double delta1 = kDefaultDelta1,
                                  double delta2 = kDefaultDelta2);

}  // namespace ibrt
