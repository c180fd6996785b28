#pragma once

#include "dataspace/patch.hpp"

#include <span>

namespace dataspace::oracle {

// From-scratch recomputations used to check the network's incremental
// bookkeeping. They deliberately avoid interests_of/visible/support.

/// Counts, for every assertion, the actors asserting it.
assertion_bag aggregate_from_scratch(std::span<const assertion_set> asserted);

/// What an actor asserting `own` should currently see, given the assertion
/// sets of every actor in the network.
assertion_set visible_from_scratch(std::span<const assertion_set> asserted,
                                   const assertion_set& own);

} // namespace dataspace::oracle
