#ifndef MSSC_MSSC_HPP
#define MSSC_MSSC_HPP

#include "mssc/branch_and_bound.hpp"
#include "mssc/clustering.hpp"
#include "mssc/constraints.hpp"
#include "mssc/dataset.hpp"
#include "mssc/experiment.hpp"
#include "mssc/kmeans.hpp"
#include "mssc/metrics.hpp"
#include "mssc/rng.hpp"
#include "mssc/sdp.hpp"

#endif  // MSSC_MSSC_HPP
