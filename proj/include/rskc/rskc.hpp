#ifndef RSKC_RSKC_HPP
#define RSKC_RSKC_HPP

/**
 * @file rskc.hpp
 * @brief Umbrella header for the robust sparse K-means library.
 */

#include "cluster.hpp"
#include "data_matrix.hpp"
#include "errors.hpp"
#include "metrics.hpp"
#include "model_selection.hpp"
#include "partition.hpp"
#include "random.hpp"
#include "simulation.hpp"
#include "stats.hpp"
#include "weights.hpp"

#endif
