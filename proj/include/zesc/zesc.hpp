#ifndef ZESC_ZESC_HPP
#define ZESC_ZESC_HPP

// Everything except io.hpp, which pulls in nlohmann/json.

#include "zesc/binning.hpp"
#include "zesc/bits.hpp"
#include "zesc/errors.hpp"
#include "zesc/graphs.hpp"
#include "zesc/protocols.hpp"
#include "zesc/rational.hpp"
#include "zesc/reduction.hpp"
#include "zesc/regions.hpp"
#include "zesc/sequences.hpp"
#include "zesc/source_model.hpp"
#include "zesc/typicality.hpp"
#include "zesc/verification.hpp"

#endif  // ZESC_ZESC_HPP
