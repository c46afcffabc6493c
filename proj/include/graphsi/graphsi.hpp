#ifndef GRAPHSI_GRAPHSI_HPP
#define GRAPHSI_GRAPHSI_HPP

#include "graphsi/baselines.hpp"
#include "graphsi/bounds.hpp"
#include "graphsi/coalition.hpp"
#include "graphsi/complexity.hpp"
#include "graphsi/conversion.hpp"
#include "graphsi/errors.hpp"
#include "graphsi/game.hpp"
#include "graphsi/generate.hpp"
#include "graphsi/gnn.hpp"
#include "graphsi/graph.hpp"
#include "graphsi/interaction_values.hpp"
#include "graphsi/io.hpp"
#include "graphsi/matrix.hpp"
#include "graphsi/moebius.hpp"
#include "graphsi/parallel.hpp"
#include "graphsi/random.hpp"

#endif  // GRAPHSI_GRAPHSI_HPP
