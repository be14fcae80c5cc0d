#pragma once

#include "bench.hpp"
#include "cost_vector.hpp"
#include "graph.hpp"
#include "graph_io.hpp"
#include "mda.hpp"
#include "metrics.hpp"
#include "pareto.hpp"
#include "plot.hpp"
#include "qrmo.hpp"
#include "rng.hpp"
