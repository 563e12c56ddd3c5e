#pragma once

#include "degwalk/alias.hpp"
#include "degwalk/bench.hpp"
#include "degwalk/embedding.hpp"
#include "degwalk/error.hpp"
#include "degwalk/evaluation.hpp"
#include "degwalk/graph.hpp"
#include "degwalk/kmeans.hpp"
#include "degwalk/logistic.hpp"
#include "degwalk/matrix.hpp"
#include "degwalk/mds.hpp"
#include "degwalk/report.hpp"
#include "degwalk/rng.hpp"
#include "degwalk/scale_free.hpp"
#include "degwalk/similarity.hpp"
#include "degwalk/walk.hpp"
