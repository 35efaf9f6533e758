#pragma once

#include "reconstruct/baselines.hpp"
#include "reconstruct/dataset.hpp"
#include "reconstruct/designs.hpp"
#include "reconstruct/error.hpp"
#include "reconstruct/estimators.hpp"
#include "reconstruct/experiments.hpp"
#include "reconstruct/interpolators.hpp"
#include "reconstruct/kernels.hpp"
#include "reconstruct/knot_set.hpp"
#include "reconstruct/numerics.hpp"
#include "reconstruct/random.hpp"
#include "reconstruct/serialization.hpp"
#include "reconstruct/test_functions.hpp"
