#pragma once

#include "baselines.hpp"
#include "config.hpp"
#include "count_matrix.hpp"
#include "error.hpp"
#include "ghs.hpp"
#include "io.hpp"
#include "kernel.hpp"
#include "metrics.hpp"
#include "mixture.hpp"
#include "pipeline.hpp"
#include "polya_gamma.hpp"
#include "random.hpp"
#include "simulate.hpp"
#include "tree.hpp"
