#pragma once

#include "pessimlab/common.hpp"
#include "pessimlab/reward.hpp"
#include "pessimlab/env.hpp"
#include "pessimlab/exact.hpp"
#include "pessimlab/data.hpp"
#include "pessimlab/algorithms.hpp"
#include "pessimlab/oracles.hpp"
#include "pessimlab/instances.hpp"
#include "pessimlab/serialize.hpp"
#include "pessimlab/harness.hpp"
#include "pessimlab/svg.hpp"
#include "pessimlab/verify.hpp"
