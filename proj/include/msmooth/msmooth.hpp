#pragma once

#include "msmooth/filters.hpp"
#include "msmooth/image.hpp"
#include "msmooth/loss.hpp"
#include "msmooth/metrics.hpp"
#include "msmooth/oracles.hpp"
#include "msmooth/parallel.hpp"
#include "msmooth/smoother.hpp"
