#pragma once

#include "robust_t/errors.hpp"
#include "robust_t/normal_dist.hpp"
#include "robust_t/robust_estimators.hpp"
#include "robust_t/statistics.hpp"
#include "robust_t/sampling.hpp"
#include "robust_t/montecarlo.hpp"
#include "robust_t/inference.hpp"
#include "robust_t/io.hpp"
