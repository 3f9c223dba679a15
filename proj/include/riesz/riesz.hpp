#pragma once

#include "riesz/error.hpp"
#include "riesz/log_scaled.hpp"
#include "riesz/geometry.hpp"
#include "riesz/quadrature.hpp"
#include "riesz/hermite.hpp"
#include "riesz/kernels.hpp"
#include "riesz/regions.hpp"
#include "riesz/spectral.hpp"
#include "riesz/apply.hpp"
#include "riesz/parallel.hpp"
#include "riesz/weaktype/measure.hpp"
#include "riesz/weaktype/level_set.hpp"
#include "riesz/weaktype/slope.hpp"
#include "riesz/weaktype/lemma_kernels.hpp"
#include "riesz/weaktype/bound_sweep.hpp"
#include "riesz/weaktype/probe.hpp"
#include "riesz/weaktype/counterexample.hpp"
#include "riesz/verify.hpp"
#include "riesz/io.hpp"
