#pragma once

#include "bench.hpp"
#include "errors.hpp"
#include "fdft.hpp"
#include "numcore.hpp"
#include "rng.hpp"
#include "sampling.hpp"
#include "simulate.hpp"
#include "spectral.hpp"
