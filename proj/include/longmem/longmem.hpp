// Umbrella include for the longmem library.

#pragma once

#include "longmem/asymptotics.hpp"
#include "longmem/css.hpp"
#include "longmem/fft.hpp"
#include "longmem/io.hpp"
#include "longmem/model.hpp"
#include "longmem/montecarlo.hpp"
#include "longmem/optimizer.hpp"
#include "longmem/parallel.hpp"
#include "longmem/quadrature.hpp"
#include "longmem/rng.hpp"
#include "longmem/series.hpp"
#include "longmem/simulation.hpp"
#include "longmem/spectrum.hpp"
#include "longmem/stats.hpp"
#include "longmem/timeseries.hpp"
#include "longmem/whittle.hpp"
