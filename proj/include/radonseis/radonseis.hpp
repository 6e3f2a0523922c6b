#pragma once

#include "radonseis/chart.hpp"
#include "radonseis/errors.hpp"
#include "radonseis/grid.hpp"
#include "radonseis/inversion.hpp"
#include "radonseis/io.hpp"
#include "radonseis/kahan.hpp"
#include "radonseis/parallel.hpp"
#include "radonseis/phantom.hpp"
#include "radonseis/pipeline.hpp"
#include "radonseis/quadrature.hpp"
#include "radonseis/seismic.hpp"
#include "radonseis/standard_radon.hpp"
#include "radonseis/types.hpp"
