#pragma once

#include "nlslab/config.hpp"
#include "nlslab/experiments.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/field.hpp"
#include "nlslab/fit.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/initial_data.hpp"
#include "nlslab/ioperator.hpp"
#include "nlslab/morawetz.hpp"
#include "nlslab/multilinear.hpp"
#include "nlslab/norms.hpp"
#include "nlslab/parallel.hpp"
#include "nlslab/report.hpp"
#include "nlslab/solver.hpp"
