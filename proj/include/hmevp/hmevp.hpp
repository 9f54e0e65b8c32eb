#pragma once

#include "hmevp/config.hpp"
#include "hmevp/diagnostics.hpp"
#include "hmevp/errors.hpp"
#include "hmevp/filter.hpp"
#include "hmevp/grid.hpp"
#include "hmevp/hermite.hpp"
#include "hmevp/hme_solver.hpp"
#include "hmevp/io.hpp"
#include "hmevp/moment_state.hpp"
#include "hmevp/multi_index.hpp"
#include "hmevp/poisson.hpp"
#include "hmevp/reference_kinetics.hpp"
#include "hmevp/run_record.hpp"
#include "hmevp/simulation.hpp"
