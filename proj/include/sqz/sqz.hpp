#pragma once

#include "sqz/cavity.hpp"
#include "sqz/config.hpp"
#include "sqz/csv.hpp"
#include "sqz/errors.hpp"
#include "sqz/estimation.hpp"
#include "sqz/grid.hpp"
#include "sqz/loss_budget.hpp"
#include "sqz/quadrature.hpp"
#include "sqz/sweep.hpp"
