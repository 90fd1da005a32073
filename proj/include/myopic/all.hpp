#pragma once

// Umbrella header.

#include "document.hpp"
#include "error.hpp"
#include "expression.hpp"
#include "lp.hpp"
#include "matrix_tools.hpp"
#include "myopic.hpp"
#include "neyman.hpp"
#include "payoff.hpp"
#include "report.hpp"
#include "simplex.hpp"
#include "structure.hpp"
#include "tree.hpp"
