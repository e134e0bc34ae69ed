#pragma once

// Everything in one include.

#include "symspace/error.hpp"
#include "symspace/grid.hpp"
#include "symspace/json_io.hpp"
#include "symspace/operators.hpp"
#include "symspace/product.hpp"
#include "symspace/quasi_concave.hpp"
#include "symspace/spaces.hpp"
#include "symspace/verify.hpp"
#include "symspace/young.hpp"
