#pragma once

#include "rpq/approx.hpp"
#include "rpq/enumerate.hpp"
#include "rpq/eval.hpp"
#include "rpq/generators.hpp"
#include "rpq/graph.hpp"
#include "rpq/product.hpp"
#include "rpq/query.hpp"
#include "rpq/reductions.hpp"
#include "rpq/restricted.hpp"
