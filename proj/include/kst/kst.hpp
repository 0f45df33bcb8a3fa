#pragma once

#include "kst/banded_lu.hpp"
#include "kst/bvp.hpp"
#include "kst/combinatorics.hpp"
#include "kst/inner.hpp"
#include "kst/io.hpp"
#include "kst/poisson.hpp"
#include "kst/real.hpp"
#include "kst/taylor.hpp"
#include "kst/variational.hpp"
