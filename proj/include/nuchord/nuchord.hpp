#pragma once

#include "nuchord/algebra.hpp"
#include "nuchord/axis_terms.hpp"
#include "nuchord/errors.hpp"
#include "nuchord/expr.hpp"
#include "nuchord/factorization.hpp"
#include "nuchord/index_ops.hpp"
#include "nuchord/metric.hpp"
#include "nuchord/poly.hpp"
#include "nuchord/scan.hpp"
#include "nuchord/spec_io.hpp"
#include "nuchord/stability.hpp"
#include "nuchord/stable_element.hpp"
#include "nuchord/winding.hpp"
