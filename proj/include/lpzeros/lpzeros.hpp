#pragma once

#include "lpzeros/errors.hpp"
#include "lpzeros/quadrature.hpp"
#include "lpzeros/measure.hpp"
#include "lpzeros/polynomial.hpp"
#include "lpzeros/best_approx.hpp"
#include "lpzeros/markov.hpp"
