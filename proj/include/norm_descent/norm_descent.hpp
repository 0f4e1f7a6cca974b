#pragma once

#include "norm_descent/errors.hpp"
#include "norm_descent/linalg.hpp"
#include "norm_descent/matrix_io.hpp"
#include "norm_descent/norms.hpp"
#include "norm_descent/hessian_analysis.hpp"
#include "norm_descent/problems.hpp"
#include "norm_descent/optimizers.hpp"
#include "norm_descent/config.hpp"
#include "norm_descent/experiments.hpp"
