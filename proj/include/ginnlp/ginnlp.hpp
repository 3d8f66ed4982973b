#pragma once

#include "ginnlp/baseline.hpp"
#include "ginnlp/dataset.hpp"
#include "ginnlp/differentiation.hpp"
#include "ginnlp/errors.hpp"
#include "ginnlp/matrix.hpp"
#include "ginnlp/metrics.hpp"
#include "ginnlp/model.hpp"
#include "ginnlp/rng.hpp"
#include "ginnlp/runner.hpp"
#include "ginnlp/symbolic.hpp"
#include "ginnlp/training.hpp"
