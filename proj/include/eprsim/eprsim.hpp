#pragma once

#include "eprsim/analysis.hpp"
#include "eprsim/config.hpp"
#include "eprsim/errors.hpp"
#include "eprsim/fft.hpp"
#include "eprsim/filters.hpp"
#include "eprsim/fit.hpp"
#include "eprsim/frames.hpp"
#include "eprsim/gaussian.hpp"
#include "eprsim/lock.hpp"
#include "eprsim/pipeline.hpp"
#include "eprsim/predict.hpp"
#include "eprsim/report.hpp"
#include "eprsim/rng.hpp"
#include "eprsim/spectral.hpp"
#include "eprsim/synth.hpp"
