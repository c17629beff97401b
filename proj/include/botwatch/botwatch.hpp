#pragma once

#include "botwatch/acf_detector.hpp"
#include "botwatch/confidence.hpp"
#include "botwatch/errors.hpp"
#include "botwatch/features.hpp"
#include "botwatch/gaussian_nb.hpp"
#include "botwatch/ipv4.hpp"
#include "botwatch/metrics.hpp"
#include "botwatch/model.hpp"
#include "botwatch/pipeline.hpp"
#include "botwatch/policy.hpp"
#include "botwatch/preprocess.hpp"
#include "botwatch/random_forest.hpp"
#include "botwatch/report.hpp"
#include "botwatch/rng.hpp"
#include "botwatch/sessionizer.hpp"
#include "botwatch/synth.hpp"
#include "botwatch/trace.hpp"
#include "botwatch/walker.hpp"
