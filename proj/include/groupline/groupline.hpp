#pragma once

// Everything except the HTTP layer (groupline/service.hpp pulls in cpp-httplib).

#include "groupline/audit.hpp"
#include "groupline/corpus.hpp"
#include "groupline/date.hpp"
#include "groupline/error.hpp"
#include "groupline/evaluation.hpp"
#include "groupline/hlgd.hpp"
#include "groupline/language_model.hpp"
#include "groupline/levenshtein.hpp"
#include "groupline/merge.hpp"
#include "groupline/metrics.hpp"
#include "groupline/pairs.hpp"
#include "groupline/partition.hpp"
#include "groupline/presets.hpp"
#include "groupline/scorer.hpp"
#include "groupline/session.hpp"
#include "groupline/time_logistic.hpp"
