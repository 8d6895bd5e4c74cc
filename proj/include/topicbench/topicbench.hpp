#pragma once

#include "topicbench/config.hpp"
#include "topicbench/corpus.hpp"
#include "topicbench/density.hpp"
#include "topicbench/embedding.hpp"
#include "topicbench/error.hpp"
#include "topicbench/evaluation.hpp"
#include "topicbench/harness.hpp"
#include "topicbench/jarvis_patrick.hpp"
#include "topicbench/kmeans.hpp"
#include "topicbench/labeling.hpp"
#include "topicbench/metricspace.hpp"
#include "topicbench/reporting.hpp"
#include "topicbench/rng.hpp"
#include "topicbench/runner.hpp"
#include "topicbench/spectral.hpp"
#include "topicbench/stopwords.hpp"
#include "topicbench/synthetic_corpus.hpp"
#include "topicbench/text_io.hpp"
#include "topicbench/utf8.hpp"
