#pragma once

#include "analysis/correlation.hpp"
#include "analysis/polarity.hpp"
#include "analysis/projection.hpp"
#include "classifiers/model.hpp"
#include "classifiers/pipeline.hpp"
#include "classifiers/split.hpp"
#include "corpus/completion_client.hpp"
#include "corpus/prompt.hpp"
#include "corpus/record_format.hpp"
#include "corpus/remote_generation.hpp"
#include "corpus/simulator.hpp"
#include "corpus/stats.hpp"
#include "error.hpp"
#include "features/embeddings.hpp"
#include "features/matrix.hpp"
#include "features/tfidf.hpp"
#include "io.hpp"
#include "ontology.hpp"
#include "reasoner.hpp"
#include "situation.hpp"
