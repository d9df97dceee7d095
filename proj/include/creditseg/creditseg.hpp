#pragma once

// Umbrella header pulling in the whole library.

#include "creditseg/classifier.hpp"
#include "creditseg/corpus.hpp"
#include "creditseg/metrics.hpp"
#include "creditseg/pipeline.hpp"
#include "creditseg/porter.hpp"
#include "creditseg/rng.hpp"
#include "creditseg/segmenter.hpp"
#include "creditseg/stopwords.hpp"
#include "creditseg/types.hpp"
