#ifndef SYMWM_SAMPLERS_HPP
#define SYMWM_SAMPLERS_HPP

#include "operator_learning.hpp"

#include <algorithm>
#include <random>

namespace symwm {

class EmptyDataset : public Error {
public:
    using Error::Error;
};

class Exhausted : public Error {
public:
    using Error::Error;
};

struct SamplerExample {
    std::vector<double> input;
    std::vector<double> theta;
};

struct SamplerDataset {
    std::vector<SamplerExample> positives;
    std::vector<SamplerExample> negatives;
    std::size_t theta_dim = 0;
};

// Input of one skill call: the features of its discrete arguments, in
// argument order, each object's features in name order.
std::vector<double> sampler_input(const State &state,
                                  const std::vector<std::string> &objects);

// Positives are the class members; negatives are the other transitions that
// call the same skill.
SamplerDataset build_dataset(const EquivalenceClass &cls,
                             const std::vector<Transition> &transitions,
                             const std::vector<Demonstration> &demos);

struct SamplerConfig {
    double variance_floor = 1e-3;
    std::size_t k = 5;
    int max_attempts = 100;
};

struct Sampler {
    std::vector<double> mean;
    std::vector<double> variance;
    // Accept model: labeled (input ++ theta) points, standardized with
    // center/scale before distances are taken.
    std::vector<std::vector<double>> points;
    std::vector<bool> labels;
    std::vector<double> center;
    std::vector<double> scale;
    std::size_t k = 5;
    int max_attempts = 100;
    double variance_floor = 1e-3;

    bool accept_all() const {
        return std::find(labels.begin(), labels.end(), false) == labels.end();
    }
    bool accepts(const std::vector<double> &input,
                 const std::vector<double> &theta) const;
};

Sampler fit(const SamplerDataset &dataset, const SamplerConfig &config = {});

// First accepted Gaussian draw; Exhausted after max_attempts rejections.
std::vector<double> sample(const Sampler &sampler,
                           const std::vector<double> &input,
                           std::mt19937_64 &rng);

// One sampler per learned operator, keyed by operator name.
std::map<std::string, Sampler> learn_samplers(
    const LearnedOperators &model, const std::vector<Transition> &transitions,
    const std::vector<Demonstration> &demos, const SamplerConfig &config = {});
}

#endif
