#include "symwm/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <set>

using namespace std;

namespace symwm {
vector<double> sampler_input(const State &state, const vector<string> &objects) {
    vector<double> out;
    for (const auto &o : objects) {
        auto it = state.objects.find(o);
        if (it == state.objects.end())
            throw Error("state has no object " + o);
        for (const auto &[name, value] : it->second)
            out.push_back(value);
    }
    return out;
}

SamplerDataset build_dataset(const EquivalenceClass &cls,
                             const vector<Transition> &transitions,
                             const vector<Demonstration> &demos) {
    SamplerDataset data;
    if (cls.members.empty())
        return data;
    const string &skill = transitions[cls.members.front()].action.skill->name;
    auto example = [&](const Transition &t) {
        const State &s = demos.at(t.demo).states.at(t.step);
        return SamplerExample{sampler_input(s, t.action.objects), t.action.theta};
    };
    set<size_t> members(cls.members.begin(), cls.members.end());
    for (size_t m : cls.members)
        data.positives.push_back(example(transitions[m]));
    for (size_t i = 0; i < transitions.size(); ++i)
        if (!members.count(i) && transitions[i].action.skill->name == skill)
            data.negatives.push_back(example(transitions[i]));
    data.theta_dim = transitions[cls.members.front()].action.skill->continuous_dim;
    return data;
}

Sampler fit(const SamplerDataset &dataset, const SamplerConfig &config) {
    if (dataset.positives.empty())
        throw EmptyDataset("sampler needs at least one positive");
    Sampler s;
    s.k = config.k;
    s.max_attempts = config.max_attempts;
    s.variance_floor = config.variance_floor;
    size_t dim = dataset.positives.front().theta.size();
    double n = static_cast<double>(dataset.positives.size());
    s.mean.assign(dim, 0.0);
    s.variance.assign(dim, 0.0);
    for (const auto &ex : dataset.positives)
        for (size_t j = 0; j < dim; ++j)
            s.mean[j] += ex.theta.at(j);
    for (auto &m : s.mean)
        m /= n;
    for (const auto &ex : dataset.positives)
        for (size_t j = 0; j < dim; ++j) {
            double d = ex.theta[j] - s.mean[j];
            s.variance[j] += d * d;
        }
    for (auto &v : s.variance)
        v = max(v / n, config.variance_floor);

    if (dataset.negatives.empty())
        return s;
    auto joined = [](const SamplerExample &ex) {
        vector<double> v = ex.input;
        v.insert(v.end(), ex.theta.begin(), ex.theta.end());
        return v;
    };
    for (const auto &ex : dataset.positives) {
        s.points.push_back(joined(ex));
        s.labels.push_back(true);
    }
    for (const auto &ex : dataset.negatives) {
        s.points.push_back(joined(ex));
        s.labels.push_back(false);
    }
    size_t width = s.points.front().size();
    for (const auto &p : s.points)
        if (p.size() != width)
            throw Error("sampler examples differ in dimension");
    s.center.assign(width, 0.0);
    s.scale.assign(width, 0.0);
    double m = static_cast<double>(s.points.size());
    for (const auto &p : s.points)
        for (size_t j = 0; j < width; ++j)
            s.center[j] += p[j] / m;
    for (const auto &p : s.points)
        for (size_t j = 0; j < width; ++j)
            s.scale[j] += (p[j] - s.center[j]) * (p[j] - s.center[j]) / m;
    for (auto &x : s.scale)
        x = x > 1e-12 ? sqrt(x) : 1.0;
    return s;
}

bool Sampler::accepts(const vector<double> &input,
                      const vector<double> &theta) const {
    if (accept_all())
        return true;
    vector<double> q = input;
    q.insert(q.end(), theta.begin(), theta.end());
    if (q.size() != center.size())
        throw Error("sampler query has the wrong dimension");
    vector<pair<double, size_t>> dist;
    for (size_t i = 0; i < points.size(); ++i) {
        double d = 0;
        for (size_t j = 0; j < q.size(); ++j) {
            double x = (q[j] - points[i][j]) / scale[j];
            d += x * x;
        }
        dist.push_back({d, i});
    }
    size_t kk = min(k, dist.size());
    partial_sort(dist.begin(), dist.begin() + static_cast<ptrdiff_t>(kk),
                 dist.end());
    size_t yes = 0;
    for (size_t i = 0; i < kk; ++i)
        yes += labels[dist[i].second];
    return 2 * yes > kk;
}

vector<double> sample(const Sampler &sampler, const vector<double> &input,
                      mt19937_64 &rng) {
    if (sampler.mean.empty() && sampler.accept_all())
        return {};
    for (int attempt = 0; attempt < sampler.max_attempts; ++attempt) {
        vector<double> theta(sampler.mean.size());
        for (size_t j = 0; j < theta.size(); ++j) {
            normal_distribution<double> g(sampler.mean[j],
                                          sqrt(sampler.variance[j]));
            theta[j] = g(rng);
        }
        if (sampler.accepts(input, theta))
            return theta;
    }
    throw Exhausted("no accepted sample in " + to_string(sampler.max_attempts) +
                    " attempts");
}

map<string, Sampler> learn_samplers(const LearnedOperators &model,
                                    const vector<Transition> &transitions,
                                    const vector<Demonstration> &demos,
                                    const SamplerConfig &config) {
    map<string, Sampler> out;
    for (size_t i = 0; i < model.operators.size(); ++i)
        out[model.operators[i].name] =
            fit(build_dataset(model.classes[i], transitions, demos), config);
    return out;
}
}
