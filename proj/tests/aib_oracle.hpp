#ifndef ARCHREC_TESTS_AIB_ORACLE_HPP
#define ARCHREC_TESTS_AIB_ORACLE_HPP

// Dense reference computations for the AIB tests: textbook formulas over
// plain vectors, sharing no code with the library's sparse implementation.

#include <archrec/aib.hpp>

#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Dense = std::vector<double>;

struct DenseCluster
{
	double prior;
	Dense dist;
};

inline double kl_bits(Dense const &p, Dense const &m)
{
	double s = 0.0;
	for (std::size_t i = 0; i < p.size(); ++i)
		if (p[i] > 0.0)
			s += p[i] * std::log(p[i] / m[i]) / std::log(2.0);
	return s;
}

inline double js_bits(Dense const &p, Dense const &q, double wp, double wq)
{
	Dense m(p.size());
	for (std::size_t i = 0; i < p.size(); ++i)
		m[i] = wp * p[i] + wq * q[i];
	return wp * kl_bits(p, m) + wq * kl_bits(q, m);
}

inline double loss(DenseCluster const &a, DenseCluster const &b)
{
	double const mass = a.prior + b.prior;
	return mass * js_bits(a.dist, b.dist, a.prior / mass, b.prior / mass);
}

inline DenseCluster merged(DenseCluster const &a, DenseCluster const &b)
{
	DenseCluster c{a.prior + b.prior, Dense(a.dist.size())};
	for (std::size_t i = 0; i < c.dist.size(); ++i)
		c.dist[i] = (a.prior * a.dist[i] + b.prior * b.dist[i]) / c.prior;
	return c;
}

/// I(C;A) of a set of clusters.
inline double mutual_info(std::vector<DenseCluster> const &cs)
{
	if (cs.empty())
		return 0.0;
	Dense marginal(cs.front().dist.size(), 0.0);
	for (auto const &c : cs)
		for (std::size_t i = 0; i < marginal.size(); ++i)
			marginal[i] += c.prior * c.dist[i];
	double info = 0.0;
	for (auto const &c : cs)
		for (std::size_t i = 0; i < marginal.size(); ++i)
			if (c.dist[i] > 0.0)
				info += c.prior * c.dist[i] * std::log2(c.dist[i] / marginal[i]);
	return info;
}

inline std::vector<DenseCluster> dense_clusters(archrec::ProbModel const &model)
{
	std::vector<DenseCluster> out;
	for (std::size_t o = 0; o < model.size(); ++o)
	{
		DenseCluster c{model.priors()[o], Dense(model.attributes().size(), 0.0)};
		for (auto const &[a, p] : model.conditionals()[o])
			c.dist[a] = p;
		out.push_back(std::move(c));
	}
	return out;
}

/// Random relation: n objects, a few extra attributes, each cell present with
/// probability `density`, integer weights 1..9. Some rows may stay empty.
inline archrec::AttributeMatrix random_matrix(std::mt19937_64 &rng, std::size_t n, double density, std::size_t extra = 3)
{
	std::vector<std::string> objects, extras;
	for (std::size_t i = 0; i < n; ++i)
		objects.push_back("o" + std::to_string(100 + i));
	for (std::size_t i = 0; i < extra; ++i)
		extras.push_back("x" + std::to_string(i));
	archrec::AttributeMatrix m(objects, extras);
	std::uniform_real_distribution<double> unit(0.0, 1.0);
	for (std::size_t o = 0; o < n; ++o)
		for (std::size_t a = 0; a < m.attribute_count(); ++a)
			if (a != o && unit(rng) < density)
				m.set(o, a, static_cast<double>(1 + rng() % 9));
	return m;
}

struct GreedyCheck
{
	bool ok = true;
	std::string message;
};

/// Replays a dendrogram, recomputing every pairwise loss before each step, and
/// checks the chosen pair reaches the minimum (and reports the recorded loss).
inline GreedyCheck check_greedy(archrec::ProbModel const &model, archrec::Dendrogram const &d, double tol = 1e-12)
{
	std::map<std::size_t, DenseCluster> live;
	auto const leaves = dense_clusters(model);
	for (std::size_t i = 0; i < leaves.size(); ++i)
		live.emplace(i, leaves[i]);
	for (std::size_t s = 0; s < d.steps.size(); ++s)
	{
		auto const &step = d.steps[s];
		if (!live.count(step.left) || !live.count(step.right) || step.left == step.right)
			return {false, "step " + std::to_string(s) + " merges an inactive cluster"};
		double best = std::numeric_limits<double>::infinity();
		for (auto i = live.begin(); i != live.end(); ++i)
			for (auto j = std::next(i); j != live.end(); ++j)
				best = std::min(best, loss(i->second, j->second));
		double const chosen = loss(live.at(step.left), live.at(step.right));
		if (chosen > best + tol)
			return {false, "step " + std::to_string(s) + " loss " + std::to_string(chosen) + " above minimum " + std::to_string(best)};
		if (std::abs(chosen - step.delta_i) > tol)
			return {false, "step " + std::to_string(s) + " records a different loss"};
		if (step.remaining != live.size() - 1)
			return {false, "step " + std::to_string(s) + " records a wrong cluster count"};
		auto c = merged(live.at(step.left), live.at(step.right));
		live.erase(step.left);
		live.erase(step.right);
		live.emplace(step.result, std::move(c));
	}
	return {};
}

} // namespace oracle

#endif
