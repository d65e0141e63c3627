#ifndef ARCHREC_AIB_HPP
#define ARCHREC_AIB_HPP

#include <archrec/clustering.hpp>
#include <archrec/depgraph.hpp>
#include <archrec/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

// Agglomerative information bottleneck clustering of components.
//
// Objects are components, attributes are components too (plus any extra
// attributes), and w(o, a) counts the unique dependencies between o and a.
// After tf-idf weighting each object's row becomes a distribution p(a|o)
// under a uniform prior p(o). Merging clusters ci, cj loses
//
//   dI = (p(ci) + p(cj)) * JS_{pi_i, pi_j}(p(A|ci), p(A|cj))
//
// bits of I(O;A); the greedy loop always merges the cheapest pair. All
// information quantities are in bits.

namespace archrec {

/// Weighted relation between objects and attributes. Object i is also
/// attribute i; extra attributes follow the objects.
class AttributeMatrix
{
public:
	using Row = std::map<std::size_t, double>;

	AttributeMatrix() = default;

	explicit AttributeMatrix(std::vector<std::string> objects, std::vector<std::string> const &extra_attributes = {})
		: m_objects(std::move(objects)), m_rows(m_objects.size())
	{
		m_attributes = m_objects;
		m_attributes.insert(m_attributes.end(), extra_attributes.begin(), extra_attributes.end());
		std::vector<std::string> sorted = m_attributes;
		std::sort(sorted.begin(), sorted.end());
		if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
			throw std::invalid_argument("object and attribute names must be unique");
	}

	std::vector<std::string> const &objects() const noexcept { return m_objects; }
	std::vector<std::string> const &attributes() const noexcept { return m_attributes; }
	std::size_t object_count() const noexcept { return m_objects.size(); }
	std::size_t attribute_count() const noexcept { return m_attributes.size(); }

	/// Present weights of one object; missing keys are absent (bottom).
	Row const &row(std::size_t object) const { return m_rows.at(object); }

	void set(std::size_t object, std::size_t attribute, double weight)
	{
		if (attribute >= m_attributes.size())
			throw std::out_of_range("attribute index");
		if (!(weight >= 0.0) || !std::isfinite(weight))
			throw std::invalid_argument("weights must be finite and nonnegative");
		m_rows.at(object)[attribute] = weight;
	}

	void add(std::size_t object, std::size_t attribute, double weight)
	{
		auto const current = get(object, attribute).value_or(0.0);
		set(object, attribute, current + weight);
	}

	std::optional<double> get(std::size_t object, std::size_t attribute) const
	{
		auto const &r = m_rows.at(object);
		auto const it = r.find(attribute);
		if (it == r.end())
			return std::nullopt;
		return it->second;
	}

	/// Number of objects holding `attribute` with a present weight.
	std::size_t document_frequency(std::size_t attribute) const
	{
		std::size_t df = 0;
		for (auto const &r : m_rows)
			df += r.count(attribute);
		return df;
	}

	AttributeMatrix scaled(double factor) const
	{
		AttributeMatrix out = *this;
		for (auto &r : out.m_rows)
			for (auto &[a, w] : r)
				w *= factor;
		return out;
	}

private:
	std::vector<std::string> m_objects;
	std::vector<std::string> m_attributes;
	std::vector<Row> m_rows;
};

/// w(C1, C2) = w(C2, C1) = unique edges C1->C2 plus C2->C1. No self weights.
inline AttributeMatrix build_matrix(DependencyGraph const &graph)
{
	std::vector<std::string> names(graph.components().begin(), graph.components().end());
	std::unordered_map<std::string, std::size_t> index;
	for (std::size_t i = 0; i < names.size(); ++i)
		index.emplace(names[i], i);
	AttributeMatrix matrix(std::move(names));
	for (auto const &[pair, count] : graph.directed_counts())
	{
		auto const a = index.at(pair.first);
		auto const b = index.at(pair.second);
		matrix.add(a, b, static_cast<double>(count));
		matrix.add(b, a, static_cast<double>(count));
	}
	return matrix;
}

/// w'(o, a) = w(o, a) * log2(1 + |O| / df(a)).
inline AttributeMatrix tfidf(AttributeMatrix const &matrix)
{
	std::vector<std::size_t> df(matrix.attribute_count(), 0);
	for (std::size_t o = 0; o < matrix.object_count(); ++o)
		for (auto const &[a, w] : matrix.row(o))
			++df[a];
	double const n = static_cast<double>(matrix.object_count());
	AttributeMatrix out = matrix;
	for (std::size_t o = 0; o < matrix.object_count(); ++o)
		for (auto const &[a, w] : matrix.row(o))
			out.set(o, a, w * std::log2(1.0 + n / static_cast<double>(df[a])));
	return out;
}

/// Sparse distribution: (attribute index, probability) pairs, indices ascending,
/// zero probabilities omitted.
using SparseDist = std::vector<std::pair<std::uint32_t, double>>;

class ProbModel
{
public:
	ProbModel() = default;

	ProbModel(std::vector<std::string> objects, std::vector<std::string> attributes,
		std::vector<double> priors, std::vector<SparseDist> conditionals)
		: m_objects(std::move(objects)), m_attributes(std::move(attributes)),
		  m_priors(std::move(priors)), m_conditionals(std::move(conditionals))
	{
		if (m_priors.size() != m_objects.size() || m_conditionals.size() != m_objects.size())
			throw std::invalid_argument("one prior and one conditional per object");
	}

	std::vector<std::string> const &objects() const noexcept { return m_objects; }
	std::vector<std::string> const &attributes() const noexcept { return m_attributes; }
	std::vector<double> const &priors() const noexcept { return m_priors; }
	std::vector<SparseDist> const &conditionals() const noexcept { return m_conditionals; }
	std::size_t size() const noexcept { return m_objects.size(); }

	friend bool operator==(ProbModel const &, ProbModel const &) = default;

private:
	std::vector<std::string> m_objects;
	std::vector<std::string> m_attributes;
	std::vector<double> m_priors;
	std::vector<SparseDist> m_conditionals;
};

// Name of the attribute given to an object that holds none.
inline std::string synthetic_self_attribute(std::string const &object)
{
	return "<self:" + object + ">";
}

/// Rows to conditionals p(a|o), uniform prior p(o) = 1/|O|.
inline ProbModel normalize(AttributeMatrix const &matrix)
{
	auto const n = matrix.object_count();
	std::vector<std::string> attributes = matrix.attributes();
	std::vector<SparseDist> conditionals(n);
	for (std::size_t o = 0; o < n; ++o)
	{
		auto const &row = matrix.row(o);
		auto &dist = conditionals[o];
		if (row.empty())
		{
			dist.emplace_back(static_cast<std::uint32_t>(attributes.size()), 1.0);
			attributes.push_back(synthetic_self_attribute(matrix.objects()[o]));
			continue;
		}
		double total = 0.0;
		for (auto const &[a, w] : row)
			total += w;
		if (total > 0.0)
		{
			for (auto const &[a, w] : row)
				if (w > 0.0)
					dist.emplace_back(static_cast<std::uint32_t>(a), w / total);
		}
		else
		{
			for (auto const &[a, w] : row)
				dist.emplace_back(static_cast<std::uint32_t>(a), 1.0 / static_cast<double>(row.size()));
		}
	}
	std::vector<double> priors(n, n ? 1.0 / static_cast<double>(n) : 0.0);
	return ProbModel(matrix.objects(), std::move(attributes), std::move(priors), std::move(conditionals));
}

/// Weighted Jensen-Shannon divergence
///   pi_p * KL(p || m) + pi_q * KL(q || m),  m = pi_p p + pi_q q.
inline double js_divergence(SparseDist const &p, SparseDist const &q, double pi_p, double pi_q)
{
	// m is formed as p + pi_q (q - p) so that p == q gives m == p exactly.
	double const log_p = -std::log2(pi_p);
	double const log_q = -std::log2(pi_q);
	double sum = 0.0;
	std::size_t i = 0, j = 0;
	while (i < p.size() || j < q.size())
	{
		if (j == q.size() || (i < p.size() && p[i].first < q[j].first))
		{
			sum += pi_p * p[i].second * log_p;
			++i;
		}
		else if (i == p.size() || q[j].first < p[i].first)
		{
			sum += pi_q * q[j].second * log_q;
			++j;
		}
		else
		{
			double const a = p[i].second;
			double const b = q[j].second;
			double const m = a + pi_q * (b - a);
			sum += pi_p * a * std::log2(a / m) + pi_q * b * std::log2(b / m);
			++i;
			++j;
		}
	}
	return sum;
}

/// Dense overload; entries equal to zero are skipped.
inline double js_divergence(std::span<double const> p, std::span<double const> q, double pi_p, double pi_q)
{
	if (p.size() != q.size())
		throw std::invalid_argument("distributions over different attribute sets");
	SparseDist sp, sq;
	for (std::size_t i = 0; i < p.size(); ++i)
	{
		if (p[i] > 0.0)
			sp.emplace_back(static_cast<std::uint32_t>(i), p[i]);
		if (q[i] > 0.0)
			sq.emplace_back(static_cast<std::uint32_t>(i), q[i]);
	}
	return js_divergence(sp, sq, pi_p, pi_q);
}

/// A cluster as the greedy loop sees it: its mass and its p(A|c).
struct ClusterSummary
{
	double prior = 0.0;
	SparseDist dist;
};

/// Information lost by merging two clusters.
inline double info_loss(ClusterSummary const &ci, ClusterSummary const &cj)
{
	double const mass = ci.prior + cj.prior;
	return mass * js_divergence(ci.dist, cj.dist, ci.prior / mass, cj.prior / mass);
}

/// Singleton cluster of object `o`.
inline ClusterSummary summary(ProbModel const &model, std::size_t o)
{
	return {model.priors().at(o), model.conditionals().at(o)};
}

inline double info_loss(std::size_t i, std::size_t j, ProbModel const &model)
{
	if (i == j)
		throw std::invalid_argument("information loss needs two distinct clusters");
	return info_loss(summary(model, i), summary(model, j));
}

/// p(c*) = p(ci) + p(cj), p(A|c*) the prior-weighted mixture.
inline ClusterSummary merge_clusters(ClusterSummary const &ci, ClusterSummary const &cj)
{
	ClusterSummary out;
	out.prior = ci.prior + cj.prior;
	double const wj = cj.prior / out.prior;
	double const wi = ci.prior / out.prior;
	auto const &p = ci.dist;
	auto const &q = cj.dist;
	out.dist.reserve(p.size() + q.size());
	std::size_t i = 0, j = 0;
	while (i < p.size() || j < q.size())
	{
		if (j == q.size() || (i < p.size() && p[i].first < q[j].first))
		{
			out.dist.emplace_back(p[i].first, wi * p[i].second);
			++i;
		}
		else if (i == p.size() || q[j].first < p[i].first)
		{
			out.dist.emplace_back(q[j].first, wj * q[j].second);
			++j;
		}
		else
		{
			out.dist.emplace_back(p[i].first, p[i].second + wj * (q[j].second - p[i].second));
			++i;
			++j;
		}
	}
	return out;
}

/// I(O;A) = sum_o sum_a p(o) p(a|o) log2(p(a|o) / p(a)).
inline double mutual_information(ProbModel const &model)
{
	std::vector<double> marginal(model.attributes().size(), 0.0);
	for (std::size_t o = 0; o < model.size(); ++o)
		for (auto const &[a, pa] : model.conditionals()[o])
			marginal[a] += model.priors()[o] * pa;
	double info = 0.0;
	for (std::size_t o = 0; o < model.size(); ++o)
		for (auto const &[a, pa] : model.conditionals()[o])
			info += model.priors()[o] * pa * std::log2(pa / marginal[a]);
	return info;
}

struct MergeStep
{
	std::size_t left{};
	std::size_t right{};
	std::size_t result{};
	double delta_i{};
	std::size_t remaining{};

	friend bool operator==(MergeStep const &, MergeStep const &) = default;
};

/// Full merge history. Leaves carry ids 0..n-1; step s creates id n+s.
struct Dendrogram
{
	std::vector<std::string> leaves;
	std::vector<MergeStep> steps;

	friend bool operator==(Dendrogram const &, Dendrogram const &) = default;
};

/// Greedy AIB over every object of the model. Each step merges the pair with
/// the smallest information loss; equal losses go to the lexicographically
/// smallest pair of canonical names (a cluster's smallest member name).
/// Losses within tie_relative * loss + tie_absolute of the minimum count as
/// equal, so rounding noise (e.g. from rescaled weights) cannot reorder ties.
/// Within a step, `left` is the cluster with the smaller canonical name.
inline constexpr double tie_relative = 1e-10;
inline constexpr double tie_absolute = 1e-15;

inline Dendrogram aib_cluster(ProbModel const &model)
{
	std::size_t const n = model.size();
	Dendrogram out;
	out.leaves = model.objects();
	if (n < 2)
		return out;

	// Canonical names compare through their rank among the object names.
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(),
		[&](std::size_t a, std::size_t b) { return model.objects()[a] < model.objects()[b]; });
	std::vector<std::size_t> rank(n);
	for (std::size_t r = 0; r < n; ++r)
		rank[order[r]] = r;

	std::vector<ClusterSummary> slots(n);
	std::vector<std::size_t> id(n);
	std::vector<bool> alive(n, true);
	for (std::size_t i = 0; i < n; ++i)
	{
		slots[i] = {model.priors()[i], model.conditionals()[i]};
		id[i] = i;
	}

	// Condensed symmetric loss matrix.
	std::vector<double> loss(n * (n - 1) / 2);
	auto at = [n](std::size_t i, std::size_t j) {
		if (i > j)
			std::swap(i, j);
		return i * n - i * (i + 1) / 2 + (j - i - 1);
	};
	// Losses are always evaluated with the smaller canonical name first, so
	// the value does not depend on slot order.
	auto evaluate = [&](std::size_t i, std::size_t j) {
		return rank[i] < rank[j] ? info_loss(slots[i], slots[j]) : info_loss(slots[j], slots[i]);
	};

	struct Candidate
	{
		double delta;
		std::size_t low;
		std::size_t high;
	};
	auto key = [&](std::size_t i, std::size_t j) {
		return Candidate{loss[at(i, j)], std::min(rank[i], rank[j]), std::max(rank[i], rank[j])};
	};
	auto better = [](Candidate const &a, Candidate const &b) {
		if (a.delta != b.delta)
			return a.delta < b.delta;
		if (a.low != b.low)
			return a.low < b.low;
		return a.high < b.high;
	};

	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = i + 1; j < n; ++j)
			loss[at(i, j)] = evaluate(i, j);

	std::vector<std::size_t> nearest(n, n);
	auto refresh = [&](std::size_t i) {
		nearest[i] = n;
		for (std::size_t j = 0; j < n; ++j)
		{
			if (j == i || !alive[j])
				continue;
			if (nearest[i] == n || better(key(i, j), key(i, nearest[i])))
				nearest[i] = j;
		}
	};
	for (std::size_t i = 0; i < n; ++i)
		refresh(i);

	for (std::size_t step = 0; step + 1 < n; ++step)
	{
		// Losses that agree up to rounding are ties: pick the smallest
		// canonical-name pair among everything within tolerance of the minimum.
		double lowest = std::numeric_limits<double>::infinity();
		for (std::size_t i = 0; i < n; ++i)
			if (alive[i])
				lowest = std::min(lowest, loss[at(i, nearest[i])]);
		double const limit = lowest + tie_relative * std::abs(lowest) + tie_absolute;
		std::size_t a = n, b = n;
		for (std::size_t i = 0; i < n; ++i)
		{
			if (!alive[i] || loss[at(i, nearest[i])] > limit)
				continue;
			for (std::size_t j = 0; j < n; ++j)
			{
				if (j == i || !alive[j] || rank[j] < rank[i] || loss[at(i, j)] > limit)
					continue;
				if (a == n || rank[i] < rank[a] || (rank[i] == rank[a] && rank[j] < rank[b]))
				{
					a = i;
					b = j;
				}
			}
		}

		double const delta = loss[at(a, b)];
		out.steps.push_back({id[a], id[b], n + step, std::max(0.0, delta), n - step - 1});

		slots[a] = merge_clusters(slots[a], slots[b]);
		id[a] = n + step;
		alive[b] = false;
		slots[b] = {};

		for (std::size_t k = 0; k < n; ++k)
			if (alive[k] && k != a)
				loss[at(a, k)] = evaluate(a, k);
		for (std::size_t k = 0; k < n; ++k)
		{
			if (!alive[k] || k == a)
				continue;
			if (nearest[k] == a || nearest[k] == b)
				refresh(k);
			else if (better(key(k, a), key(k, nearest[k])))
				nearest[k] = a;
		}
		refresh(a);
	}
	return out;
}

/// Cluster count picked by the largest ratio between consecutive merge losses.
///
/// Every step after the first whose loss is at least 1e-12 is a candidate,
/// with ratio loss / max(loss of the step just before, 1e-12). The cut goes
/// just before the candidate with the largest ratio (the earliest one on
/// ties). Without any candidate the whole set forms one cluster.
inline std::size_t auto_cluster_count(Dendrogram const &dendrogram)
{
	constexpr double eps = 1e-12;
	std::size_t const n = dendrogram.leaves.size();
	if (n == 0)
		return 0;
	double best_ratio = -1.0;
	std::size_t best_k = 1;
	auto const &steps = dendrogram.steps;
	for (std::size_t s = 1; s < steps.size(); ++s)
	{
		if (steps[s].delta_i < eps)
			continue;
		double const ratio = steps[s].delta_i / std::max(steps[s - 1].delta_i, eps);
		if (ratio > best_ratio)
		{
			best_ratio = ratio;
			best_k = steps[s].remaining + 1;
		}
	}
	return best_k;
}

/// Cuts the merge history at `k` clusters, or automatically when `k` is empty.
/// Labels follow the first leaf of each cluster.
inline Clustering select_clustering(Dendrogram const &dendrogram, std::optional<std::size_t> k = std::nullopt)
{
	std::size_t const n = dendrogram.leaves.size();
	if (k && (*k < 1 || *k > n))
		throw BadK(*k, n);
	std::size_t const target = k ? *k : auto_cluster_count(dendrogram);

	std::vector<std::size_t> parent(2 * n);
	std::iota(parent.begin(), parent.end(), 0);
	auto find = [&](std::size_t x) {
		while (parent[x] != x)
			x = parent[x] = parent[parent[x]];
		return x;
	};
	for (std::size_t s = 0; s < n - target; ++s)
	{
		auto const &step = dendrogram.steps.at(s);
		parent[find(step.left)] = step.result;
		parent[find(step.right)] = step.result;
	}

	std::map<std::size_t, std::size_t> label_of_root;
	std::map<std::string, std::size_t> assignment;
	for (std::size_t leaf = 0; leaf < n; ++leaf)
	{
		auto const root = find(leaf);
		auto const [it, inserted] = label_of_root.emplace(root, label_of_root.size());
		assignment[dendrogram.leaves[leaf]] = it->second;
	}
	return Clustering(std::move(assignment));
}

/// Loss with 12 significant digits, as written to dendrogram files.
inline std::string format_bits(double bits)
{
	char buf[64];
	std::snprintf(buf, sizeof(buf), "%.12g", bits);
	return buf;
}

// Dendrogram file: `N <id> <name>` per leaf, then one line per merge:
//   M <step#> <left> <right> -> <result> dI=<bits> k=<remaining>
inline void write_dendrogram(std::ostream &out, Dendrogram const &d)
{
	for (std::size_t i = 0; i < d.leaves.size(); ++i)
		out << "N " << i << ' ' << d.leaves[i] << '\n';
	for (std::size_t s = 0; s < d.steps.size(); ++s)
	{
		auto const &m = d.steps[s];
		out << "M " << s + 1 << ' ' << m.left << ' ' << m.right << " -> " << m.result
			<< " dI=" << format_bits(m.delta_i) << " k=" << m.remaining << '\n';
	}
}

/// graph -> matrix -> tf-idf -> probabilities.
inline ProbModel model_from_graph(DependencyGraph const &graph)
{
	return normalize(tfidf(build_matrix(graph)));
}

} // namespace archrec

#endif
