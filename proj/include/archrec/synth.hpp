#ifndef ARCHREC_SYNTH_HPP
#define ARCHREC_SYNTH_HPP

#include <archrec/clustering.hpp>
#include <archrec/error.hpp>
#include <archrec/trace.hpp>

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

// Synthetic systems with planted cluster structure, and NMI scoring of a
// recovered clustering against the planted one.

namespace archrec {

/// SplitMix64 (Steele, Lea, Flood 2014), fixed here so that a seed yields the
/// same system everywhere:
///
///   state += 0x9e3779b97f4a7c15
///   z = state
///   z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9
///   z = (z ^ (z >> 27)) * 0x94d049bb133111eb
///   return z ^ (z >> 31)
///
/// below(n) rejects draws >= 2^64 - (2^64 mod n) and returns x mod n;
/// unit() returns (x >> 11) * 2^-53.
class SplitMix64
{
public:
	explicit SplitMix64(std::uint64_t seed) : m_state(seed) {}

	std::uint64_t next()
	{
		m_state += 0x9e3779b97f4a7c15ull;
		std::uint64_t z = m_state;
		z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
		z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
		return z ^ (z >> 31);
	}

	std::uint64_t below(std::uint64_t n)
	{
		if (n == 0)
			throw std::invalid_argument("below(0)");
		std::uint64_t const reject_from = 0 - ((0 - n) % n); // 2^64 - (2^64 mod n), 0 when n divides 2^64
		for (;;)
		{
			std::uint64_t const x = next();
			if (reject_from == 0 || x < reject_from)
				return x % n;
		}
	}

	double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
	std::uint64_t m_state;
};

struct SynthParams
{
	std::vector<std::size_t> cluster_sizes;
	std::size_t methods_per_component = 1;
	double intra_degree = 0.0;
	double inter_prob = 0.0;
	std::uint64_t seed = 0;

	void validate() const
	{
		if (cluster_sizes.empty())
			throw std::invalid_argument("at least one cluster is needed");
		for (auto s : cluster_sizes)
			if (s == 0)
				throw std::invalid_argument("cluster sizes must be positive");
		if (methods_per_component == 0)
			throw std::invalid_argument("methods_per_component must be positive");
		if (!(intra_degree >= 0.0) || !std::isfinite(intra_degree))
			throw std::invalid_argument("intra_degree must be nonnegative");
		if (!(inter_prob >= 0.0 && inter_prob <= 1.0))
			throw std::invalid_argument("inter_prob must lie in [0, 1]");
	}
};

struct SyntheticSystem
{
	std::vector<TraceRecord> records;
	Clustering truth;
};

/// Draws a system with planted clusters.
///
/// Components are `c<k>_<i>`, methods `m<j>`. Each component gets
/// floor(intra_degree) unique outgoing intra-cluster edges, plus one more with
/// probability frac(intra_degree); targets and methods are uniform and a
/// duplicate draw is retried (up to 64 times). Each ordered pair of
/// components in different clusters gets one edge with probability
/// inter_prob. Edges are shuffled and numbered with counters 1, 2, ...
inline SyntheticSystem generate(SynthParams const &params)
{
	params.validate();
	SplitMix64 rng(params.seed);
	auto const m = params.methods_per_component;

	std::vector<std::string> names;
	std::vector<std::size_t> cluster_of;
	std::vector<std::size_t> first_of;
	std::map<std::string, std::size_t> truth;
	for (std::size_t k = 0; k < params.cluster_sizes.size(); ++k)
	{
		first_of.push_back(names.size());
		for (std::size_t i = 0; i < params.cluster_sizes[k]; ++i)
		{
			names.push_back("c" + std::to_string(k) + "_" + std::to_string(i));
			cluster_of.push_back(k);
			truth[names.back()] = k;
		}
	}

	using Edge = std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>;
	std::set<Edge> seen;
	std::vector<Edge> edges;

	double const whole = std::floor(params.intra_degree);
	double const frac = params.intra_degree - whole;
	for (std::size_t c = 0; c < names.size(); ++c)
	{
		auto const size = params.cluster_sizes[cluster_of[c]];
		auto draws = static_cast<std::size_t>(whole);
		if (rng.unit() < frac)
			++draws;
		if (size < 2)
			continue;
		for (std::size_t d = 0; d < draws; ++d)
		{
			for (int attempt = 0; attempt < 64; ++attempt)
			{
				auto offset = rng.below(size - 1);
				auto const local = c - first_of[cluster_of[c]];
				if (offset >= local)
					++offset;
				Edge const e{c, rng.below(m), first_of[cluster_of[c]] + offset, rng.below(m)};
				if (seen.insert(e).second)
				{
					edges.push_back(e);
					break;
				}
			}
		}
	}

	for (std::size_t a = 0; a < names.size(); ++a)
	{
		for (std::size_t b = 0; b < names.size(); ++b)
		{
			if (cluster_of[a] == cluster_of[b])
				continue;
			if (rng.unit() < params.inter_prob)
			{
				Edge const e{a, rng.below(m), b, rng.below(m)};
				seen.insert(e);
				edges.push_back(e);
			}
		}
	}

	for (std::size_t i = edges.size(); i > 1; --i)
		std::swap(edges[i - 1], edges[rng.below(i)]);

	SyntheticSystem out;
	out.truth = Clustering(std::move(truth));
	std::uint64_t counter = 0;
	for (auto const &[src, src_m, dst, dst_m] : edges)
		out.records.push_back({++counter, names[src], "m" + std::to_string(src_m), names[dst], "m" + std::to_string(dst_m)});
	return out;
}

/// Normalized mutual information 2 I(A;B) / (H(A) + H(B)), in [0, 1].
/// Two single-cluster partitions score 1; exactly one scores 0.
inline double nmi(Clustering const &a, Clustering const &b)
{
	if (a.size() != b.size())
		throw ObjectSetMismatch();
	std::map<std::pair<std::size_t, std::size_t>, double> joint;
	std::vector<double> pa(a.k(), 0.0), pb(b.k(), 0.0);
	auto ib = b.partition().begin();
	for (auto const &[name, la] : a.partition())
	{
		if (ib->first != name)
			throw ObjectSetMismatch();
		joint[{la, ib->second}] += 1.0;
		pa[la] += 1.0;
		pb[ib->second] += 1.0;
		++ib;
	}
	double const n = static_cast<double>(a.size());
	auto entropy = [n](std::vector<double> const &counts) {
		double h = 0.0;
		for (auto c : counts)
			if (c > 0.0)
				h -= (c / n) * std::log2(c / n);
		return h;
	};
	double const ha = entropy(pa);
	double const hb = entropy(pb);
	if (ha == 0.0 && hb == 0.0)
		return 1.0;
	if (ha == 0.0 || hb == 0.0)
		return 0.0;
	double info = 0.0;
	for (auto const &[cell, c] : joint)
		info += (c / n) * std::log2((c * n) / (pa[cell.first] * pb[cell.second]));
	return 2.0 * info / (ha + hb);
}

} // namespace archrec

#endif
