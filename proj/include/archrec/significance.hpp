#ifndef ARCHREC_SIGNIFICANCE_HPP
#define ARCHREC_SIGNIFICANCE_HPP

#include <archrec/clustering.hpp>
#include <archrec/depgraph.hpp>
#include <archrec/error.hpp>
#include <archrec/text.hpp>
#include <archrec/trace.hpp>

#include <algorithm>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <vector>

// Ranking of primitives inside their cluster, used to name clusters.
//
//   score = ext * (out_own + 1) / (in_own + 1)
//
// ext counts unique edges (either direction) that leave the primitive's
// cluster; out_own / in_own count unique edges to / from its own cluster.

namespace archrec {

struct SignificanceScore
{
	std::string primitive;
	std::size_t ext = 0;
	std::size_t out_own = 0;
	std::size_t in_own = 0;
	double score = 0.0;
};

inline double significance_formula(std::size_t ext, std::size_t out_own, std::size_t in_own)
{
	return static_cast<double>(ext) * static_cast<double>(out_own + 1) / static_cast<double>(in_own + 1);
}

/// Score of `primitive` over an arbitrary edge list. Endpoints missing from
/// the clustering count as outside every cluster.
inline SignificanceScore significance(std::string const &primitive, Clustering const &clustering,
	std::vector<DepEdge> const &edges)
{
	auto const own = clustering.label_of(primitive);
	if (!own)
		throw UnknownPrimitive(primitive);
	SignificanceScore s{primitive};
	for (auto const &e : edges)
	{
		bool const outgoing = e.src.component == primitive;
		bool const incoming = e.dst.component == primitive;
		if (!outgoing && !incoming)
			continue;
		auto const other = clustering.label_of(outgoing ? e.dst.component : e.src.component);
		if (other != own)
			++s.ext;
		else if (outgoing)
			++s.out_own;
		else
			++s.in_own;
	}
	s.score = significance_formula(s.ext, s.out_own, s.in_own);
	return s;
}

inline SignificanceScore significance(std::string const &primitive, Clustering const &clustering,
	DependencyGraph const &graph)
{
	return significance(primitive, clustering, graph.edges());
}

/// Members by descending score, ties by name.
inline std::vector<SignificanceScore> rank_members(std::vector<std::string> const &cluster,
	Clustering const &clustering, std::vector<DepEdge> const &edges)
{
	std::vector<SignificanceScore> scores;
	for (auto const &p : cluster)
		scores.push_back(significance(p, clustering, edges));
	std::sort(scores.begin(), scores.end(), [](SignificanceScore const &a, SignificanceScore const &b) {
		if (a.score != b.score)
			return a.score > b.score;
		return a.primitive < b.primitive;
	});
	return scores;
}

/// The `depth` most significant member names, comma separated.
inline std::string label_cluster(std::vector<std::string> const &cluster, Clustering const &clustering,
	DependencyGraph const &graph, std::size_t depth)
{
	auto const ranked = rank_members(cluster, clustering, graph.edges());
	std::vector<std::string> names;
	for (std::size_t i = 0; i < ranked.size() && i < depth; ++i)
		names.push_back(ranked[i].primitive);
	return text::join(names, ", ");
}

struct UseCaseAnnotation
{
	std::string primitive;
	std::set<std::string> use_cases;
	double intensity = 0.0;
};

/// Marks each primitive with the use-case traces that touch it. Intensity is
/// the primitive's significance over the graph edges seen in the use-case
/// traces, divided by the largest such score (0 when that is 0).
inline std::vector<UseCaseAnnotation> overlay(Clustering const &clustering, DependencyGraph const &graph,
	std::map<std::string, std::vector<TraceRecord>> const &usecases,
	std::map<std::string, SymbolTable> const &tables = {})
{
	std::set<std::pair<MethodRef, MethodRef>> traced;
	std::map<std::string, std::set<std::string>> touched;
	for (auto const &[name, records] : usecases)
	{
		for (auto const &r : records)
		{
			touched[r.src_module].insert(name);
			touched[r.dst_module].insert(name);
		}
		for (auto const &e : build_graph(records, tables).edges())
			traced.emplace(e.src, e.dst);
	}

	std::vector<DepEdge> subgraph;
	for (auto const &e : graph.edges())
		if (traced.count({e.src, e.dst}))
			subgraph.push_back(e);

	std::vector<UseCaseAnnotation> out;
	double max_score = 0.0;
	std::vector<double> scores;
	for (auto const &[primitive, label] : clustering.partition())
	{
		UseCaseAnnotation a{primitive, {}, 0.0};
		if (auto const it = touched.find(primitive); it != touched.end())
			a.use_cases = it->second;
		double const score = significance(primitive, clustering, subgraph).score;
		max_score = std::max(max_score, score);
		scores.push_back(score);
		out.push_back(std::move(a));
	}
	if (max_score > 0.0)
		for (std::size_t i = 0; i < out.size(); ++i)
			out[i].intensity = scores[i] / max_score;
	return out;
}

// Overlay file: `O <primitive> <intensity, 4 decimals> <use cases, comma joined, or ->`.

inline void write_overlay(std::ostream &out, std::vector<UseCaseAnnotation> const &annotations)
{
	for (auto const &a : annotations)
	{
		char buf[32];
		std::snprintf(buf, sizeof(buf), "%.4f", a.intensity);
		std::vector<std::string> cases(a.use_cases.begin(), a.use_cases.end());
		out << "O " << a.primitive << ' ' << buf << ' ' << (cases.empty() ? "-" : text::join(cases, ",")) << '\n';
	}
}

inline std::vector<UseCaseAnnotation> parse_overlay(std::istream &in)
{
	std::vector<UseCaseAnnotation> out;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (text::is_skippable(line))
			continue;
		auto const f = text::split_ws(line);
		if (f.size() != 4 || f[0] != "O")
			throw MalformedInput("overlay line needs 'O <primitive> <intensity> <use cases>'", line_no);
		UseCaseAnnotation a{text::to_lower(f[1]), {}, 0.0};
		try
		{
			a.intensity = std::stod(std::string(f[2]));
		}
		catch (std::exception const &)
		{
			throw MalformedInput("intensity is not a number", line_no);
		}
		if (!(a.intensity >= 0.0 && a.intensity <= 1.0))
			throw MalformedInput("intensity outside [0, 1]", line_no);
		if (f[3] != "-")
		{
			std::string_view rest = f[3];
			while (!rest.empty())
			{
				auto const comma = rest.find(',');
				auto const part = rest.substr(0, comma);
				if (!part.empty())
					a.use_cases.emplace(part);
				rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
			}
		}
		out.push_back(std::move(a));
	}
	return out;
}

} // namespace archrec

#endif
