#ifndef ARCHREC_DOT_HPP
#define ARCHREC_DOT_HPP

#include <archrec/clustering.hpp>
#include <archrec/depgraph.hpp>
#include <archrec/significance.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// DOT rendering of a clustered dependency graph.
//
// One ellipse per cluster, named by its most significant members. One edge
// per connected cluster pair, drawn along the direction with more unique
// dependencies and labelled `N (M)`: N in the drawn direction, M against it,
// `(M)` left out when M is 0. Edge colours split the totals N + M into
// quantile buckets, cold to hot.

namespace archrec {

struct RenderOptions
{
	std::size_t label_depth = 3;
	std::size_t color_buckets = 3;
	bool show_overlay = false;
	bool redact = false;
};

namespace dot {

struct Rgb
{
	int r, g, b;
};

inline constexpr Rgb cold{0x45, 0x75, 0xb4};
inline constexpr Rgb hot{0xd7, 0x30, 0x27};
inline constexpr Rgb idle{0x80, 0x80, 0x80};

inline std::string mix(Rgb from, Rgb to, double t)
{
	auto channel = [t](int a, int b) { return static_cast<int>(std::lround(a + (b - a) * t)); };
	char buf[8];
	std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", channel(from.r, to.r), channel(from.g, to.g), channel(from.b, to.b));
	return buf;
}

inline std::string bucket_color(std::size_t bucket, std::size_t buckets)
{
	if (buckets <= 1)
		return mix(cold, hot, 1.0);
	return mix(cold, hot, static_cast<double>(bucket) / static_cast<double>(buckets - 1));
}

/// Quantile bucket of `value` among `all`: equal values share a bucket.
inline std::size_t quantile_bucket(std::size_t value, std::vector<std::size_t> const &all, std::size_t buckets)
{
	auto const below = static_cast<std::size_t>(std::count_if(all.begin(), all.end(), [&](std::size_t v) { return v < value; }));
	return std::min(buckets - 1, buckets * below / all.size());
}

inline std::string quoted(std::string const &s)
{
	std::string out = "\"";
	for (char c : s)
	{
		if (c == '"' || c == '\\')
			out += '\\';
		out += c;
	}
	return out + '"';
}

inline std::string html_escaped(std::string const &s)
{
	std::string out;
	for (char c : s)
	{
		switch (c)
		{
		case '&': out += "&amp;"; break;
		case '<': out += "&lt;"; break;
		case '>': out += "&gt;"; break;
		case '"': out += "&quot;"; break;
		default: out += c;
		}
	}
	return out;
}

/// Replaces component names by `p<i>`, numbered in name order.
inline std::map<std::string, std::string> redaction_map(Clustering const &clustering, DependencyGraph const &graph)
{
	std::set<std::string> names(graph.components().begin(), graph.components().end());
	for (auto const &[name, label] : clustering.partition())
		names.insert(name);
	std::map<std::string, std::string> out;
	for (auto const &n : names)
		out.emplace(n, "p" + std::to_string(out.size()));
	return out;
}

} // namespace dot

inline std::string to_dot(Clustering const &clustering_in, DependencyGraph const &graph_in, RenderOptions const &options,
	std::optional<std::vector<UseCaseAnnotation>> const &annotations_in = std::nullopt)
{
	if (options.color_buckets < 1)
		throw std::invalid_argument("color_buckets must be at least 1");
	if (options.label_depth < 1)
		throw std::invalid_argument("label_depth must be at least 1");

	Clustering clustering = clustering_in;
	DependencyGraph graph = graph_in;
	auto annotations = annotations_in;
	if (options.redact)
	{
		auto const names = dot::redaction_map(clustering_in, graph_in);
		std::map<std::string, std::size_t> assignment;
		for (auto const &[name, label] : clustering_in.partition())
			assignment[names.at(name)] = label;
		clustering = Clustering(std::move(assignment));
		graph = DependencyGraph{};
		std::map<std::string, std::string> methods;
		for (auto const &e : graph_in.edges())
		{
			// Method labels become m<i>, numbered by first use in edge order.
			auto method_id = [&](MethodRef const &m) {
				auto const key = m.component + '\n' + m.method;
				auto const it = methods.emplace(key, "m" + std::to_string(methods.size())).first;
				return it->second;
			};
			graph.add_edge({{names.at(e.src.component), method_id(e.src)}, {names.at(e.dst.component), method_id(e.dst)},
				e.kind, e.first_seen});
		}
		for (auto const &c : graph_in.components())
			graph.add_component(names.at(c));
		if (annotations)
			for (auto &a : *annotations)
				if (auto const it = names.find(a.primitive); it != names.end())
					a.primitive = it->second;
	}

	auto const clusters = clustering.clusters();
	auto const edges = graph.edges();
	std::vector<std::string> labels;
	std::vector<std::vector<std::string>> ranked_names;
	for (auto const &members : clusters)
	{
		std::vector<std::string> names;
		for (auto const &s : rank_members(members, clustering, edges))
			if (names.size() < options.label_depth)
				names.push_back(s.primitive);
		labels.push_back(text::join(names, ", "));
		ranked_names.push_back(std::move(names));
	}

	// Node ids follow label order.
	std::vector<std::size_t> order(clusters.size());
	for (std::size_t i = 0; i < order.size(); ++i)
		order[i] = i;
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return labels[a] < labels[b]; });
	std::vector<std::size_t> node_of(clusters.size());
	for (std::size_t i = 0; i < order.size(); ++i)
		node_of[order[i]] = i;

	std::map<std::pair<std::size_t, std::size_t>, std::size_t> between;
	for (auto const &[pair, count] : graph.directed_counts())
	{
		auto const a = clustering.label_of(pair.first);
		auto const b = clustering.label_of(pair.second);
		if (a && b && *a != *b)
			between[{*a, *b}] += count;
	}

	struct Drawn
	{
		std::size_t from, to, forward, backward;
	};
	std::vector<Drawn> drawn;
	for (auto const &[pair, count] : between)
	{
		auto const [a, b] = pair;
		auto const reverse_it = between.find({b, a});
		std::size_t const reverse = reverse_it == between.end() ? 0 : reverse_it->second;
		bool const forward = count > reverse || (count == reverse && labels[a] < labels[b]);
		if (forward)
			drawn.push_back({a, b, count, reverse});
	}
	std::sort(drawn.begin(), drawn.end(), [&](Drawn const &x, Drawn const &y) {
		if (labels[x.from] != labels[y.from])
			return labels[x.from] < labels[y.from];
		return labels[x.to] < labels[y.to];
	});

	std::vector<std::size_t> totals;
	for (auto const &d : drawn)
		totals.push_back(d.forward + d.backward);

	std::map<std::string, UseCaseAnnotation const *> annotation_of;
	if (options.show_overlay && annotations)
		for (auto const &a : *annotations)
			annotation_of[a.primitive] = &a;

	std::ostringstream out;
	out << "digraph architecture {\n";
	out << "\tnode [shape=ellipse];\n";
	for (auto const c : order)
	{
		out << "\tn" << node_of[c] << " [label=";
		if (options.show_overlay && annotations)
		{
			out << '<';
			for (std::size_t i = 0; i < ranked_names[c].size(); ++i)
			{
				if (i)
					out << ", ";
				auto const &name = ranked_names[c][i];
				auto const it = annotation_of.find(name);
				if (it == annotation_of.end() || it->second->use_cases.empty())
					out << dot::html_escaped(name);
				else
					out << "<font color=\"" << dot::mix(dot::idle, dot::hot, it->second->intensity) << "\">"
						<< dot::html_escaped(name) << "</font>";
			}
			out << '>';
		}
		else
		{
			out << dot::quoted(labels[c]);
		}
		out << "];\n";
	}
	for (auto const &d : drawn)
	{
		std::string label = std::to_string(d.forward);
		if (d.backward)
			label += " (" + std::to_string(d.backward) + ")";
		auto const bucket = dot::quantile_bucket(d.forward + d.backward, totals, options.color_buckets);
		out << "\tn" << node_of[d.from] << " -> n" << node_of[d.to] << " [label=" << dot::quoted(label)
			<< ", color=" << dot::quoted(dot::bucket_color(bucket, options.color_buckets)) << "];\n";
	}
	out << "}\n";
	return out.str();
}

} // namespace archrec

#endif
