#ifndef ARCHREC_DEPGRAPH_HPP
#define ARCHREC_DEPGRAPH_HPP

#include <archrec/error.hpp>
#include <archrec/text.hpp>
#include <archrec/trace.hpp>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

namespace archrec {

struct MethodRef
{
	std::string component;
	std::string method;

	friend auto operator<=>(MethodRef const &, MethodRef const &) = default;
};

enum class EdgeKind
{
	dynamic,
	static_import,
};

inline char const *to_string(EdgeKind kind)
{
	return kind == EdgeKind::dynamic ? "dynamic" : "static-import";
}

struct DepEdge
{
	MethodRef src;
	MethodRef dst;
	EdgeKind kind{EdgeKind::dynamic};
	std::optional<std::uint64_t> first_seen;

	friend bool operator==(DepEdge const &, DepEdge const &) = default;
};

/// One import-table entry: `importer` links `symbols` from `imported`.
/// Ordinal imports are rendered `ord#<n>`.
struct ImportEntry
{
	std::string importer;
	std::string imported;
	std::vector<std::string> symbols;

	friend bool operator==(ImportEntry const &, ImportEntry const &) = default;
};

// Method label used where import tables do not expose a site.
inline constexpr char const *import_site = "<import>";

/// Components and their unique cross-component method-level edges.
/// Edges are keyed by (src, dst, kind); inserting a known key keeps the
/// smaller `first_seen`. Self edges are never stored.
class DependencyGraph
{
public:
	using Key = std::tuple<MethodRef, MethodRef, EdgeKind>;

	/// Returns false when the edge connects a component to itself.
	bool add_edge(DepEdge const &edge)
	{
		if (edge.src.component == edge.dst.component)
			return false;
		Key key{edge.src, edge.dst, edge.kind};
		auto const [it, inserted] = m_edges.try_emplace(std::move(key), edge.first_seen);
		if (inserted)
		{
			m_components.insert(edge.src.component);
			m_components.insert(edge.dst.component);
			++m_directed[{edge.src.component, edge.dst.component}];
		}
		else if (edge.first_seen && (!it->second || *edge.first_seen < *it->second))
		{
			it->second = edge.first_seen;
		}
		return true;
	}

	void add_component(std::string const &name) { m_components.insert(name); }

	std::set<std::string> const &components() const noexcept { return m_components; }
	std::size_t edge_count() const noexcept { return m_edges.size(); }

	/// Edges in (src, dst, kind) order.
	std::vector<DepEdge> edges() const
	{
		std::vector<DepEdge> out;
		out.reserve(m_edges.size());
		for (auto const &[key, first_seen] : m_edges)
			out.push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), first_seen});
		return out;
	}

	std::size_t directed_edge_count(std::string const &from, std::string const &to) const
	{
		auto const it = m_directed.find({from, to});
		return it == m_directed.end() ? 0 : it->second;
	}

	/// Directed unique-edge counts for every ordered component pair with edges.
	std::map<std::pair<std::string, std::string>, std::size_t> const &directed_counts() const noexcept
	{
		return m_directed;
	}

private:
	std::set<std::string> m_components;
	std::map<Key, std::optional<std::uint64_t>> m_edges;
	std::map<std::pair<std::string, std::string>, std::size_t> m_directed;
};

inline std::size_t directed_edge_count(DependencyGraph const &graph, std::string const &from, std::string const &to)
{
	return graph.directed_edge_count(from, to);
}

namespace detail {

inline std::string label_site(std::string const &module, std::string const &site,
	std::map<std::string, SymbolTable> const &tables)
{
	if (!text::is_hex(site))
		return site;
	auto const table = tables.find(module);
	auto const address = text::parse_hex(site);
	if (table == tables.end() || !address)
		return site;
	return resolve_site(table->second, *address);
}

} // namespace detail

/// Collapses trace records into unique cross-component edges, resolving
/// hexadecimal sites through the module's symbol table when one is given.
inline DependencyGraph build_graph(std::vector<TraceRecord> const &records,
	std::map<std::string, SymbolTable> const &tables = {})
{
	DependencyGraph graph;
	for (auto const &r : records)
	{
		if (r.src_module == r.dst_module)
			continue;
		graph.add_edge({{r.src_module, detail::label_site(r.src_module, r.src_site, tables)},
			{r.dst_module, detail::label_site(r.dst_module, r.dst_site, tables)},
			EdgeKind::dynamic, r.counter});
	}
	return graph;
}

/// Adds one static-import edge per (importer, imported, symbol).
inline DependencyGraph merge_static(DependencyGraph graph, std::vector<ImportEntry> const &imports)
{
	for (auto const &imp : imports)
	{
		if (imp.symbols.empty())
			graph.add_edge({{imp.importer, import_site}, {imp.imported, import_site}, EdgeKind::static_import, {}});
		for (auto const &sym : imp.symbols)
			graph.add_edge({{imp.importer, import_site}, {imp.imported, sym}, EdgeKind::static_import, {}});
	}
	return graph;
}

// Graph file: `E <kind> <src_comp> <src_method> <dst_comp> <dst_method> [first_seen]`,
// lines sorted bytewise.

inline std::string format_edge(DepEdge const &e)
{
	std::string line = "E ";
	line += to_string(e.kind);
	line += ' ' + e.src.component + ' ' + e.src.method + ' ' + e.dst.component + ' ' + e.dst.method;
	if (e.first_seen)
		line += ' ' + std::to_string(*e.first_seen);
	return line;
}

inline void write_graph(std::ostream &out, DependencyGraph const &graph)
{
	std::vector<std::string> lines;
	for (auto const &e : graph.edges())
		lines.push_back(format_edge(e));
	std::sort(lines.begin(), lines.end());
	for (auto const &l : lines)
		out << l << '\n';
}

inline DependencyGraph parse_graph(std::istream &in)
{
	DependencyGraph graph;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (text::is_skippable(line))
			continue;
		auto const f = text::split_ws(line);
		if (f[0] != "E" || (f.size() != 6 && f.size() != 7))
			throw MalformedInput("graph edge needs 'E <kind> <src_comp> <src_method> <dst_comp> <dst_method> [first_seen]'", line_no);
		EdgeKind kind;
		if (f[1] == "dynamic")
			kind = EdgeKind::dynamic;
		else if (f[1] == "static-import")
			kind = EdgeKind::static_import;
		else
			throw MalformedInput("unknown edge kind '" + std::string(f[1]) + "'", line_no);
		std::optional<std::uint64_t> first_seen;
		if (f.size() == 7)
		{
			first_seen = text::parse_dec(f[6]);
			if (!first_seen)
				throw MalformedInput("first_seen is not a nonnegative integer", line_no);
		}
		DepEdge edge{{text::to_lower(f[2]), std::string(f[3])}, {text::to_lower(f[4]), std::string(f[5])}, kind, first_seen};
		if (!graph.add_edge(edge))
			throw MalformedInput("edge connects a component to itself", line_no);
	}
	return graph;
}

// Import tuple file: `I <importer> <imported> [symbol...]`.

inline void write_imports(std::ostream &out, std::vector<ImportEntry> const &imports)
{
	for (auto const &imp : imports)
	{
		out << "I " << imp.importer << ' ' << imp.imported;
		for (auto const &s : imp.symbols)
			out << ' ' << s;
		out << '\n';
	}
}

inline std::vector<ImportEntry> parse_imports(std::istream &in)
{
	std::vector<ImportEntry> imports;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (text::is_skippable(line))
			continue;
		auto const f = text::split_ws(line);
		if (f[0] != "I" || f.size() < 3)
			throw MalformedInput("import line needs 'I <importer> <imported> [symbol...]'", line_no);
		ImportEntry imp{text::to_lower(f[1]), text::to_lower(f[2]), {}};
		for (std::size_t i = 3; i < f.size(); ++i)
			imp.symbols.emplace_back(f[i]);
		imports.push_back(std::move(imp));
	}
	return imports;
}

} // namespace archrec

#endif
