#ifndef ARCHREC_CLUSTERING_HPP
#define ARCHREC_CLUSTERING_HPP

#include <archrec/error.hpp>
#include <archrec/text.hpp>

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

namespace archrec {

/// A partition of named objects with contiguous labels 0..k-1.
class Clustering
{
public:
	Clustering() = default;

	/// Accepts arbitrary labels and renumbers them 0..k-1 in ascending order.
	explicit Clustering(std::map<std::string, std::size_t> assignment)
	{
		std::map<std::size_t, std::size_t> renumber;
		for (auto const &[name, label] : assignment)
			renumber.emplace(label, 0);
		std::size_t next = 0;
		for (auto &[label, contiguous] : renumber)
			contiguous = next++;
		for (auto &[name, label] : assignment)
			label = renumber[label];
		m_partition = std::move(assignment);
		m_k = next;
	}

	std::size_t k() const noexcept { return m_k; }
	std::size_t size() const noexcept { return m_partition.size(); }
	std::map<std::string, std::size_t> const &partition() const noexcept { return m_partition; }

	bool contains(std::string const &name) const { return m_partition.count(name) != 0; }

	std::optional<std::size_t> label_of(std::string const &name) const
	{
		auto const it = m_partition.find(name);
		if (it == m_partition.end())
			return std::nullopt;
		return it->second;
	}

	/// Members of each cluster, indexed by label, names ascending.
	std::vector<std::vector<std::string>> clusters() const
	{
		std::vector<std::vector<std::string>> out(m_k);
		for (auto const &[name, label] : m_partition)
			out[label].push_back(name);
		return out;
	}

	friend bool operator==(Clustering const &, Clustering const &) = default;

private:
	std::map<std::string, std::size_t> m_partition;
	std::size_t m_k = 0;
};

// Partition file: `G <component> <cluster index>`.

inline void write_clustering(std::ostream &out, Clustering const &c)
{
	for (auto const &[name, label] : c.partition())
		out << "G " << name << ' ' << label << '\n';
}

inline Clustering parse_clustering(std::istream &in)
{
	std::map<std::string, std::size_t> assignment;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (text::is_skippable(line))
			continue;
		auto const f = text::split_ws(line);
		if (f.size() != 3 || f[0] != "G")
			throw MalformedInput("partition line needs 'G <component> <cluster index>'", line_no);
		auto const label = text::parse_dec(f[2]);
		if (!label)
			throw MalformedInput("cluster index is not a nonnegative integer", line_no);
		if (!assignment.emplace(text::to_lower(f[1]), *label).second)
			throw MalformedInput("component assigned twice", line_no);
	}
	return Clustering(std::move(assignment));
}

} // namespace archrec

#endif
