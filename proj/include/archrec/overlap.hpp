#ifndef ARCHREC_OVERLAP_HPP
#define ARCHREC_OVERLAP_HPP

#include <archrec/error.hpp>
#include <archrec/text.hpp>

#include <algorithm>
#include <filesystem>
#include <iterator>
#include <ostream>
#include <set>
#include <string>
#include <system_error>
#include <vector>

// Implementation overlap between installed products: how many lower-cased
// file names two install trees have in common.

namespace archrec {

struct FileNameSet
{
	std::string system;
	std::set<std::string> names;
};

struct ListOptions
{
	/// Keep only .exe and .dll files.
	bool binaries_only = false;
};

/// Base names of every non-directory entry below `root`, lower-cased.
inline FileNameSet list_files(std::string const &system, std::filesystem::path const &root, ListOptions const &options = {})
{
	namespace fs = std::filesystem;
	std::error_code ec;
	if (!fs::is_directory(root, ec))
		throw IoError(root.string());

	FileNameSet out{system, {}};
	fs::recursive_directory_iterator it(root, fs::directory_options::none, ec);
	if (ec)
		throw IoError(root.string());
	for (fs::recursive_directory_iterator end; it != end; it.increment(ec))
	{
		if (ec)
			throw IoError(it->path().string());
		if (it->is_directory(ec))
			continue;
		auto const name = text::to_lower(it->path().filename().string());
		if (options.binaries_only)
		{
			auto const ext = text::to_lower(it->path().extension().string());
			if (ext != ".exe" && ext != ".dll")
				continue;
		}
		out.names.insert(name);
	}
	if (ec)
		throw IoError(root.string());
	return out;
}

struct OverlapMatrix
{
	std::vector<std::string> systems;
	std::vector<std::vector<std::size_t>> counts;
};

/// counts[i][j] = |names_i intersect names_j|.
inline OverlapMatrix overlap_matrix(std::vector<FileNameSet> const &sets)
{
	OverlapMatrix m;
	auto const n = sets.size();
	m.counts.assign(n, std::vector<std::size_t>(n, 0));
	for (auto const &s : sets)
		m.systems.push_back(s.system);
	for (std::size_t i = 0; i < n; ++i)
	{
		m.counts[i][i] = sets[i].names.size();
		for (std::size_t j = i + 1; j < n; ++j)
		{
			std::vector<std::string> common;
			std::set_intersection(sets[i].names.begin(), sets[i].names.end(), sets[j].names.begin(),
				sets[j].names.end(), std::back_inserter(common));
			m.counts[i][j] = m.counts[j][i] = common.size();
		}
	}
	return m;
}

/// Tab separated, systems in input order; zero cells are left empty.
inline void write_overlap(std::ostream &out, OverlapMatrix const &m)
{
	out << "Systems";
	for (auto const &s : m.systems)
		out << '\t' << s;
	out << '\n';
	for (std::size_t i = 0; i < m.systems.size(); ++i)
	{
		out << m.systems[i];
		for (auto const c : m.counts[i])
		{
			out << '\t';
			if (c)
				out << c;
		}
		out << '\n';
	}
}

} // namespace archrec

#endif
