#ifndef ARCHREC_TEXT_HPP
#define ARCHREC_TEXT_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the line-oriented file formats.

namespace archrec::text {

inline std::string to_lower(std::string_view s)
{
	std::string out(s);
	std::transform(out.begin(), out.end(), out.begin(),
		[](unsigned char c) { return static_cast<char>(std::tolower(c)); });
	return out;
}

inline std::vector<std::string_view> split_ws(std::string_view line)
{
	std::vector<std::string_view> fields;
	std::size_t i = 0;
	while (i < line.size())
	{
		while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
			++i;
		std::size_t const start = i;
		while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
			++i;
		if (i > start)
			fields.push_back(line.substr(start, i - start));
	}
	return fields;
}

// Blank or `#` comment lines carry no record.
inline bool is_skippable(std::string_view line)
{
	auto const fields = split_ws(line);
	return fields.empty() || fields.front().front() == '#';
}

inline std::optional<std::uint64_t> parse_dec(std::string_view s)
{
	std::uint64_t v = 0;
	auto const [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 10);
	if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
		return std::nullopt;
	return v;
}

inline bool is_hex(std::string_view s)
{
	if (s.size() < 3 || s[0] != '0' || (s[1] != 'x' && s[1] != 'X'))
		return false;
	return std::all_of(s.begin() + 2, s.end(),
		[](unsigned char c) { return std::isxdigit(c) != 0; });
}

// `0x`-prefixed hexadecimal.
inline std::optional<std::uint64_t> parse_hex(std::string_view s)
{
	if (!is_hex(s))
		return std::nullopt;
	std::uint64_t v = 0;
	auto const [ptr, ec] = std::from_chars(s.data() + 2, s.data() + s.size(), v, 16);
	if (ec != std::errc{} || ptr != s.data() + s.size())
		return std::nullopt;
	return v;
}

inline std::string hex(std::uint64_t v)
{
	char buf[2 + 16];
	auto const [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, 16);
	return "0x" + std::string(buf, ptr);
}

inline std::string join(std::vector<std::string> const &parts, std::string_view sep)
{
	std::string out;
	for (std::size_t i = 0; i < parts.size(); ++i)
	{
		if (i)
			out += sep;
		out += parts[i];
	}
	return out;
}

} // namespace archrec::text

#endif
