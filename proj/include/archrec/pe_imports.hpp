#ifndef ARCHREC_PE_IMPORTS_HPP
#define ARCHREC_PE_IMPORTS_HPP

#include <archrec/depgraph.hpp>
#include <archrec/error.hpp>
#include <archrec/text.hpp>

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

// Import-table extraction from PE32 / PE32+ images. Every read is checked
// against the buffer; nothing outside it is touched. Delay-load and bound
// imports are not read.

namespace archrec {

struct PeImports
{
	std::vector<ImportEntry> entries;
	/// Set for images carrying a CLI header. `entries` then holds the single
	/// mscoree.dll dependency; managed metadata is not parsed.
	bool managed_unsupported = false;
};

namespace pe {

inline constexpr std::uint16_t pe32_magic = 0x10B;
inline constexpr std::uint16_t pe32_plus_magic = 0x20B;
inline constexpr std::size_t import_directory = 1;
inline constexpr std::size_t clr_directory = 14;
inline constexpr std::size_t descriptor_size = 20;
inline constexpr std::size_t section_header_size = 40;

class Reader
{
public:
	explicit Reader(std::span<std::uint8_t const> bytes) : m_bytes(bytes) {}

	std::size_t size() const noexcept { return m_bytes.size(); }

	template <typename T>
	T read(std::uint64_t offset, char const *what) const
	{
		if (offset > m_bytes.size() || m_bytes.size() - offset < sizeof(T))
			throw TruncatedBuffer(what);
		T v = 0;
		for (std::size_t i = 0; i < sizeof(T); ++i)
			v |= static_cast<T>(static_cast<T>(m_bytes[offset + i]) << (8 * i));
		return v;
	}

	std::string read_cstring(std::uint64_t offset, std::uint64_t limit, char const *what) const
	{
		limit = std::min<std::uint64_t>(limit, m_bytes.size());
		std::string out;
		for (auto i = offset; i < limit; ++i)
		{
			if (m_bytes[i] == 0)
				return out;
			out.push_back(static_cast<char>(m_bytes[i]));
		}
		throw TruncatedBuffer(what);
	}

private:
	std::span<std::uint8_t const> m_bytes;
};

struct Section
{
	std::uint32_t virtual_address;
	std::uint32_t virtual_size;
	std::uint32_t raw_size;
	std::uint32_t raw_pointer;
};

struct FileRange
{
	std::uint64_t offset;
	std::uint64_t end; // one past the section's raw data
};

inline FileRange rva_to_file(std::vector<Section> const &sections, std::uint32_t rva)
{
	for (auto const &s : sections)
	{
		std::uint64_t const span = std::max(s.virtual_size, s.raw_size);
		if (rva < s.virtual_address || rva >= std::uint64_t{s.virtual_address} + span)
			continue;
		std::uint64_t const delta = rva - s.virtual_address;
		if (delta >= s.raw_size)
			throw TruncatedBuffer("RVA maps past the section's raw data");
		return {std::uint64_t{s.raw_pointer} + delta, std::uint64_t{s.raw_pointer} + s.raw_size};
	}
	throw BadRva(rva);
}

} // namespace pe

/// Lists the DLL dependencies of a PE image, one entry per import descriptor.
inline PeImports parse_pe_imports(std::span<std::uint8_t const> bytes, std::string const &importer)
{
	using namespace pe;
	Reader const r(bytes);

	if (r.read<std::uint16_t>(0, "DOS header") != 0x5A4D)
		throw NotPe("missing MZ signature");
	std::uint64_t const nt = r.read<std::uint32_t>(0x3C, "e_lfanew");
	if (r.read<std::uint32_t>(nt, "PE signature") != 0x00004550)
		throw NotPe("missing PE signature");

	std::uint64_t const coff = nt + 4;
	std::uint16_t const section_count = r.read<std::uint16_t>(coff + 2, "COFF header");
	std::uint16_t const optional_size = r.read<std::uint16_t>(coff + 16, "COFF header");
	std::uint64_t const opt = coff + 20;

	std::uint16_t const magic = r.read<std::uint16_t>(opt, "optional header");
	std::uint64_t count_offset = 0;
	if (magic == pe32_magic)
		count_offset = 92;
	else if (magic == pe32_plus_magic)
		count_offset = 108;
	else
		throw NotPe("unknown optional header magic");
	bool const wide = magic == pe32_plus_magic;

	std::uint32_t const dir_count = r.read<std::uint32_t>(opt + count_offset, "optional header");
	std::uint64_t const dirs = opt + count_offset + 4;
	auto directory = [&](std::size_t index) -> std::pair<std::uint32_t, std::uint32_t> {
		if (index >= dir_count)
			return {0, 0};
		return {r.read<std::uint32_t>(dirs + 8 * index, "data directory"),
			r.read<std::uint32_t>(dirs + 8 * index + 4, "data directory")};
	};

	std::vector<Section> sections;
	std::uint64_t const table = opt + optional_size;
	for (std::uint16_t i = 0; i < section_count; ++i)
	{
		std::uint64_t const h = table + section_header_size * i;
		sections.push_back({r.read<std::uint32_t>(h + 12, "section header"), r.read<std::uint32_t>(h + 8, "section header"),
			r.read<std::uint32_t>(h + 16, "section header"), r.read<std::uint32_t>(h + 20, "section header")});
	}

	PeImports result;
	if (directory(clr_directory).first != 0)
	{
		result.entries.push_back({importer, "mscoree.dll", {}});
		result.managed_unsupported = true;
		return result;
	}

	auto const import_rva = directory(import_directory).first;
	if (import_rva == 0)
		return result;

	std::uint64_t const thunk_size = wide ? 8 : 4;
	std::uint64_t const ordinal_flag = wide ? (std::uint64_t{1} << 63) : (std::uint64_t{1} << 31);

	for (std::uint64_t desc = import_rva;; desc += descriptor_size)
	{
		if (desc > 0xFFFFFFFFu)
			throw TruncatedBuffer("import directory runs past the address space");
		auto const where = rva_to_file(sections, static_cast<std::uint32_t>(desc));
		if (where.end - where.offset < descriptor_size)
			throw TruncatedBuffer("import descriptor crosses the section end");
		std::uint32_t const lookup = r.read<std::uint32_t>(where.offset, "import descriptor");
		std::uint32_t const stamp = r.read<std::uint32_t>(where.offset + 4, "import descriptor");
		std::uint32_t const chain = r.read<std::uint32_t>(where.offset + 8, "import descriptor");
		std::uint32_t const name_rva = r.read<std::uint32_t>(where.offset + 12, "import descriptor");
		std::uint32_t const address_table = r.read<std::uint32_t>(where.offset + 16, "import descriptor");
		if ((lookup | stamp | chain | name_rva | address_table) == 0)
			break;

		auto const name_at = rva_to_file(sections, name_rva);
		ImportEntry entry{importer, text::to_lower(r.read_cstring(name_at.offset, name_at.end, "DLL name")), {}};
		if (entry.imported.empty())
			throw NotPe("import descriptor with an empty DLL name");

		std::uint64_t thunk = lookup != 0 ? lookup : address_table;
		for (;; thunk += thunk_size)
		{
			if (thunk > 0xFFFFFFFFu)
				throw TruncatedBuffer("thunk array runs past the address space");
			auto const at = rva_to_file(sections, static_cast<std::uint32_t>(thunk));
			if (at.end - at.offset < thunk_size)
				throw TruncatedBuffer("thunk crosses the section end");
			std::uint64_t const value = wide ? r.read<std::uint64_t>(at.offset, "thunk") : r.read<std::uint32_t>(at.offset, "thunk");
			if (value == 0)
				break;
			if (value & ordinal_flag)
			{
				entry.symbols.push_back("ord#" + std::to_string(value & 0xFFFF));
				continue;
			}
			if (value > 0xFFFFFFFFu)
				throw NotPe("name thunk wider than 32 bits");
			auto const hint = rva_to_file(sections, static_cast<std::uint32_t>(value));
			entry.symbols.push_back(r.read_cstring(hint.offset + 2, hint.end, "import name"));
		}
		result.entries.push_back(std::move(entry));
	}
	return result;
}

} // namespace archrec

#endif
