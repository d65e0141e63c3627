#ifndef ARCHREC_TRACE_HPP
#define ARCHREC_TRACE_HPP

#include <archrec/error.hpp>
#include <archrec/text.hpp>

#include <algorithm>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

// Dynamic trace and symbol table formats.
//
// Trace files are line based, whitespace separated:
//
//   L <counter> <module> <base> <size>
//   C <counter> <src_module> <src_site> <dst_module> <dst_site>
//
// `L` records a module load, `C` the first occurrence of a control transfer
// between two sites. Sites are symbol names or `0x` hexadecimal addresses.
// Counters never decrease within a file. Module names are lower-cased on read.
//
// Symbol files hold `<0x address> <name>` lines for one module.

namespace archrec {

struct TraceRecord
{
	std::uint64_t counter{};
	std::string src_module;
	std::string src_site;
	std::string dst_module;
	std::string dst_site;

	friend bool operator==(TraceRecord const &, TraceRecord const &) = default;
};

struct ModuleLoadRecord
{
	std::uint64_t counter{};
	std::string module;
	std::uint64_t base{};
	std::uint64_t size{};

	friend bool operator==(ModuleLoadRecord const &, ModuleLoadRecord const &) = default;
};

using TraceEntry = std::variant<TraceRecord, ModuleLoadRecord>;

inline std::uint64_t counter_of(TraceEntry const &entry)
{
	return std::visit([](auto const &r) { return r.counter; }, entry);
}

/// Parses a whole trace stream. Throws MalformedTrace with the offending line.
inline std::vector<TraceEntry> parse_trace(std::istream &in)
{
	std::vector<TraceEntry> entries;
	std::string line;
	std::size_t line_no = 0;
	std::uint64_t last_counter = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (text::is_skippable(line))
			continue;
		auto const f = text::split_ws(line);
		bool const load = f[0] == "L";
		if (!load && f[0] != "C")
			throw MalformedTrace("unknown record tag '" + std::string(f[0]) + "'", line_no);
		if (load && f.size() != 5)
			throw MalformedTrace("load record needs 5 fields", line_no);
		if (!load && f.size() != 6)
			throw MalformedTrace("control record needs 6 fields", line_no);
		auto const parsed = text::parse_dec(f[1]);
		if (!parsed)
			throw MalformedTrace("counter is not a nonnegative integer", line_no);
		std::uint64_t const counter = *parsed;

		if (load)
		{
			auto const base = text::parse_hex(f[3]);
			auto const size = text::parse_dec(f[4]);
			if (!base)
				throw MalformedTrace("load base is not 0x hexadecimal", line_no);
			if (!size || *size == 0)
				throw MalformedTrace("load size must be a positive integer", line_no);
			entries.emplace_back(ModuleLoadRecord{counter, text::to_lower(f[2]), *base, *size});
		}
		else
		{
			entries.emplace_back(TraceRecord{counter, text::to_lower(f[2]), std::string(f[3]),
				text::to_lower(f[4]), std::string(f[5])});
		}

		if (counter < last_counter)
			throw MalformedTrace("counter decreases", line_no);
		last_counter = counter;
	}
	return entries;
}

/// Only the control transfers of a parsed trace.
inline std::vector<TraceRecord> control_records(std::vector<TraceEntry> const &entries)
{
	std::vector<TraceRecord> out;
	for (auto const &e : entries)
		if (auto const *r = std::get_if<TraceRecord>(&e))
			out.push_back(*r);
	return out;
}

inline void write_trace(std::ostream &out, std::vector<TraceEntry> const &entries)
{
	for (auto const &e : entries)
	{
		if (auto const *c = std::get_if<TraceRecord>(&e))
			out << "C " << c->counter << ' ' << c->src_module << ' ' << c->src_site << ' '
				<< c->dst_module << ' ' << c->dst_site << '\n';
		else
		{
			auto const &l = std::get<ModuleLoadRecord>(e);
			out << "L " << l.counter << ' ' << l.module << ' ' << text::hex(l.base) << ' ' << l.size << '\n';
		}
	}
}

struct Symbol
{
	std::uint64_t address{};
	std::string name;

	friend bool operator==(Symbol const &, Symbol const &) = default;
};

/// Symbols of one module, strictly ascending by address.
class SymbolTable
{
public:
	SymbolTable() = default;

	SymbolTable(std::string module, std::vector<Symbol> entries)
		: m_module(std::move(module)), m_entries(std::move(entries))
	{
		std::sort(m_entries.begin(), m_entries.end(),
			[](Symbol const &a, Symbol const &b) { return a.address < b.address; });
		auto const dup = std::adjacent_find(m_entries.begin(), m_entries.end(),
			[](Symbol const &a, Symbol const &b) { return a.address == b.address; });
		if (dup != m_entries.end())
			throw DuplicateAddress(dup->address);
	}

	std::string const &module() const noexcept { return m_module; }
	std::vector<Symbol> const &entries() const noexcept { return m_entries; }
	bool empty() const noexcept { return m_entries.empty(); }

	/// Nearest symbol at or below `address`, if any.
	Symbol const *floor(std::uint64_t address) const
	{
		auto it = std::upper_bound(m_entries.begin(), m_entries.end(), address,
			[](std::uint64_t a, Symbol const &s) { return a < s.address; });
		if (it == m_entries.begin())
			return nullptr;
		return &*std::prev(it);
	}

private:
	std::string m_module;
	std::vector<Symbol> m_entries;
};

inline SymbolTable parse_symbol_table(std::istream &in, std::string const &module)
{
	std::vector<Symbol> entries;
	std::string line;
	std::size_t line_no = 0;
	while (std::getline(in, line))
	{
		++line_no;
		if (text::is_skippable(line))
			continue;
		auto const f = text::split_ws(line);
		if (f.size() != 2)
			throw MalformedSymbols("expected '<0x address> <name>'", line_no);
		auto const address = text::parse_hex(f[0]);
		if (!address)
			throw MalformedSymbols("address is not 0x hexadecimal", line_no);
		entries.push_back({*address, std::string(f[1])});
	}
	return SymbolTable(text::to_lower(module), std::move(entries));
}

/// Labels an address: the exact symbol, `name+0x<offset>` from the nearest
/// preceding symbol, or the raw hexadecimal address.
inline std::string resolve_site(SymbolTable const &table, std::uint64_t address)
{
	auto const *sym = table.floor(address);
	if (!sym)
		return text::hex(address);
	if (sym->address == address)
		return sym->name;
	return sym->name + "+" + text::hex(address - sym->address);
}

} // namespace archrec

#endif
