#include <archrec/trace.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace archrec;

namespace {

std::vector<TraceEntry> parse(std::string const &s)
{
	std::istringstream in(s);
	return parse_trace(in);
}

std::size_t malformed_line(std::string const &s)
{
	try
	{
		parse(s);
	}
	catch (MalformedTrace const &e)
	{
		return e.line();
	}
	return 0;
}

SymbolTable table(std::string const &s)
{
	std::istringstream in(s);
	return parse_symbol_table(in, "App.EXE");
}

} // namespace

TEST(ParseTrace, MinimalFile)
{
	auto const entries = parse("L 1 app.exe 0x400000 65536\nC 2 app.exe 0x401000 lib.dll 0x10001000\n");
	ASSERT_EQ(entries.size(), 2u);
	EXPECT_EQ(std::get<ModuleLoadRecord>(entries[0]), (ModuleLoadRecord{1, "app.exe", 0x400000, 65536}));
	EXPECT_EQ(std::get<TraceRecord>(entries[1]), (TraceRecord{2, "app.exe", "0x401000", "lib.dll", "0x10001000"}));
}

TEST(ParseTrace, EmptyStream)
{
	EXPECT_TRUE(parse("").empty());
}

TEST(ParseTrace, CommentsAndBlankLines)
{
	auto const entries = parse("# header\n\n   \nC 1 a.exe f b.dll g\n  # indented comment\n");
	ASSERT_EQ(entries.size(), 1u);
}

TEST(ParseTrace, DecreasingCounter)
{
	EXPECT_EQ(malformed_line("C 5 a.exe 0x1 b.dll 0x2\nC 4 a.exe 0x1 b.dll 0x3\n"), 2u);
}

TEST(ParseTrace, EqualCountersAllowed)
{
	EXPECT_EQ(parse("C 5 a.exe 0x1 b.dll 0x2\nC 5 a.exe 0x1 b.dll 0x3\n").size(), 2u);
}

TEST(ParseTrace, Malformed)
{
	EXPECT_EQ(malformed_line("C 1 a.exe 0x1 b.dll\n"), 1u);
	EXPECT_EQ(malformed_line("# c\nL 1 a.exe 0x1\n"), 2u);
	EXPECT_EQ(malformed_line("C x a.exe 0x1 b.dll 0x2\n"), 1u);
	EXPECT_EQ(malformed_line("C -1 a.exe 0x1 b.dll 0x2\n"), 1u);
	EXPECT_EQ(malformed_line("L 1 a.exe 400000 10\n"), 1u);
	EXPECT_EQ(malformed_line("L 1 a.exe 0x400000 0\n"), 1u);
	EXPECT_EQ(malformed_line("X 1 a.exe\n"), 1u);
}

TEST(ParseTrace, ModulesAreLowerCased)
{
	auto const entries = parse("C 1 App.EXE Init KERNEL32.dll ExitProcess\n");
	auto const &r = std::get<TraceRecord>(entries[0]);
	EXPECT_EQ(r.src_module, "app.exe");
	EXPECT_EQ(r.dst_module, "kernel32.dll");
	EXPECT_EQ(r.src_site, "Init");
	EXPECT_EQ(r.dst_site, "ExitProcess");
}

TEST(ParseTrace, RoundTripProperty)
{
	std::mt19937_64 rng(7);
	auto site = [&] {
		if (rng() % 2)
			return text::hex(rng() % 0x100000000ull);
		return "fn" + std::to_string(rng() % 50);
	};
	for (int trial = 0; trial < 200; ++trial)
	{
		std::vector<TraceEntry> entries;
		std::uint64_t counter = rng() % 3;
		auto const n = rng() % 30;
		for (std::size_t i = 0; i < n; ++i)
		{
			counter += rng() % 3;
			if (rng() % 4 == 0)
				entries.emplace_back(ModuleLoadRecord{counter, "m" + std::to_string(rng() % 5) + ".dll", rng() % 0xffffffffull, 1 + rng() % 100000});
			else
				entries.emplace_back(TraceRecord{counter, "m" + std::to_string(rng() % 5) + ".dll", site(),
					"m" + std::to_string(rng() % 5) + ".exe", site()});
		}
		std::ostringstream out;
		write_trace(out, entries);
		EXPECT_EQ(parse(out.str()), entries);
	}
}

TEST(SymbolTable, TwoEntries)
{
	auto const t = table("0x2000 run\n0x1000 init\n");
	EXPECT_EQ(t.module(), "app.exe");
	ASSERT_EQ(t.entries().size(), 2u);
	EXPECT_EQ(t.entries()[0], (Symbol{0x1000, "init"}));
	EXPECT_EQ(t.entries()[1], (Symbol{0x2000, "run"}));
}

TEST(SymbolTable, Empty)
{
	EXPECT_TRUE(table("").empty());
	EXPECT_TRUE(table("# nothing\n").empty());
}

TEST(SymbolTable, DuplicateAddress)
{
	try
	{
		table("0x1000 a\n0x1000 b\n");
		FAIL() << "expected DuplicateAddress";
	}
	catch (DuplicateAddress const &e)
	{
		EXPECT_EQ(e.address(), 0x1000u);
	}
}

TEST(SymbolTable, Malformed)
{
	EXPECT_THROW(table("1000 init\n"), MalformedSymbols);
	EXPECT_THROW(table("0x1000\n"), MalformedSymbols);
	EXPECT_THROW(table("0x1000 a b\n"), MalformedSymbols);
}

TEST(ResolveSite, Examples)
{
	auto const t = table("0x1000 init\n0x2000 run\n");
	EXPECT_EQ(resolve_site(t, 0x2000), "run");
	EXPECT_EQ(resolve_site(t, 0x1500), "init+0x500");
	EXPECT_EQ(resolve_site(t, 0x800), "0x800");
	EXPECT_EQ(resolve_site(SymbolTable{}, 0x800), "0x800");
}

TEST(ResolveSite, OffsetPropertyAndTotality)
{
	std::mt19937_64 rng(11);
	std::vector<Symbol> syms;
	for (int i = 0; i < 64; ++i)
		syms.push_back({0x1000 + 0x100 * static_cast<std::uint64_t>(i) * (1 + rng() % 4), "s" + std::to_string(i)});
	std::sort(syms.begin(), syms.end(), [](auto const &a, auto const &b) { return a.address < b.address; });
	syms.erase(std::unique(syms.begin(), syms.end(), [](auto const &a, auto const &b) { return a.address == b.address; }), syms.end());
	SymbolTable const t("m.dll", syms);
	for (int i = 0; i < 2000; ++i)
	{
		std::uint64_t const a = rng() % 0x40000;
		auto const label = resolve_site(t, a);
		ASSERT_FALSE(label.empty());
		auto it = std::upper_bound(syms.begin(), syms.end(), a, [](std::uint64_t x, Symbol const &s) { return x < s.address; });
		if (it == syms.begin())
		{
			EXPECT_EQ(label, text::hex(a));
			continue;
		}
		auto const &s = *std::prev(it);
		if (s.address == a)
			EXPECT_EQ(label, s.name);
		else
			EXPECT_EQ(label, s.name + "+" + text::hex(a - s.address));
	}
}
