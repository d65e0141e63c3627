#include <archrec/pe_imports.hpp>

#include "objdump_oracle.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <random>

using namespace archrec;

namespace {

std::string const data_dir = ARCHREC_TEST_DATA;

std::vector<std::uint8_t> load(std::string const &name)
{
	std::ifstream in(data_dir + "/" + name, std::ios::binary);
	EXPECT_TRUE(in.good()) << name;
	return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

oracle::ImportSet flatten(PeImports const &r)
{
	oracle::ImportSet out;
	for (auto const &e : r.entries)
		for (auto const &s : e.symbols)
			out.emplace(e.imported, s);
	return out;
}

void put32(std::vector<std::uint8_t> &b, std::size_t at, std::uint32_t v)
{
	for (int i = 0; i < 4; ++i)
		b[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}

} // namespace

TEST(PeImports, HandBuiltPe32)
{
	auto const r = parse_pe_imports(load("pe32_exitprocess.exe"), "fixture.exe");
	ASSERT_EQ(r.entries.size(), 1u);
	EXPECT_EQ(r.entries[0], (ImportEntry{"fixture.exe", "kernel32.dll", {"ExitProcess"}}));
	EXPECT_FALSE(r.managed_unsupported);
}

TEST(PeImports, HandBuiltPe32PlusWithOrdinal)
{
	auto const r = parse_pe_imports(load("pe32plus_mixed.exe"), "mixed.exe");
	ASSERT_EQ(r.entries.size(), 2u);
	EXPECT_EQ(r.entries[0], (ImportEntry{"mixed.exe", "kernel32.dll", {"GetProcAddress", "LoadLibraryA"}}));
	EXPECT_EQ(r.entries[1], (ImportEntry{"mixed.exe", "user32.dll", {"MessageBoxA", "ord#17"}}));
}

TEST(PeImports, MatchesFrozenObjdumpListings)
{
	for (std::string name : {"pe32_exitprocess", "pe32plus_mixed", "setuptools_cli32"})
	{
		auto const expected = oracle::parse_objdump_file(data_dir + "/" + name + ".objdump.txt");
		ASSERT_FALSE(expected.empty()) << name;
		EXPECT_EQ(flatten(parse_pe_imports(load(name + ".exe"), name)), expected) << name;
	}
}

TEST(PeImports, MatchesLiveObjdumpWhenAvailable)
{
	auto const dump = oracle::run_objdump(data_dir + "/setuptools_cli32.exe");
	if (!dump)
		GTEST_SKIP() << "objdump not installed";
	EXPECT_EQ(flatten(parse_pe_imports(load("setuptools_cli32.exe"), "cli.exe")), oracle::parse_objdump(*dump));
}

TEST(PeImports, ManagedAssembly)
{
	auto const r = parse_pe_imports(load("managed_stub.exe"), "app.exe");
	EXPECT_TRUE(r.managed_unsupported);
	ASSERT_EQ(r.entries.size(), 1u);
	EXPECT_EQ(r.entries[0], (ImportEntry{"app.exe", "mscoree.dll", {}}));
}

TEST(PeImports, NoImportDirectory)
{
	auto bytes = load("pe32_exitprocess.exe");
	// Optional header at 0x58; data directory 1 sits at 0x58 + 96 + 8.
	put32(bytes, 0x58 + 96 + 8, 0);
	put32(bytes, 0x58 + 96 + 12, 0);
	EXPECT_TRUE(parse_pe_imports(bytes, "x.exe").entries.empty());
}

TEST(PeImports, Errors)
{
	auto bytes = load("pe32_exitprocess.exe");

	auto not_mz = bytes;
	not_mz[0] = 'Z';
	EXPECT_THROW(parse_pe_imports(not_mz, "x"), NotPe);

	auto not_pe = bytes;
	not_pe[0x40] = 'X';
	EXPECT_THROW(parse_pe_imports(not_pe, "x"), NotPe);

	auto bad_magic = bytes;
	bad_magic[0x58] = 0x07;
	EXPECT_THROW(parse_pe_imports(bad_magic, "x"), NotPe);

	EXPECT_THROW(parse_pe_imports(std::vector<std::uint8_t>{'M'}, "x"), TruncatedBuffer);
	EXPECT_THROW(parse_pe_imports(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 0x30), "x"), TruncatedBuffer);
	EXPECT_THROW(parse_pe_imports(std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 0x210), "x"), TruncatedBuffer);

	auto far_rva = bytes;
	put32(far_rva, 0x58 + 96 + 8, 0x9000);
	EXPECT_THROW(parse_pe_imports(far_rva, "x"), BadRva);
}

TEST(PeImports, MutatedFixturesNeverCrash)
{
	std::mt19937_64 rng(3);
	auto const base = load("pe32plus_mixed.exe");
	int parsed = 0, failed = 0;
	for (int i = 0; i < 2000; ++i)
	{
		auto bytes = base;
		auto const flips = 1 + rng() % 8;
		for (std::size_t f = 0; f < flips; ++f)
			bytes[rng() % bytes.size()] = static_cast<std::uint8_t>(rng());
		if (rng() % 4 == 0)
			bytes.resize(rng() % bytes.size());
		try
		{
			parse_pe_imports(bytes, "fuzz");
			++parsed;
		}
		catch (Error const &)
		{
			++failed;
		}
	}
	EXPECT_EQ(parsed + failed, 2000);
}
