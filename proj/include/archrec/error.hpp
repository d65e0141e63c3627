#ifndef ARCHREC_ERROR_HPP
#define ARCHREC_ERROR_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace archrec {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// An input file that does not follow its line format. `line()` is 1-based.
class MalformedInput : public Error
{
public:
	MalformedInput(std::string const &what, std::size_t line)
		: Error(what + " (line " + std::to_string(line) + ")"), m_line(line)
	{
	}

	std::size_t line() const noexcept { return m_line; }

private:
	std::size_t m_line;
};

class MalformedTrace : public MalformedInput
{
public:
	MalformedTrace(std::string const &what, std::size_t line)
		: MalformedInput("malformed trace: " + what, line)
	{
	}
};

class MalformedSymbols : public MalformedInput
{
public:
	MalformedSymbols(std::string const &what, std::size_t line)
		: MalformedInput("malformed symbol table: " + what, line)
	{
	}
};

class DuplicateAddress : public Error
{
public:
	explicit DuplicateAddress(std::uint64_t address)
		: Error("duplicate symbol address " + std::to_string(address)), m_address(address)
	{
	}

	std::uint64_t address() const noexcept { return m_address; }

private:
	std::uint64_t m_address;
};

class NotPe : public Error
{
public:
	explicit NotPe(std::string const &what) : Error("not a PE image: " + what) {}
};

class TruncatedBuffer : public Error
{
public:
	explicit TruncatedBuffer(std::string const &what) : Error("truncated PE image: " + what) {}
};

class BadRva : public Error
{
public:
	explicit BadRva(std::uint32_t rva)
		: Error("RVA " + std::to_string(rva) + " is not covered by any section"), m_rva(rva)
	{
	}

	std::uint32_t rva() const noexcept { return m_rva; }

private:
	std::uint32_t m_rva;
};

class BadK : public Error
{
public:
	BadK(std::size_t k, std::size_t n)
		: Error("cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]")
	{
	}
};

class UnknownPrimitive : public Error
{
public:
	explicit UnknownPrimitive(std::string const &name) : Error("unknown primitive component '" + name + "'") {}
};

class ObjectSetMismatch : public Error
{
public:
	ObjectSetMismatch() : Error("clusterings cover different object sets") {}
};

class IoError : public Error
{
public:
	explicit IoError(std::string const &path) : Error("cannot read '" + path + "'"), m_path(path) {}

	std::string const &path() const noexcept { return m_path; }

private:
	std::string m_path;
};

} // namespace archrec

#endif
