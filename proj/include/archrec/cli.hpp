#ifndef ARCHREC_CLI_HPP
#define ARCHREC_CLI_HPP

#include <archrec/aib.hpp>
#include <archrec/clustering.hpp>
#include <archrec/depgraph.hpp>
#include <archrec/dot.hpp>
#include <archrec/error.hpp>
#include <archrec/overlap.hpp>
#include <archrec/pe_imports.hpp>
#include <archrec/significance.hpp>
#include <archrec/synth.hpp>
#include <archrec/trace.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

// The `archrec` command line: one subcommand per pipeline stage, all data
// exchanged through the text formats of the library headers.
//
// Exit status: 0 success, 1 usage error, 2 input or parse error.

namespace archrec::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_input = 2;

class UsageError : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

namespace detail {

inline std::ifstream open_input(std::string const &path)
{
	std::ifstream in(path, std::ios::binary);
	if (!in)
		throw IoError(path);
	return in;
}

/// Runs `write` against the file at `path`, or against `fallback` when empty.
inline void emit(std::string const &path, std::ostream &fallback, std::function<void(std::ostream &)> const &write)
{
	if (path.empty())
	{
		write(fallback);
		return;
	}
	std::ofstream out(path, std::ios::binary);
	if (!out)
		throw IoError(path);
	write(out);
	if (!out.flush())
		throw IoError(path);
}

template <typename Parse>
auto parse_file(std::string const &path, Parse parse)
{
	auto in = open_input(path);
	try
	{
		return parse(in);
	}
	catch (MalformedInput const &e)
	{
		throw MalformedInput(path + ": " + e.what(), e.line());
	}
}

/// `<name>.sym` files of a directory, keyed by lower-cased module name.
inline std::map<std::string, SymbolTable> load_symbols(std::string const &dir)
{
	namespace fs = std::filesystem;
	std::map<std::string, SymbolTable> tables;
	if (dir.empty())
		return tables;
	std::error_code ec;
	if (!fs::is_directory(dir, ec))
		throw IoError(dir);
	std::vector<fs::path> files;
	for (auto const &entry : fs::directory_iterator(dir, ec))
		if (entry.is_regular_file() && entry.path().extension() == ".sym")
			files.push_back(entry.path());
	if (ec)
		throw IoError(dir);
	std::sort(files.begin(), files.end());
	for (auto const &f : files)
	{
		auto const module = text::to_lower(f.stem().string());
		tables[module] = parse_file(f.string(), [&](std::istream &in) { return parse_symbol_table(in, module); });
	}
	return tables;
}

inline std::vector<TraceRecord> load_trace(std::string const &path)
{
	return control_records(parse_file(path, [](std::istream &in) { return parse_trace(in); }));
}

inline std::pair<std::string, std::string> split_assignment(std::string const &value, char const *flag)
{
	auto const eq = value.find('=');
	if (eq == std::string::npos || eq == 0 || eq + 1 == value.size())
		throw UsageError(std::string(flag) + " expects <name>=<path>, got '" + value + "'");
	return {value.substr(0, eq), value.substr(eq + 1)};
}

inline std::vector<std::uint8_t> read_bytes(std::string const &path)
{
	auto in = open_input(path);
	return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err)
{
	CLI::App app{"Architecture recovery from binary traces and import tables", "archrec"};
	app.require_subcommand(1);

	std::string out_path;

	auto *graph_cmd = app.add_subcommand("graph", "Build a dependency graph from traces and import tuples");
	std::vector<std::string> trace_paths, import_paths;
	std::string symbols_dir;
	graph_cmd->add_option("--trace", trace_paths, "Trace file (repeatable)")->required();
	graph_cmd->add_option("--symbols", symbols_dir, "Directory of <module>.sym symbol tables");
	graph_cmd->add_option("--imports", import_paths, "Import tuple file (repeatable)");
	graph_cmd->add_option("--out", out_path, "Output graph file (default: stdout)");

	auto *imports_cmd = app.add_subcommand("imports", "Extract DLL import tuples from PE files");
	std::vector<std::string> pe_paths;
	imports_cmd->add_option("files", pe_paths, "PE executables")->required();
	imports_cmd->add_option("--out", out_path, "Output import tuple file (default: stdout)");

	auto *cluster_cmd = app.add_subcommand("cluster", "Cluster a dependency graph");
	std::string graph_path;
	std::optional<std::size_t> k;
	std::string dendrogram_path;
	cluster_cmd->add_option("--graph", graph_path, "Graph file")->required();
	auto *k_opt = cluster_cmd->add_option("--k", k, "Number of clusters");
	cluster_cmd->add_flag("--auto", "Pick the cut automatically (default)")->excludes(k_opt);
	cluster_cmd->add_option("--dendrogram", dendrogram_path, "Also write the merge history here");
	cluster_cmd->add_option("--out", out_path, "Output partition file (default: stdout)");

	auto *render_cmd = app.add_subcommand("render", "Render a clustered graph as DOT");
	std::string clustering_path, overlay_path;
	RenderOptions render_options;
	render_cmd->add_option("--graph", graph_path, "Graph file")->required();
	render_cmd->add_option("--clustering", clustering_path, "Partition file")->required();
	render_cmd->add_option("--label-depth", render_options.label_depth, "Members named per cluster")->capture_default_str();
	render_cmd->add_option("--buckets", render_options.color_buckets, "Edge colour buckets")->capture_default_str();
	render_cmd->add_flag("--redact", render_options.redact, "Replace names by numeric ids");
	render_cmd->add_option("--overlay", overlay_path, "Overlay file to colour member names");
	render_cmd->add_option("--out", out_path, "Output DOT file (default: stdout)");

	auto *overlap_cmd = app.add_subcommand("overlap", "File name overlap between install trees");
	std::vector<std::string> systems;
	ListOptions list_options;
	overlap_cmd->add_option("--system", systems, "<name>=<install dir> (repeatable)")->required();
	overlap_cmd->add_flag("--binaries-only", list_options.binaries_only, "Count only .exe and .dll files");
	overlap_cmd->add_option("--out", out_path, "Output table (default: stdout)");

	auto *overlay_cmd = app.add_subcommand("overlay", "Annotate a clustering with use-case traces");
	std::vector<std::string> usecases;
	overlay_cmd->add_option("--graph", graph_path, "Graph file")->required();
	overlay_cmd->add_option("--clustering", clustering_path, "Partition file")->required();
	overlay_cmd->add_option("--usecase", usecases, "<name>=<trace file> (repeatable)")->required();
	overlay_cmd->add_option("--symbols", symbols_dir, "Directory of <module>.sym symbol tables");
	overlay_cmd->add_option("--out", out_path, "Output overlay file (default: stdout)");

	auto *synth_cmd = app.add_subcommand("synth", "Generate a synthetic system with planted clusters");
	SynthParams params;
	std::string truth_path;
	synth_cmd->add_option("--sizes", params.cluster_sizes, "Cluster sizes, comma separated")->required()->delimiter(',');
	synth_cmd->add_option("--methods", params.methods_per_component, "Methods per component")->capture_default_str();
	synth_cmd->add_option("--intra-degree", params.intra_degree, "Expected intra-cluster edges per component")->capture_default_str();
	synth_cmd->add_option("--inter-prob", params.inter_prob, "Cross-cluster edge probability per ordered pair")->capture_default_str();
	synth_cmd->add_option("--seed", params.seed, "Generator seed")->capture_default_str();
	synth_cmd->add_option("--truth-out", truth_path, "Write the planted partition here");
	synth_cmd->add_option("--out", out_path, "Output trace file (default: stdout)");

	auto *eval_cmd = app.add_subcommand("eval", "NMI between a recovered and a reference partition");
	std::string truth_in;
	eval_cmd->add_option("--truth", truth_in, "Reference partition file")->required();
	eval_cmd->add_option("--clustering", clustering_path, "Recovered partition file")->required();

	std::vector<char const *> argv{"archrec"};
	for (auto const &a : args)
		argv.push_back(a.c_str());

	try
	{
		app.parse(static_cast<int>(argv.size()), argv.data());
	}
	catch (CLI::CallForHelp const &e)
	{
		return app.exit(e, out, err);
	}
	catch (CLI::CallForAllHelp const &e)
	{
		return app.exit(e, out, err);
	}
	catch (CLI::ParseError const &e)
	{
		app.exit(e, err, err);
		err << app.help();
		return exit_usage;
	}

	try
	{
		if (graph_cmd->parsed())
		{
			auto const tables = detail::load_symbols(symbols_dir);
			std::vector<TraceRecord> records;
			for (auto const &p : trace_paths)
			{
				auto more = detail::load_trace(p);
				records.insert(records.end(), more.begin(), more.end());
			}
			auto graph = build_graph(records, tables);
			for (auto const &p : import_paths)
				graph = merge_static(std::move(graph), detail::parse_file(p, [](std::istream &in) { return parse_imports(in); }));
			detail::emit(out_path, out, [&](std::ostream &o) { write_graph(o, graph); });
		}
		else if (imports_cmd->parsed())
		{
			std::vector<ImportEntry> all;
			for (auto const &p : pe_paths)
			{
				auto const bytes = detail::read_bytes(p);
				auto const importer = text::to_lower(std::filesystem::path(p).filename().string());
				PeImports result;
				try
				{
					result = parse_pe_imports(bytes, importer);
				}
				catch (Error const &e)
				{
					throw Error(p + ": " + e.what());
				}
				if (result.managed_unsupported)
					err << p << ": managed assembly, metadata references not analysed\n";
				all.insert(all.end(), result.entries.begin(), result.entries.end());
			}
			detail::emit(out_path, out, [&](std::ostream &o) { write_imports(o, all); });
		}
		else if (cluster_cmd->parsed())
		{
			auto const graph = detail::parse_file(graph_path, [](std::istream &in) { return parse_graph(in); });
			auto const dendrogram = aib_cluster(model_from_graph(graph));
			auto const clustering = select_clustering(dendrogram, k);
			if (!dendrogram_path.empty())
				detail::emit(dendrogram_path, out, [&](std::ostream &o) { write_dendrogram(o, dendrogram); });
			detail::emit(out_path, out, [&](std::ostream &o) { write_clustering(o, clustering); });
		}
		else if (render_cmd->parsed())
		{
			if (render_options.label_depth < 1 || render_options.color_buckets < 1)
				throw UsageError("--label-depth and --buckets must be positive");
			auto const graph = detail::parse_file(graph_path, [](std::istream &in) { return parse_graph(in); });
			auto const clustering = detail::parse_file(clustering_path, [](std::istream &in) { return parse_clustering(in); });
			std::optional<std::vector<UseCaseAnnotation>> annotations;
			if (!overlay_path.empty())
			{
				annotations = detail::parse_file(overlay_path, [](std::istream &in) { return parse_overlay(in); });
				render_options.show_overlay = true;
			}
			auto const text = to_dot(clustering, graph, render_options, annotations);
			detail::emit(out_path, out, [&](std::ostream &o) { o << text; });
		}
		else if (overlap_cmd->parsed())
		{
			std::vector<FileNameSet> sets;
			for (auto const &s : systems)
			{
				auto const [name, dir] = detail::split_assignment(s, "--system");
				sets.push_back(list_files(name, dir, list_options));
			}
			auto const matrix = overlap_matrix(sets);
			detail::emit(out_path, out, [&](std::ostream &o) { write_overlap(o, matrix); });
		}
		else if (overlay_cmd->parsed())
		{
			auto const graph = detail::parse_file(graph_path, [](std::istream &in) { return parse_graph(in); });
			auto const clustering = detail::parse_file(clustering_path, [](std::istream &in) { return parse_clustering(in); });
			auto const tables = detail::load_symbols(symbols_dir);
			std::map<std::string, std::vector<TraceRecord>> traces;
			for (auto const &u : usecases)
			{
				auto const [name, path] = detail::split_assignment(u, "--usecase");
				if (name.find(',') != std::string::npos)
					throw UsageError("use-case names must not contain ','");
				if (!traces.emplace(name, detail::load_trace(path)).second)
					throw UsageError("use case '" + name + "' given twice");
			}
			auto const annotations = overlay(clustering, graph, traces, tables);
			detail::emit(out_path, out, [&](std::ostream &o) { write_overlay(o, annotations); });
		}
		else if (synth_cmd->parsed())
		{
			try
			{
				params.validate();
			}
			catch (std::invalid_argument const &e)
			{
				throw UsageError(e.what());
			}
			auto const system = generate(params);
			std::vector<TraceEntry> entries(system.records.begin(), system.records.end());
			detail::emit(out_path, out, [&](std::ostream &o) { write_trace(o, entries); });
			if (!truth_path.empty())
				detail::emit(truth_path, out, [&](std::ostream &o) { write_clustering(o, system.truth); });
		}
		else if (eval_cmd->parsed())
		{
			auto const truth = detail::parse_file(truth_in, [](std::istream &in) { return parse_clustering(in); });
			auto const found = detail::parse_file(clustering_path, [](std::istream &in) { return parse_clustering(in); });
			char buf[64];
			std::snprintf(buf, sizeof(buf), "%.6f", nmi(found, truth));
			out << "nmi " << buf << " k " << found.k() << " truth_k " << truth.k() << '\n';
		}
	}
	catch (BadK const &e)
	{
		err << "error: " << e.what() << '\n';
		return exit_usage;
	}
	catch (UsageError const &e)
	{
		err << "error: " << e.what() << '\n';
		return exit_usage;
	}
	catch (std::exception const &e)
	{
		err << "error: " << e.what() << '\n';
		return exit_input;
	}
	return exit_ok;
}

} // namespace archrec::cli

#endif
