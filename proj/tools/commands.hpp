#pragma once

#include <crown/config.hpp>
#include <crown/error.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace crown::cli {

/// Bad invocation: missing files, unknown values. Maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

void cmd_ingest(const std::string& input, const std::string& format, const std::string& out_dir, std::ostream& log);
void cmd_build_index(const std::string& store_dir, const std::string& out, std::ostream& log);
void cmd_build_wpn(const std::string& store_dir, std::size_t window, std::uint64_t min_cooc, const std::string& out,
                   std::ostream& log);
void cmd_dump(const std::string& store_dir, std::ostream& out);
void cmd_index_stats(const std::string& index_path, std::ostream& out);
void cmd_wpn_export(const std::string& wpn_path, std::ostream& out);

/// Interactive loop: each line is a question, or one of :clear-last,
/// :clear-all, :params, :quit.
void cmd_answer(const config::Config& config, std::istream& in, std::ostream& out);

void cmd_trec_run(const config::Config& config, const std::string& topics_path, const std::string& out_path,
                  const std::string& tag, std::ostream& log);

void cmd_eval(const std::string& run_path, const std::string& qrels_path, const std::string& metrics,
              const std::string& out_tsv, int rel_threshold, std::ostream& out, std::ostream& log);

void cmd_serve(const config::Config& config, const std::string& host, int port, const std::string& ui_dir,
               std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace crown::cli
