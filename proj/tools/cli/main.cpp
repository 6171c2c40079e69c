#include "config.hpp"
#include "run.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    using namespace shrinktarget::cli;
    CLI::App app{"Shrinking-target and Diophantine approximation experiments"};
    app.set_version_flag("--version", SHRINKTARGET_VERSION);
    std::string command;
    std::string config_path;
    RunOptions options;
    std::string out = ".";
    app.add_option("command", command, "approx | criteria | construct | simulate | transfer | verify")
        ->required()
        ->check(CLI::IsMember(k_commands));
    app.add_option("--config", config_path, "key=value config file")->required();
    app.add_option("--out", out, "Output directory (created if missing)");
    app.add_option("--threads", options.threads, "Worker threads for simulations")->check(CLI::Range(1u, 1024u));
    app.footer("Exit status: 0 ok, 1 a reported check failed, 2 domain/dimension/degenerate/config error, "
               "3 precision, 4 resource, 5 internal.");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int status = app.exit(e);
        return status == 0 ? 0 : 2;
    }
    options.out = out;
    return run_file(command, config_path, options, std::cerr);
}
