#include <exception>
#include <iostream>

#include "commands.hpp"
#include "flowmem/error.hpp"
#include "flowmem/pipeline.hpp"

int main(int argc, char** argv) {
    CLI::App app{"flowmem: long-memory analysis of investor-segregated trading flows"};
    app.set_version_flag("--version", flowmem::version());
    app.require_subcommand(1);
    flowmem::cli::register_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const flowmem::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
