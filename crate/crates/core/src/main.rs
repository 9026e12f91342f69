fn main() {
    std::process::exit(graph_inspect::cli::run(std::env::args_os()));
}
