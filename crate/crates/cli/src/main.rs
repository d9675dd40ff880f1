fn main() {
    std::process::exit(finbench_cli::dispatch(std::env::args_os()));
}
