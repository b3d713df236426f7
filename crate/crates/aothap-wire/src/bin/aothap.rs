fn main() {
    std::process::exit(aothap_wire::cli::run(std::env::args_os()));
}
